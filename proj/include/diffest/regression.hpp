#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "diffest/types.hpp"

namespace diffest {

struct ExtraTreesParams {
    int n_trees = 500;
    int min_samples_split = 10;
    int min_samples_leaf = 1;
};

/// Flat binary tree. feature == -1 marks a leaf holding the mean target of
/// its training samples; internal nodes route x[feature] <= threshold left.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;
};

struct TreeEnsembleModel {
    std::vector<Tree> trees;
    ExtraTreesParams params;
    std::uint64_t seed = 0;
    std::size_t feature_count = 0;
};

/// Embeddings as-is, or embeddings concatenated with a C-dimensional one-hot
/// encoding of the ground-truth class.
Matrix build_features(const EmbeddingDataset& data, bool use_label);

/// Extremely randomized trees, regression flavor: every tree is grown on the
/// full training set; at each node one cut is drawn uniformly at random
/// inside (min, max) of every non-constant feature and the (feature, cut)
/// pair with the largest variance reduction wins, lowest feature index on
/// ties. Nodes with fewer than min_samples_split samples, a pure target, or
/// no splittable feature become leaves. Per-tree seeds derive from the
/// master seed, so results do not depend on the worker count.
TreeEnsembleModel fit_extra_trees(const Matrix& features, std::span<const double> targets,
                                  const ExtraTreesParams& params = {}, std::uint64_t seed = 0,
                                  int threads = 1);

/// Mean of per-tree leaf predictions, accumulated in tree order.
std::vector<double> predict(const TreeEnsembleModel& model, const Matrix& rows,
                            int threads = 1);

/// Out-of-fold prediction: case ids are sorted lexicographically, shuffled
/// with the seed, and cut into `folds` contiguous blocks; each block is
/// predicted by a model fitted on the remaining blocks. Every case gets
/// exactly one prediction, from a model that never saw it. The method name
/// is "xt_embed" or "xt_embed_label".
DifficultyVector cross_val_predict(const EmbeddingDataset& data, const DifficultyVector& truth,
                                   bool use_label, int folds = 5,
                                   const ExtraTreesParams& params = {}, std::uint64_t seed = 0,
                                   int threads = 1);

}  // namespace diffest
