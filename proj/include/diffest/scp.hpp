#pragma once

#include <vector>

#include "diffest/types.hpp"

namespace diffest {

/// All samples except the anchor, ordered by descending cosine similarity
/// to the anchor. Exact similarity ties are broken by ascending case index.
struct NeighborRanking {
    std::size_t anchor = 0;
    std::vector<std::size_t> ordered_neighbors;  // N - 1 case indices
    std::vector<double> similarities;            // matching, nonincreasing
};

/// Inverse class frequencies: weight(c) * count(c) = 1.
struct ClassWeights {
    std::vector<double> weights;
};

ClassWeights class_weights(const EmbeddingDataset& data);

NeighborRanking rank_neighbors(const EmbeddingDataset& data, std::size_t anchor);

/// Area under the weighted ROC curve of the neighbor sweep: neighbors of
/// anchor_class are positives, all others negatives; the threshold sweeps
/// down the similarity ranking; tie groups enter at once as diagonal
/// segments; TPR/FPR accumulate class weights; trapezoid rule. Equals the
/// weighted probability that a random positive outranks a random negative,
/// ties counting 1/2.
double weighted_roc_auc(const NeighborRanking& ranking, const std::vector<int>& labels,
                        int anchor_class, const ClassWeights& weights);

/// score(s) = 1 - weighted_roc_auc for anchor s against its own class, so
/// higher means harder. Weights come from the scored set's own class counts.
/// Every class must have at least two samples. O(N^2 log N) overall.
DifficultyVector sample_classification_power(const EmbeddingDataset& data, int threads = 1);

}  // namespace diffest
