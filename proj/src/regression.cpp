#include "diffest/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "diffest/parallel.hpp"
#include "diffest/rng.hpp"

namespace diffest {

namespace {

struct TreeBuilder {
    const Matrix& features;
    std::span<const double> targets;
    const ExtraTreesParams& params;
    Rng rng;
    Tree tree;
    std::vector<std::size_t> indices;

    TreeBuilder(const Matrix& features_, std::span<const double> targets_,
                const ExtraTreesParams& params_, std::uint64_t seed)
        : features(features_), targets(targets_), params(params_), rng(seed) {
        indices.resize(features.rows);
        std::iota(indices.begin(), indices.end(), 0);
    }

    std::int32_t build(std::size_t lo, std::size_t hi) {
        const std::size_t n = hi - lo;
        double sum = 0.0, sumsq = 0.0;
        double y_min = targets[indices[lo]], y_max = y_min;
        for (std::size_t i = lo; i < hi; ++i) {
            const double y = targets[indices[i]];
            sum += y;
            sumsq += y * y;
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
        const bool pure = y_min == y_max;

        const auto make_leaf = [&] {
            TreeNode leaf;
            leaf.value = pure ? y_min : sum / static_cast<double>(n);
            tree.nodes.push_back(leaf);
            return static_cast<std::int32_t>(tree.nodes.size() - 1);
        };

        if (pure || n < static_cast<std::size_t>(params.min_samples_split)) return make_leaf();

        // One random cut per non-constant feature; keep the pair with the
        // smallest child sum of squared deviations (= largest variance
        // reduction). Constant features draw nothing, so appending one
        // changes no decision.
        int best_feature = -1;
        double best_cut = 0.0;
        double best_score = std::numeric_limits<double>::infinity();
        for (std::size_t f = 0; f < features.cols; ++f) {
            double x_min = features(indices[lo], f), x_max = x_min;
            for (std::size_t i = lo + 1; i < hi; ++i) {
                const double x = features(indices[i], f);
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
            }
            if (x_min == x_max) continue;

            double cut = x_min + rng.uniform() * (x_max - x_min);
            if (!(cut < x_max)) cut = std::nextafter(x_max, x_min);

            double sum_left = 0.0, sumsq_left = 0.0;
            std::size_t n_left = 0;
            for (std::size_t i = lo; i < hi; ++i) {
                if (features(indices[i], f) <= cut) {
                    const double y = targets[indices[i]];
                    sum_left += y;
                    sumsq_left += y * y;
                    ++n_left;
                }
            }
            const std::size_t n_right = n - n_left;
            if (n_left < static_cast<std::size_t>(params.min_samples_leaf) ||
                n_right < static_cast<std::size_t>(params.min_samples_leaf)) {
                continue;
            }
            const double sum_right = sum - sum_left;
            const double sumsq_right = sumsq - sumsq_left;
            const double score =
                (sumsq_left - sum_left * sum_left / static_cast<double>(n_left)) +
                (sumsq_right - sum_right * sum_right / static_cast<double>(n_right));
            if (score < best_score) {
                best_score = score;
                best_feature = static_cast<int>(f);
                best_cut = cut;
            }
        }
        if (best_feature < 0) return make_leaf();

        const auto split = std::partition(indices.begin() + lo, indices.begin() + hi,
                                          [&](std::size_t i) {
                                              return features(i, best_feature) <= best_cut;
                                          });
        const auto mid = static_cast<std::size_t>(split - indices.begin());

        tree.nodes.emplace_back();
        const auto node_id = static_cast<std::int32_t>(tree.nodes.size() - 1);
        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_cut;
        const std::int32_t left = build(lo, mid);
        const std::int32_t right = build(mid, hi);
        tree.nodes[node_id].left = left;
        tree.nodes[node_id].right = right;
        return node_id;
    }
};

double tree_predict(const Tree& tree, std::span<const double> row) {
    std::int32_t node = 0;
    while (tree.nodes[node].feature >= 0) {
        const TreeNode& current = tree.nodes[node];
        node = row[current.feature] <= current.threshold ? current.left : current.right;
    }
    return tree.nodes[node].value;
}

}  // namespace

Matrix build_features(const EmbeddingDataset& data, bool use_label) {
    const std::size_t n = data.size();
    const std::size_t dim = data.dim();
    const std::size_t num_classes = data.num_classes();
    Matrix rows(n, use_label ? dim + num_classes : dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto embedding = data.embeddings.row(i);
        auto out = rows.row(i);
        std::copy(embedding.begin(), embedding.end(), out.begin());
        if (use_label) out[dim + static_cast<std::size_t>(data.labels[i])] = 1.0;
    }
    return rows;
}

TreeEnsembleModel fit_extra_trees(const Matrix& features, std::span<const double> targets,
                                  const ExtraTreesParams& params, std::uint64_t seed,
                                  int threads) {
    if (features.rows == 0) throw Error("fit_extra_trees: empty training set");
    if (features.rows != targets.size()) {
        throw Error("fit_extra_trees: feature rows and targets differ in length");
    }
    if (params.n_trees < 1) throw Error("fit_extra_trees: need at least one tree");
    if (params.min_samples_split < 2) {
        throw Error("fit_extra_trees: min_samples_split must be at least 2");
    }
    if (params.min_samples_leaf < 1) {
        throw Error("fit_extra_trees: min_samples_leaf must be at least 1");
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!std::isfinite(targets[i])) {
            throw Error("fit_extra_trees: non-finite target at index " + std::to_string(i));
        }
    }

    TreeEnsembleModel model;
    model.params = params;
    model.seed = seed;
    model.feature_count = features.cols;
    model.trees.resize(params.n_trees);
    parallel_for(0, static_cast<std::size_t>(params.n_trees), threads, [&](std::size_t t) {
        TreeBuilder builder(features, targets, params, mix_seed(seed, t));
        builder.build(0, features.rows);
        model.trees[t] = std::move(builder.tree);
    });
    return model;
}

std::vector<double> predict(const TreeEnsembleModel& model, const Matrix& rows, int threads) {
    if (rows.cols != model.feature_count) {
        throw Error("predict: row width " + std::to_string(rows.cols) +
                    " does not match model feature count " +
                    std::to_string(model.feature_count));
    }
    std::vector<double> predictions(rows.rows, 0.0);
    parallel_for(0, rows.rows, threads, [&](std::size_t i) {
        const auto row = rows.row(i);
        double acc = 0.0;
        for (const Tree& tree : model.trees) acc += tree_predict(tree, row);
        predictions[i] = acc / static_cast<double>(model.trees.size());
    });
    return predictions;
}

DifficultyVector cross_val_predict(const EmbeddingDataset& data, const DifficultyVector& truth,
                                   bool use_label, int folds, const ExtraTreesParams& params,
                                   std::uint64_t seed, int threads) {
    const std::size_t n = data.size();
    if (folds < 2) throw Error("cross_val_predict: need at least two folds");
    if (static_cast<std::size_t>(folds) > n) {
        throw Error("cross_val_predict: fold count exceeds the number of cases");
    }
    if (truth.size() != n) {
        throw Error("cross_val_predict: truth covers " + std::to_string(truth.size()) +
                    " cases, dataset has " + std::to_string(n));
    }
    std::unordered_map<std::string, double> truth_by_id;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        truth_by_id.emplace(truth.case_ids[i], truth.scores[i]);
    }

    // Fold membership is a function of (sorted case ids, seed), never of the
    // row order, and training rows are assembled in that same order.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return data.case_ids[a] < data.case_ids[b];
    });
    Rng shuffle_rng(mix_seed(seed, 0));
    shuffle_rng.shuffle(perm);

    const Matrix all_features = build_features(data, use_label);
    std::vector<double> all_targets(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = truth_by_id.find(data.case_ids[i]);
        if (it == truth_by_id.end()) {
            throw Error("cross_val_predict: truth is missing case '" + data.case_ids[i] + "'");
        }
        all_targets[i] = it->second;
    }

    DifficultyVector result{use_label ? "xt_embed_label" : "xt_embed", data.case_ids,
                            std::vector<double>(n, 0.0)};
    for (int f = 0; f < folds; ++f) {
        const std::size_t fold_lo = static_cast<std::size_t>(f) * n / folds;
        const std::size_t fold_hi = static_cast<std::size_t>(f + 1) * n / folds;

        Matrix train(n - (fold_hi - fold_lo), all_features.cols, 0.0);
        std::vector<double> train_targets;
        train_targets.reserve(train.rows);
        Matrix test(fold_hi - fold_lo, all_features.cols, 0.0);
        std::size_t train_row = 0, test_row = 0;
        for (std::size_t p = 0; p < n; ++p) {
            const std::size_t case_index = perm[p];
            const auto src = all_features.row(case_index);
            if (p >= fold_lo && p < fold_hi) {
                std::copy(src.begin(), src.end(), test.row(test_row++).begin());
            } else {
                std::copy(src.begin(), src.end(), train.row(train_row++).begin());
                train_targets.push_back(all_targets[case_index]);
            }
        }

        const TreeEnsembleModel model =
            fit_extra_trees(train, train_targets, params, mix_seed(seed, 1 + f), threads);
        const std::vector<double> fold_predictions = predict(model, test, threads);
        for (std::size_t p = fold_lo; p < fold_hi; ++p) {
            result.scores[perm[p]] = fold_predictions[p - fold_lo];
        }
    }
    return result;
}

}  // namespace diffest
