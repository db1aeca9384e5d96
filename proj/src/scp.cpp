#include "diffest/scp.hpp"

#include <algorithm>
#include <numeric>

#include "diffest/geometry.hpp"
#include "diffest/parallel.hpp"

namespace diffest {

ClassWeights class_weights(const EmbeddingDataset& data) {
    std::vector<std::size_t> counts(data.num_classes(), 0);
    for (const int label : data.labels) ++counts[label];
    ClassWeights result;
    result.weights.reserve(counts.size());
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) throw Error("empty class '" + data.class_names[c] + "'");
        result.weights.push_back(1.0 / static_cast<double>(counts[c]));
    }
    return result;
}

NeighborRanking rank_neighbors(const EmbeddingDataset& data, std::size_t anchor) {
    const std::size_t n = data.size();
    if (n < 2) throw Error("rank_neighbors: need at least two samples");
    if (anchor >= n) throw Error("rank_neighbors: anchor index out of range");

    NeighborRanking ranking;
    ranking.anchor = anchor;
    ranking.ordered_neighbors.reserve(n - 1);
    std::vector<double> sims(n, 0.0);
    const auto anchor_row = data.embeddings.row(anchor);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == anchor) continue;
        sims[j] = cosine_similarity(anchor_row, data.embeddings.row(j));
        ranking.ordered_neighbors.push_back(j);
    }
    std::sort(ranking.ordered_neighbors.begin(), ranking.ordered_neighbors.end(),
              [&](std::size_t a, std::size_t b) {
                  if (sims[a] != sims[b]) return sims[a] > sims[b];
                  return a < b;
              });
    ranking.similarities.reserve(n - 1);
    for (const std::size_t j : ranking.ordered_neighbors) ranking.similarities.push_back(sims[j]);
    return ranking;
}

double weighted_roc_auc(const NeighborRanking& ranking, const std::vector<int>& labels,
                        int anchor_class, const ClassWeights& weights) {
    double weight_pos = 0.0, weight_neg = 0.0;
    for (const std::size_t j : ranking.ordered_neighbors) {
        const double w = weights.weights.at(labels.at(j));
        if (labels[j] == anchor_class) {
            weight_pos += w;
        } else {
            weight_neg += w;
        }
    }
    if (weight_pos == 0.0) throw Error("weighted_roc_auc: no positive neighbors");
    if (weight_neg == 0.0) throw Error("weighted_roc_auc: no negative neighbors");

    double auc = 0.0;
    double tpr = 0.0, fpr = 0.0;
    const std::size_t m = ranking.ordered_neighbors.size();
    std::size_t i = 0;
    while (i < m) {
        // One tie group per threshold step.
        double group_pos = 0.0, group_neg = 0.0;
        std::size_t j = i;
        while (j < m && ranking.similarities[j] == ranking.similarities[i]) {
            const std::size_t neighbor = ranking.ordered_neighbors[j];
            const double w = weights.weights[labels[neighbor]];
            if (labels[neighbor] == anchor_class) {
                group_pos += w;
            } else {
                group_neg += w;
            }
            ++j;
        }
        const double next_tpr = tpr + group_pos / weight_pos;
        const double next_fpr = fpr + group_neg / weight_neg;
        auc += (next_fpr - fpr) * (tpr + next_tpr) / 2.0;
        tpr = next_tpr;
        fpr = next_fpr;
        i = j;
    }
    return auc;
}

DifficultyVector sample_classification_power(const EmbeddingDataset& data, int threads) {
    const std::size_t n = data.size();
    if (n < 2) throw Error("sample_classification_power: need at least two samples");
    if (data.num_classes() < 2) {
        throw Error("sample_classification_power: need at least two classes");
    }
    std::vector<std::size_t> counts(data.num_classes(), 0);
    for (const int label : data.labels) ++counts[label];
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) throw Error("empty class '" + data.class_names[c] + "'");
        if (counts[c] == 1) {
            throw Error("class '" + data.class_names[c] +
                        "' has a single sample; every anchor needs a positive neighbor");
        }
    }
    const ClassWeights weights = class_weights(data);

    DifficultyVector result{"scp", data.case_ids, std::vector<double>(n, 0.0)};
    parallel_for(0, n, threads, [&](std::size_t anchor) {
        const NeighborRanking ranking = rank_neighbors(data, anchor);
        result.scores[anchor] =
            1.0 - weighted_roc_auc(ranking, data.labels, data.labels[anchor], weights);
    });
    return result;
}

}  // namespace diffest
