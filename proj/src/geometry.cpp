#include "diffest/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace diffest {

namespace {

double norm(std::span<const double> v) {
    double sumsq = 0.0;
    for (const double x : v) sumsq += x * x;
    return std::sqrt(sumsq);
}

void check_compatible(const EmbeddingDataset& data, const CentroidSet& centroids) {
    if (data.dim() != centroids.centroids.cols) {
        throw Error("embedding dimension " + std::to_string(data.dim()) +
                    " does not match centroid dimension " +
                    std::to_string(centroids.centroids.cols));
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int label = data.labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= centroids.num_classes()) {
            throw Error("case '" + data.case_ids[i] + "' has label " + std::to_string(label) +
                        " with no matching centroid");
        }
    }
}

}  // namespace

CentroidSet compute_centroids(const EmbeddingDataset& reference, std::string source) {
    const std::size_t num_classes = reference.num_classes();
    if (num_classes == 0) throw Error("compute_centroids: reference has no classes");

    CentroidSet result;
    result.centroids = Matrix(num_classes, reference.dim(), 0.0);
    result.class_counts.assign(num_classes, 0);
    result.source = std::move(source);

    for (std::size_t i = 0; i < reference.size(); ++i) {
        const auto c = static_cast<std::size_t>(reference.labels[i]);
        const auto row = reference.embeddings.row(i);
        auto out = result.centroids.row(c);
        for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
        ++result.class_counts[c];
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (result.class_counts[c] == 0) {
            throw Error("empty class '" + reference.class_names[c] + "'");
        }
        auto row = result.centroids.row(c);
        for (double& x : row) x /= static_cast<double>(result.class_counts[c]);
        if (norm(row) < 1e-12) {
            throw Error("degenerate centroid for class '" + reference.class_names[c] +
                        "': members cancel to the zero vector");
        }
    }
    return result;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error("cosine_similarity: dimension mismatch (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + ")");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) throw Error("cosine_similarity: zero vector");
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

DifficultyVector inverse_similarity(const EmbeddingDataset& data, const CentroidSet& centroids) {
    check_compatible(data, centroids);
    DifficultyVector result{"inv_sim", data.case_ids, {}};
    result.scores.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto c = static_cast<std::size_t>(data.labels[i]);
        result.scores.push_back(
            1.0 - cosine_similarity(data.embeddings.row(i), centroids.centroids.row(c)));
    }
    return result;
}

double inverse_softmax_from_similarities(std::span<const double> similarities, int true_class) {
    if (true_class < 0 || static_cast<std::size_t>(true_class) >= similarities.size()) {
        throw Error("inverse_softmax: class index out of range");
    }
    const double max_sim = *std::max_element(similarities.begin(), similarities.end());
    double denom = 0.0;
    for (const double s : similarities) denom += std::exp(s - max_sim);
    return 1.0 - std::exp(similarities[true_class] - max_sim) / denom;
}

DifficultyVector inverse_softmax_similarity(const EmbeddingDataset& data,
                                            const CentroidSet& centroids) {
    check_compatible(data, centroids);
    const std::size_t num_classes = centroids.num_classes();
    if (num_classes < 2) {
        throw Error("inverse_softmax_similarity: need at least two classes");
    }
    DifficultyVector result{"inv_softmax", data.case_ids, {}};
    result.scores.reserve(data.size());
    std::vector<double> sims(num_classes);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t c = 0; c < num_classes; ++c) {
            sims[c] = cosine_similarity(data.embeddings.row(i), centroids.centroids.row(c));
        }
        result.scores.push_back(inverse_softmax_from_similarities(sims, data.labels[i]));
    }
    return result;
}

DifficultyVector normalize_per_class(const DifficultyVector& scores,
                                     const std::vector<int>& labels) {
    if (scores.size() != labels.size()) {
        throw Error("normalize_per_class: scores and labels differ in length");
    }
    if (scores.size() == 0) throw Error("normalize_per_class: empty scores");

    const int max_label = *std::max_element(labels.begin(), labels.end());
    if (*std::min_element(labels.begin(), labels.end()) < 0) {
        throw Error("normalize_per_class: negative label");
    }
    std::vector<double> sums(max_label + 1, 0.0);
    std::vector<std::size_t> counts(max_label + 1, 0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        sums[labels[i]] += scores.scores[i];
        ++counts[labels[i]];
    }
    std::vector<double> means(max_label + 1, 0.0);
    for (int c = 0; c <= max_label; ++c) {
        if (counts[c] == 0) continue;
        means[c] = sums[c] / static_cast<double>(counts[c]);
        if (!(means[c] > 0.0) || means[c] < 1e-12) {
            throw Error("normalize_per_class: degenerate mean for class " + std::to_string(c));
        }
    }

    DifficultyVector result{scores.method_name + "_norm", scores.case_ids, {}};
    result.scores.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        result.scores.push_back(scores.scores[i] / means[labels[i]]);
    }
    return result;
}

}  // namespace diffest
