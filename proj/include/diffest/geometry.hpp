#pragma once

#include <span>
#include <string>
#include <vector>

#include "diffest/types.hpp"

namespace diffest {

/// One mean embedding per class. Cosine similarity ignores positive scaling,
/// so the means are stored unnormalized.
struct CentroidSet {
    Matrix centroids;  // C x D
    std::string source;
    std::vector<std::size_t> class_counts;

    std::size_t num_classes() const { return centroids.rows; }
};

/// Per-class arithmetic means of the reference embeddings. Errors on an
/// empty class and on a class whose members cancel to a zero mean.
CentroidSet compute_centroids(const EmbeddingDataset& reference, std::string source = "");

/// dot(a, b) / (|a| |b|), clamped to [-1, 1]. Zero vectors are an error.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// score(s) = 1 - cos(embedding(s), centroid(label(s))), in [0, 2].
DifficultyVector inverse_similarity(const EmbeddingDataset& data, const CentroidSet& centroids);

/// score(s) = 1 - softmax(similarities to all centroids)[label(s)], in (0, 1).
/// The softmax uses the max-subtraction trick; temperature is fixed at 1.
DifficultyVector inverse_softmax_similarity(const EmbeddingDataset& data,
                                            const CentroidSet& centroids);

/// The softmax step on a precomputed similarity row.
double inverse_softmax_from_similarities(std::span<const double> similarities, int true_class);

/// Divides each score by the mean score of its class, enforcing the equal
/// average class difficulty assumption. The method name gains a "_norm"
/// suffix. A class mean below 1e-12 is an error.
DifficultyVector normalize_per_class(const DifficultyVector& scores,
                                     const std::vector<int>& labels);

}  // namespace diffest
