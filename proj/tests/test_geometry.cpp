#include <doctest.h>

#include <cmath>
#include <vector>

#include "diffest/geometry.hpp"
#include "diffest/rng.hpp"
#include "diffest/stats.hpp"
#include "helpers.hpp"

using diffest::Error;
using helpers::make_dataset;

namespace {

// Random orthogonal matrix via Gram-Schmidt on a Gaussian matrix.
diffest::Matrix random_orthogonal(std::size_t dim, std::uint64_t seed) {
    diffest::Rng rng(seed);
    diffest::Matrix q(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        auto row = q.row(i);
        for (double& x : row) x = rng.gaussian();
        for (std::size_t j = 0; j < i; ++j) {
            const auto prev = q.row(j);
            double dot = 0.0;
            for (std::size_t k = 0; k < dim; ++k) dot += row[k] * prev[k];
            for (std::size_t k = 0; k < dim; ++k) row[k] -= dot * prev[k];
        }
        double norm = 0.0;
        for (const double x : row) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : row) x /= norm;
    }
    return q;
}

diffest::EmbeddingDataset rotate(const diffest::EmbeddingDataset& data,
                                 const diffest::Matrix& q) {
    diffest::EmbeddingDataset out = data;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto src = data.embeddings.row(i);
        auto dst = out.embeddings.row(i);
        for (std::size_t r = 0; r < q.rows; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < q.cols; ++c) acc += q(r, c) * src[c];
            dst[r] = acc;
        }
    }
    return out;
}

diffest::EmbeddingDataset random_clusters(std::size_t n, std::size_t dim, int classes,
                                          std::uint64_t seed) {
    diffest::Rng rng(seed);
    std::vector<std::vector<double>> vectors;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % classes);
        std::vector<double> v(dim);
        double norm = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            v[j] = (j == static_cast<std::size_t>(c) ? 2.0 : 0.0) + rng.gaussian();
            norm += v[j] * v[j];
        }
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        vectors.push_back(std::move(v));
        labels.push_back(c);
    }
    return make_dataset(vectors, labels);
}

}  // namespace

TEST_CASE("compute_centroids takes per-class means") {
    SUBCASE("single member class") {
        const auto data = make_dataset({{0.6, 0.8}, {1, 0}, {0, 1}}, {0, 1, 1});
        const auto centroids = diffest::compute_centroids(data, "unit");
        CHECK(centroids.source == "unit");
        CHECK(centroids.class_counts == std::vector<std::size_t>{1, 2});
        CHECK(centroids.centroids(0, 0) == 0.6);
        CHECK(centroids.centroids(0, 1) == 0.8);
        CHECK(centroids.centroids(1, 0) == 0.5);
        CHECK(centroids.centroids(1, 1) == 0.5);
    }
    SUBCASE("antipodal members cancel to a degenerate centroid") {
        const auto data = make_dataset({{1, 0}, {-1, 0}, {0, 1}}, {0, 0, 1});
        CHECK_THROWS_WITH_AS(diffest::compute_centroids(data),
                             doctest::Contains("degenerate centroid"), Error);
    }
}

TEST_CASE("cosine_similarity basics") {
    const std::vector<double> ex = {1, 0};
    const std::vector<double> ey = {0, 1};
    const std::vector<double> mx = {-1, 0};
    CHECK(diffest::cosine_similarity(ex, ex) == 1.0);
    CHECK(diffest::cosine_similarity(ex, ey) == 0.0);
    CHECK(diffest::cosine_similarity(ex, mx) == -1.0);
    const std::vector<double> zero = {0, 0};
    CHECK_THROWS_WITH_AS(diffest::cosine_similarity(ex, zero), doctest::Contains("zero vector"),
                         Error);
    // Scaled copies never leave [-1, 1].
    const std::vector<double> long_x = {1e100, 0};
    CHECK(diffest::cosine_similarity(ex, long_x) == 1.0);
}

TEST_CASE("inverse_similarity is one minus the cosine to the own-class centroid") {
    const auto data = make_dataset({{1, 0}, {0, 1}, {0.6, 0.8}}, {0, 0, 1});
    diffest::CentroidSet centroids;
    centroids.centroids = diffest::Matrix(2, 2);
    centroids.centroids(0, 0) = 1;  // class 0 along x
    centroids.centroids(1, 0) = 1;  // class 1 also along x, for the hand value
    centroids.class_counts = {1, 1};
    const auto scores = diffest::inverse_similarity(data, centroids);
    CHECK(scores.method_name == "inv_sim");
    CHECK(scores.scores[0] == 0.0);                                  // collinear
    CHECK(scores.scores[1] == 1.0);                                  // orthogonal
    CHECK(scores.scores[2] == doctest::Approx(0.4).epsilon(1e-12));  // 1 - 0.6
}

TEST_CASE("inverse_similarity requires centroids for every label") {
    const auto data = make_dataset({{1, 0}, {0, 1}}, {0, 1});
    diffest::CentroidSet centroids;
    centroids.centroids = diffest::Matrix(1, 2);
    centroids.centroids(0, 0) = 1;
    centroids.class_counts = {1};
    CHECK_THROWS_WITH_AS(diffest::inverse_similarity(data, centroids),
                         doctest::Contains("no matching centroid"), Error);
}

TEST_CASE("inverse_softmax_similarity matches direct softmax evaluation") {
    SUBCASE("equidistant from all three centroids") {
        const auto data = make_dataset({{1, 0, 0}}, {0});
        auto fake = make_dataset({{0.6, 0.8, 0}, {0.6, -0.8, 0}, {0.6, 0, 0.8}}, {0, 1, 2});
        const auto centroids = diffest::compute_centroids(fake);
        const auto scores = diffest::inverse_softmax_similarity(data, centroids);
        CHECK(scores.scores[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("similarities (1, -1) and the symmetric complement") {
        const auto data = make_dataset({{1, 0}, {-1, 0}}, {0, 0});
        diffest::CentroidSet centroids;
        centroids.centroids = diffest::Matrix(2, 2);
        centroids.centroids(0, 0) = 1;
        centroids.centroids(1, 0) = -1;
        centroids.class_counts = {1, 1};
        const auto scores = diffest::inverse_softmax_similarity(data, centroids);
        const double expected = 1.0 - std::exp(1.0) / (std::exp(1.0) + std::exp(-1.0));
        CHECK(scores.scores[0] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(scores.scores[0] == doctest::Approx(0.11920292202211755).epsilon(1e-9));
        CHECK(scores.scores[1] == doctest::Approx(1.0 - expected).epsilon(1e-9));
    }
    SUBCASE("a single class is rejected") {
        const auto data = make_dataset({{1, 0}}, {0});
        const auto centroids = diffest::compute_centroids(data);
        CHECK_THROWS_WITH_AS(diffest::inverse_softmax_similarity(data, centroids),
                             doctest::Contains("two classes"), Error);
    }
}

TEST_CASE("inverse softmax decreases in the true-class similarity") {
    diffest::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> sims = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double base = diffest::inverse_softmax_from_similarities(sims, 1);
        sims[1] += rng.uniform(0.0, 0.5) + 1e-9;
        const double bumped = diffest::inverse_softmax_from_similarities(sims, 1);
        CHECK(bumped < base);
    }
}

TEST_CASE("normalize_per_class divides by the class mean") {
    SUBCASE("hand example") {
        const diffest::DifficultyVector scores{"m", {"a", "b"}, {0.2, 0.4}};
        const auto normalized = diffest::normalize_per_class(scores, {0, 0});
        CHECK(normalized.method_name == "m_norm");
        CHECK(normalized.scores[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(normalized.scores[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("constant scores map to 1") {
        const diffest::DifficultyVector scores{"m", {"a", "b", "c"}, {0.5, 0.5, 0.5}};
        const auto normalized = diffest::normalize_per_class(scores, {0, 1, 1});
        for (const double s : normalized.scores) CHECK(s == 1.0);
    }
    SUBCASE("all-zero class is degenerate") {
        const diffest::DifficultyVector scores{"m", {"a", "b"}, {0.0, 0.0}};
        CHECK_THROWS_WITH_AS(diffest::normalize_per_class(scores, {0, 0}),
                             doctest::Contains("degenerate mean"), Error);
    }
}

TEST_CASE("per-class means equal one after normalization") {
    diffest::Rng rng(3);
    diffest::DifficultyVector scores{"m", {}, {}};
    std::vector<int> labels;
    for (int i = 0; i < 97; ++i) {
        scores.case_ids.push_back("c" + std::to_string(i));
        scores.scores.push_back(rng.uniform(0.05, 2.0));
        labels.push_back(static_cast<int>(rng.below(3)));
    }
    const auto normalized = diffest::normalize_per_class(scores, labels);
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == c) {
                sum += normalized.scores[i];
                ++count;
            }
        }
        CHECK(std::abs(sum / static_cast<double>(count) - 1.0) <= 1e-12);
    }
}

TEST_CASE("normalization preserves the within-class ranking") {
    diffest::Rng rng(29);
    diffest::DifficultyVector scores{"m", {}, {}};
    std::vector<int> labels;
    for (int i = 0; i < 60; ++i) {
        scores.case_ids.push_back("c" + std::to_string(i));
        scores.scores.push_back(rng.uniform(0.01, 1.0));
        labels.push_back(static_cast<int>(rng.below(2)));
    }
    const auto normalized = diffest::normalize_per_class(scores, labels);
    for (int c = 0; c < 2; ++c) {
        std::vector<double> before, after;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == c) {
                before.push_back(scores.scores[i]);
                after.push_back(normalized.scores[i]);
            }
        }
        CHECK(diffest::kendall_tau(before, after).tau == 1.0);
    }
}

TEST_CASE("scores are invariant under a global rotation") {
    const auto data = random_clusters(40, 8, 2, 17);
    const auto q = random_orthogonal(8, 99);
    const auto rotated = rotate(data, q);

    const auto centroids = diffest::compute_centroids(data);
    const auto centroids_rot = diffest::compute_centroids(rotated);
    const auto a = diffest::inverse_softmax_similarity(data, centroids);
    const auto b = diffest::inverse_softmax_similarity(rotated, centroids_rot);
    const auto ia = diffest::inverse_similarity(data, centroids);
    const auto ib = diffest::inverse_similarity(rotated, centroids_rot);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a.scores[i] - b.scores[i]) <= 1e-9);
        CHECK(std::abs(ia.scores[i] - ib.scores[i]) <= 1e-9);
    }
}

TEST_CASE("scaling a single embedding changes no score") {
    auto data = random_clusters(25, 6, 2, 5);
    const auto centroids = diffest::compute_centroids(data);
    const auto before = diffest::inverse_softmax_similarity(data, centroids);

    auto scaled = data;
    for (double& x : scaled.embeddings.row(7)) x *= 37.5;
    // Centroids kept from the unscaled reference; only the scored sample moves.
    const auto after = diffest::inverse_softmax_similarity(scaled, centroids);
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(std::abs(before.scores[i] - after.scores[i]) <= 1e-12);
    }
}
