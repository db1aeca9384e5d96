#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace diffest {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
};

/// Embedding vectors with class labels. Rows are unit length after ingestion;
/// class_names maps dense label indices back to the label strings of the file,
/// in first-appearance order. Immutable by convention once loaded.
struct EmbeddingDataset {
    std::vector<std::string> case_ids;
    std::vector<int> labels;  // values in [0, C)
    Matrix embeddings;        // N x D
    std::vector<std::string> class_names;

    std::size_t size() const { return case_ids.size(); }
    std::size_t dim() const { return embeddings.cols; }
    std::size_t num_classes() const { return class_names.size(); }
};

/// Self-evaluated certainty levels, ordered from least to most certain.
enum class Certainty { very_low = 0, low = 1, medium = 2, moderate = 3, high = 4 };

inline constexpr int kCertaintyLevels = 5;

/// Reserved annotation response meaning "rater could not decide";
/// always counts as an incorrect classification.
inline const std::string kUnknownResponse = "unknown";

struct AnnotationRecord {
    std::string case_id;
    std::string rater_id;
    std::string response;  // a class name or kUnknownResponse
    std::optional<Certainty> certainty;
};

struct AnnotationTable {
    std::vector<AnnotationRecord> records;
};

/// Per-case difficulty scores from one method, the output currency shared by
/// every estimator and by the ground-truth aggregation.
struct DifficultyVector {
    std::string method_name;
    std::vector<std::string> case_ids;
    std::vector<double> scores;

    std::size_t size() const { return case_ids.size(); }
};

/// Per-case classifier softmax outputs. Each row sums to 1 within 1e-6 and
/// labels[i] is the integer index of case i's true class (column order).
struct ProbabilityMatrix {
    std::vector<std::string> case_ids;
    std::vector<int> labels;
    Matrix probs;  // N x C

    std::size_t size() const { return case_ids.size(); }
    std::size_t num_classes() const { return probs.cols; }
};

const char* certainty_to_string(Certainty level);
Certainty certainty_from_string(const std::string& token);

}  // namespace diffest
