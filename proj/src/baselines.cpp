#include "diffest/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace diffest {

namespace {

DifficultyVector map_rows(const ProbabilityMatrix& probs, const char* method,
                          double (*fn)(std::span<const double>, int)) {
    DifficultyVector result{method, probs.case_ids, {}};
    result.scores.reserve(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        result.scores.push_back(fn(probs.probs.row(i), probs.labels[i]));
    }
    return result;
}

}  // namespace

DifficultyVector classification_uncertainty(const ProbabilityMatrix& probs) {
    return map_rows(probs, "uncertainty", [](std::span<const double> row, int) {
        return 1.0 - *std::max_element(row.begin(), row.end());
    });
}

DifficultyVector entropy_score(const ProbabilityMatrix& probs) {
    return map_rows(probs, "entropy", [](std::span<const double> row, int) {
        double h = 0.0;
        for (const double p : row) {
            if (p > 0.0) h -= p * std::log(p);
        }
        return h;
    });
}

DifficultyVector classification_margin(const ProbabilityMatrix& probs) {
    if (probs.num_classes() < 2) {
        throw Error("classification_margin: need at least two classes");
    }
    return map_rows(probs, "margin", [](std::span<const double> row, int) {
        double best = -1.0, second = -1.0;
        for (const double p : row) {
            if (p > best) {
                second = best;
                best = p;
            } else if (p > second) {
                second = p;
            }
        }
        return second - best;
    });
}

DifficultyVector self_taught_score(const ProbabilityMatrix& probs) {
    return map_rows(probs, "self_taught", [](std::span<const double> row, int label) {
        if (label < 0 || static_cast<std::size_t>(label) >= row.size()) {
            throw Error("self_taught_score: label index out of range");
        }
        return 1.0 - row[label];
    });
}

}  // namespace diffest
