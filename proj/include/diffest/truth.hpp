#pragma once

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "diffest/types.hpp"

namespace diffest {

/// Maps the five certainty levels to [0, 1]. Must be strictly increasing
/// with endpoints 0 and 1; the default is equally spaced.
struct CertaintyScale {
    std::array<double, kCertaintyLevels> values{0.0, 0.25, 0.5, 0.75, 1.0};

    double value(Certainty level) const { return values[static_cast<int>(level)]; }
    void validate() const;
};

struct CaseTruth {
    std::string case_id;
    std::size_t n_raters = 0;
    double mu_correct = 0.0;                 // fraction of correct responses
    std::optional<double> mu_certainty;      // mean mapped certainty, all raters
    double difficulty = 0.0;                 // 1 - mu_correct [* mu_certainty]
};

struct TruthOptions {
    CertaintyScale scale{};
    bool use_certainty = false;
    // Whether "unknown" responses contribute their stated certainty to
    // mu_certainty. They are wrong answers given with confidence.
    bool unknown_counts_in_certainty = true;
};

/// Per-case aggregation over the annotator panel: mu_correct is the fraction
/// of responses matching the true label ("unknown" counts as incorrect);
/// with certainty enabled, difficulty = 1 - mu_correct * mu_certainty, else
/// 1 - mu_correct. Cases come back sorted by case_id, and the result is
/// invariant to record order.
std::vector<CaseTruth> aggregate_cases(
    const AnnotationTable& table,
    const std::unordered_map<std::string, std::string>& true_labels,
    const TruthOptions& options = {});

/// aggregate_cases flattened into a DifficultyVector with method "truth".
DifficultyVector aggregate_truth(
    const AnnotationTable& table,
    const std::unordered_map<std::string, std::string>& true_labels,
    const TruthOptions& options = {});

struct RaterTau {
    std::string rater_id;
    std::size_t n_cases = 0;
    double tau = 0.0;
};

struct SkippedRater {
    std::string rater_id;
    std::string reason;
};

struct LoaoReport {
    bool use_certainty = false;
    std::vector<RaterTau> raters;
    std::vector<SkippedRater> skipped;
    double mean_tau = 0.0;  // unweighted over non-skipped raters
};

/// Leave-one-annotator-out: each rater's per-case difficulty (binary
/// incorrectness, or certainty-weighted when enabled) is rank-correlated
/// against the difficulty aggregated from all remaining raters on the cases
/// they share. Raters with fewer than two overlapping cases, or an undefined
/// tau, are skipped and recorded.
LoaoReport leave_one_annotator_out(
    const AnnotationTable& table,
    const std::unordered_map<std::string, std::string>& true_labels,
    const TruthOptions& options = {});

}  // namespace diffest
