#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "diffest/types.hpp"

namespace diffest {

/// Tie-corrected Kendall rank correlation with its pair-count breakdown.
/// concordant + discordant + tied_x_only + tied_y_only + tied_both = n(n-1)/2.
struct TauResult {
    double tau = 0.0;
    std::size_t n = 0;
    std::uint64_t concordant = 0;
    std::uint64_t discordant = 0;
    std::uint64_t tied_x_only = 0;
    std::uint64_t tied_y_only = 0;
    std::uint64_t tied_both = 0;
};

/// Kendall's tau-b in O(n log n) via merge-sort pair counting:
///   tau = (C - D) / sqrt((C + D + Tx) (C + D + Ty))
/// where Tx/Ty count pairs tied only in x/only in y and pairs tied in both
/// are excluded from all four counts. Throws when one vector is entirely
/// tied (tau undefined).
TauResult kendall_tau(std::span<const double> x, std::span<const double> y);

/// Fraction of pairs ordered concordantly by two rankings: (tau + 1) / 2.
double tau_to_concordance(double tau);

struct BootstrapReport {
    std::vector<std::string> method_names;
    std::vector<double> observed_tau;  // vs truth, on the full sample
    std::size_t replicates = 0;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    // p_values(a, b) = fraction of replicates where tau_a <= tau_b, the
    // one-sided p-value against "a is better than b". Diagonal is 1.
    Matrix p_values;
    std::vector<std::uint8_t> significant;  // row-major flags, p < alpha
    std::vector<std::string> best_methods;  // not significantly beaten by any other

    bool is_significant(std::size_t a, std::size_t b) const {
        return significant[a * method_names.size() + b] != 0;
    }
};

/// Paired bootstrap over case resamples: every replicate resamples case
/// indices with replacement once and evaluates every method's tau against
/// truth on that same resample. Replicates whose truth resample is entirely
/// tied are redrawn (at most 10 attempts each). Deterministic for a given
/// seed regardless of the worker count.
BootstrapReport bootstrap_compare(const DifficultyVector& truth,
                                  const std::vector<DifficultyVector>& methods,
                                  std::size_t replicates = 50000, double alpha = 0.05,
                                  std::uint64_t seed = 0, int threads = 1);

}  // namespace diffest
