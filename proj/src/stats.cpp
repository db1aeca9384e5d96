#include "diffest/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "diffest/parallel.hpp"
#include "diffest/rng.hpp"

namespace diffest {

namespace {

// Sorts `values` ascending while counting strict inversions (pairs appearing
// in decreasing order). Bottom-up merge sort; equal elements are not counted.
std::uint64_t sort_counting_inversions(std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<double> buffer(n);
    std::uint64_t inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t left = lo, right = mid, out = lo;
            while (left < mid && right < hi) {
                if (values[right] < values[left]) {
                    inversions += mid - left;
                    buffer[out++] = values[right++];
                } else {
                    buffer[out++] = values[left++];
                }
            }
            while (left < mid) buffer[out++] = values[left++];
            while (right < hi) buffer[out++] = values[right++];
            std::copy(buffer.begin() + lo, buffer.begin() + hi, values.begin() + lo);
        }
    }
    return inversions;
}

std::uint64_t tied_pairs(const std::vector<double>& sorted) {
    std::uint64_t pairs = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const std::uint64_t g = j - i;
        pairs += g * (g - 1) / 2;
        i = j;
    }
    return pairs;
}

bool all_tied(std::span<const double> values) {
    for (const double v : values) {
        if (v != values[0]) return false;
    }
    return true;
}

}  // namespace

TauResult kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error("kendall_tau: length mismatch (" + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()) + ")");
    }
    const std::size_t n = x.size();
    if (n < 2) throw Error("kendall_tau: need at least two observations");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw Error("kendall_tau: non-finite value at index " + std::to_string(i));
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // Pairs tied in x, and tied in both, from the (x, y)-sorted walk.
    std::uint64_t tied_x = 0, tied_both = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && x[order[j]] == x[order[i]]) ++j;
        const std::uint64_t gx = j - i;
        tied_x += gx * (gx - 1) / 2;
        std::size_t k = i;
        while (k < j) {
            std::size_t m = k;
            while (m < j && y[order[m]] == y[order[k]]) ++m;
            const std::uint64_t gxy = m - k;
            tied_both += gxy * (gxy - 1) / 2;
            k = m;
        }
        i = j;
    }

    // Within x-groups y is ascending, so merge-sort inversions count exactly
    // the discordant pairs.
    std::vector<double> y_in_x_order(n);
    for (std::size_t k = 0; k < n; ++k) y_in_x_order[k] = y[order[k]];
    const std::uint64_t discordant = sort_counting_inversions(y_in_x_order);
    const std::uint64_t tied_y = tied_pairs(y_in_x_order);  // now sorted by y

    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t concordant = total - tied_x - tied_y + tied_both - discordant;

    const std::uint64_t denom_x = total - tied_x;
    const std::uint64_t denom_y = total - tied_y;
    if (denom_x == 0 || denom_y == 0) {
        throw Error("kendall_tau: undefined, one vector is entirely tied");
    }

    TauResult result;
    result.n = n;
    result.concordant = concordant;
    result.discordant = discordant;
    result.tied_x_only = tied_x - tied_both;
    result.tied_y_only = tied_y - tied_both;
    result.tied_both = tied_both;
    const double tau = (static_cast<double>(concordant) - static_cast<double>(discordant)) /
                       std::sqrt(static_cast<double>(denom_x) * static_cast<double>(denom_y));
    result.tau = std::clamp(tau, -1.0, 1.0);
    return result;
}

double tau_to_concordance(double tau) {
    if (!(tau >= -1.0 && tau <= 1.0)) {
        throw Error("tau_to_concordance: tau " + std::to_string(tau) + " outside [-1, 1]");
    }
    return (tau + 1.0) / 2.0;
}

BootstrapReport bootstrap_compare(const DifficultyVector& truth,
                                  const std::vector<DifficultyVector>& methods,
                                  std::size_t replicates, double alpha, std::uint64_t seed,
                                  int threads) {
    if (methods.empty()) throw Error("bootstrap_compare: no methods given");
    if (replicates < 1) throw Error("bootstrap_compare: need at least one replicate");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("bootstrap_compare: alpha outside (0, 1)");
    const std::size_t n = truth.size();
    if (n < 2) throw Error("bootstrap_compare: need at least two cases");
    for (const auto& method : methods) {
        if (method.case_ids != truth.case_ids) {
            throw Error("bootstrap_compare: method '" + method.method_name +
                        "' is not aligned with the truth case ids");
        }
    }

    const std::size_t num_methods = methods.size();
    BootstrapReport report;
    report.replicates = replicates;
    report.alpha = alpha;
    report.seed = seed;
    for (const auto& method : methods) {
        report.method_names.push_back(method.method_name);
        report.observed_tau.push_back(kendall_tau(method.scores, truth.scores).tau);
    }

    // One row of method taus per replicate, filled from that replicate's own
    // seeded substream; this keeps the report independent of scheduling.
    std::vector<double> taus(replicates * num_methods);
    parallel_for(0, replicates, threads, [&](std::size_t r) {
        Rng rng(mix_seed(seed, r));
        std::vector<std::size_t> idx(n);
        std::vector<double> resampled_truth(n);
        bool drawn = false;
        for (int attempt = 0; attempt < 10 && !drawn; ++attempt) {
            for (std::size_t i = 0; i < n; ++i) idx[i] = rng.below(n);
            for (std::size_t i = 0; i < n; ++i) resampled_truth[i] = truth.scores[idx[i]];
            drawn = !all_tied(resampled_truth);
        }
        if (!drawn) {
            throw Error("bootstrap_compare: replicate " + std::to_string(r) +
                        " kept drawing all-tied truth resamples (10 attempts)");
        }
        std::vector<double> resampled(n);
        for (std::size_t m = 0; m < num_methods; ++m) {
            for (std::size_t i = 0; i < n; ++i) resampled[i] = methods[m].scores[idx[i]];
            try {
                taus[r * num_methods + m] = kendall_tau(resampled, resampled_truth).tau;
            } catch (const Error& e) {
                throw Error("bootstrap_compare: replicate " + std::to_string(r) +
                            ", method '" + methods[m].method_name + "': " + e.what());
            }
        }
    });

    report.p_values = Matrix(num_methods, num_methods, 0.0);
    for (std::size_t a = 0; a < num_methods; ++a) {
        for (std::size_t b = 0; b < num_methods; ++b) {
            std::uint64_t not_better = 0;
            for (std::size_t r = 0; r < replicates; ++r) {
                if (taus[r * num_methods + a] <= taus[r * num_methods + b]) ++not_better;
            }
            report.p_values(a, b) =
                static_cast<double>(not_better) / static_cast<double>(replicates);
        }
    }

    report.significant.assign(num_methods * num_methods, 0);
    for (std::size_t a = 0; a < num_methods; ++a) {
        for (std::size_t b = 0; b < num_methods; ++b) {
            if (a != b && report.p_values(a, b) < alpha) {
                report.significant[a * num_methods + b] = 1;
            }
        }
    }
    for (std::size_t m = 0; m < num_methods; ++m) {
        bool beaten = false;
        for (std::size_t other = 0; other < num_methods && !beaten; ++other) {
            beaten = other != m && report.is_significant(other, m);
        }
        if (!beaten) report.best_methods.push_back(report.method_names[m]);
    }
    return report;
}

}  // namespace diffest
