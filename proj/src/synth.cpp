#include "diffest/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diffest/rng.hpp"

namespace diffest {

namespace {

// Rater behavior constants; certainty is drawn from a latent confidence that
// is higher for correct answers and lower for hard cases.
constexpr double kUnknownProb = 0.15;
constexpr double kConfidenceCorrect = 0.9;
constexpr double kConfidenceIncorrect = 0.35;
constexpr double kConfidenceSlope = 0.5;
constexpr double kConfidenceNoise = 0.15;

// Steepness and midpoint of the monotone map from the angular-distance ratio
// to planted difficulty. The raw ratio concentrates in a narrow band in
// higher dimensions; this spreads it over (0, 1) so the rater accuracy curve
// actually varies across cases. Rank order is unchanged.
constexpr double kDifficultyGain = 12.0;
constexpr double kDifficultyMidpoint = 0.4;

void validate(const SynthConfig& config) {
    if (config.n_classes < 1) throw Error("synth: n_classes must be positive");
    if (config.points_per_class < 1) throw Error("synth: points_per_class must be positive");
    if (config.dimension < 1) throw Error("synth: dimension must be positive");
    if (!(config.concentration > 0.0)) throw Error("synth: concentration must be positive");
    if (config.rater_count < 1) throw Error("synth: rater_count must be positive");
    const bool curve_ok = config.accuracy_easy >= 0.0 && config.accuracy_easy <= 1.0 &&
                          config.accuracy_hard >= 0.0 && config.accuracy_hard <= 1.0 &&
                          config.accuracy_easy > config.accuracy_hard;
    if (!curve_ok) {
        throw Error("synth: accuracy curve must map [0,1] into [0,1] and decrease");
    }
}

std::vector<double> unit_vector(Rng& rng, int dim) {
    std::vector<double> v(dim);
    double norm = 0.0;
    do {
        double sumsq = 0.0;
        for (double& x : v) {
            x = rng.gaussian();
            sumsq += x * x;
        }
        norm = std::sqrt(sumsq);
    } while (norm < 1e-12);
    for (double& x : v) x /= norm;
    return v;
}

double angle_to(std::span<const double> unit_a, std::span<const double> unit_b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < unit_a.size(); ++i) dot += unit_a[i] * unit_b[i];
    return std::acos(std::clamp(dot, -1.0, 1.0));
}

std::string padded(const char* prefix, std::size_t index, std::size_t width) {
    std::string digits = std::to_string(index);
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return prefix + digits;
}

}  // namespace

SynthData synth_generate(const SynthConfig& config) {
    validate(config);
    const auto num_classes = static_cast<std::size_t>(config.n_classes);
    const std::size_t n = num_classes * static_cast<std::size_t>(config.points_per_class);
    const std::size_t id_width = std::max<std::size_t>(5, std::to_string(n - 1).size());
    const std::size_t rater_width =
        std::max<std::size_t>(2, std::to_string(config.rater_count - 1).size());

    Rng dir_rng(mix_seed(config.seed, 0));
    std::vector<std::vector<double>> directions;
    directions.reserve(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) {
        directions.push_back(unit_vector(dir_rng, config.dimension));
    }

    SynthData out;
    out.embeddings.class_names.reserve(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) {
        out.embeddings.class_names.push_back(padded("class", c, 1));
    }
    out.embeddings.embeddings = Matrix(n, config.dimension, 0.0);
    out.planted.method_name = "planted";

    Rng point_rng(mix_seed(config.seed, 1));
    std::size_t index = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        for (int p = 0; p < config.points_per_class; ++p, ++index) {
            auto row = out.embeddings.embeddings.row(index);
            double norm = 0.0;
            while (norm < 1e-12) {
                double sumsq = 0.0;
                for (std::size_t j = 0; j < row.size(); ++j) {
                    row[j] = directions[c][j] + point_rng.gaussian() / config.concentration;
                    sumsq += row[j] * row[j];
                }
                norm = std::sqrt(sumsq);
            }
            for (double& x : row) x /= norm;

            const double own_angle = angle_to(row, directions[c]);
            double other_angle = std::numeric_limits<double>::infinity();
            for (std::size_t other = 0; other < num_classes; ++other) {
                if (other != c) other_angle = std::min(other_angle, angle_to(row, directions[other]));
            }
            double ratio = 0.0;
            if (num_classes > 1 && own_angle + other_angle > 0.0) {
                ratio = own_angle / (own_angle + other_angle);
            }
            const double difficulty =
                1.0 / (1.0 + std::exp(-kDifficultyGain * (ratio - kDifficultyMidpoint)));

            out.embeddings.case_ids.push_back(padded("case", index, id_width));
            out.embeddings.labels.push_back(static_cast<int>(c));
            out.planted.case_ids.push_back(out.embeddings.case_ids.back());
            out.planted.scores.push_back(difficulty);
        }
    }

    Rng rater_rng(mix_seed(config.seed, 2));
    for (int r = 0; r < config.rater_count; ++r) {
        const std::string rater_id = padded("rater", static_cast<std::size_t>(r), rater_width);
        for (std::size_t i = 0; i < n; ++i) {
            const double difficulty = out.planted.scores[i];
            const double p_correct =
                config.accuracy_easy + (config.accuracy_hard - config.accuracy_easy) * difficulty;
            const bool correct = rater_rng.uniform() < p_correct;

            AnnotationRecord record;
            record.case_id = out.embeddings.case_ids[i];
            record.rater_id = rater_id;
            if (correct) {
                record.response = out.embeddings.class_names[out.embeddings.labels[i]];
            } else if (num_classes == 1 || rater_rng.uniform() < kUnknownProb) {
                record.response = kUnknownResponse;
            } else {
                auto wrong = static_cast<std::size_t>(rater_rng.below(num_classes - 1));
                if (wrong >= static_cast<std::size_t>(out.embeddings.labels[i])) ++wrong;
                record.response = out.embeddings.class_names[wrong];
            }

            const double base = correct ? kConfidenceCorrect : kConfidenceIncorrect;
            double latent = base - kConfidenceSlope * difficulty +
                            kConfidenceNoise * rater_rng.gaussian();
            latent = std::clamp(latent, 0.0, 1.0 - 1e-9);
            record.certainty = static_cast<Certainty>(static_cast<int>(latent * kCertaintyLevels));
            out.annotations.records.push_back(std::move(record));
        }
    }
    return out;
}

}  // namespace diffest
