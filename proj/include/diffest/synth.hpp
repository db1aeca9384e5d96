#pragma once

#include <cstdint>

#include "diffest/types.hpp"

namespace diffest {

/// Synthetic benchmark generator: class clusters on the unit sphere, a
/// planted per-point difficulty, and a simulated annotator panel whose
/// accuracy decreases (and self-evaluated certainty tracks correctness)
/// with that difficulty. Stands in for clinical datasets in tests.
struct SynthConfig {
    int n_classes = 3;
    int points_per_class = 200;
    int dimension = 16;
    double concentration = 3.0;  // larger = tighter clusters
    int rater_count = 8;
    // Probability of a correct response, linear in planted difficulty:
    // accuracy_easy at difficulty 0 down to accuracy_hard at difficulty 1.
    double accuracy_easy = 0.95;
    double accuracy_hard = 0.2;
    std::uint64_t seed = 0;
};

struct SynthData {
    EmbeddingDataset embeddings;
    AnnotationTable annotations;
    DifficultyVector planted;  // method "planted"
};

/// Fully deterministic for a given config. Class directions are uniform on
/// the sphere; each point is the normalized sum of its class direction and
/// Gaussian noise scaled by 1/concentration; planted difficulty is the
/// point's angular distance to its own class direction relative to the
/// nearest other class direction.
SynthData synth_generate(const SynthConfig& config);

}  // namespace diffest
