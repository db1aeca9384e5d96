#pragma once

#include "diffest/types.hpp"

namespace diffest {

// Difficulty baselines computable from a classifier's softmax outputs.

/// 1 - max_j p_j, in [0, 1 - 1/C].
DifficultyVector classification_uncertainty(const ProbabilityMatrix& probs);

/// -sum_j p_j ln p_j with 0 ln 0 = 0 (natural log).
DifficultyVector entropy_score(const ProbabilityMatrix& probs);

/// Second-highest minus highest probability, in [-1, 0]; kept with this
/// sign so that higher (closer to zero) means harder.
DifficultyVector classification_margin(const ProbabilityMatrix& probs);

/// 1 - p at the true class.
DifficultyVector self_taught_score(const ProbabilityMatrix& probs);

}  // namespace diffest
