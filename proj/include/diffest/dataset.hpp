#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "diffest/types.hpp"

namespace diffest {

// CSV ingestion and emission for the interchange formats shared by all
// modules. Files are UTF-8, comma separated, '.' decimal separator, first
// row is the header. Fields are never quoted. Doubles are written with
// shortest round-trip precision, so write/load round-trips are exact and
// outputs are byte-stable.

/// `id,label,e0,...,e{D-1}`. Labels are strings, mapped to dense indices in
/// first-appearance order. Rows whose norm deviates from 1 by more than 1e-6
/// are re-normalized; zero-norm rows are an error.
EmbeddingDataset load_embeddings(const std::string& path);
void write_embeddings(const EmbeddingDataset& data, const std::string& path);

/// `case_id,rater_id,response,certainty`; the certainty field may be empty.
/// Responses must be members of class_names or the reserved "unknown".
AnnotationTable load_annotations(const std::string& path,
                                 const std::vector<std::string>& class_names);
void write_annotations(const AnnotationTable& table, const std::string& path);

/// `id,label,p0,...,p{C-1}`. The label column is an integer class index in
/// [0, C), matching the probability column order. Rows with |sum-1| <= 1e-3
/// are renormalized to sum exactly 1; a larger deviation is an error.
ProbabilityMatrix load_probabilities(const std::string& path);

/// Any CSV whose first two header columns are `id,label` (extra columns are
/// ignored), e.g. an embeddings file doubles as a label source.
std::unordered_map<std::string, std::string> load_labels(const std::string& path);

/// `id,method,score`. A file may carry several methods; vectors come back
/// grouped by method in first-appearance order.
std::vector<DifficultyVector> load_scores(const std::string& path);
void write_scores(const std::vector<DifficultyVector>& methods, const std::string& path);
void write_scores(const DifficultyVector& scores, const std::string& path);

}  // namespace diffest
