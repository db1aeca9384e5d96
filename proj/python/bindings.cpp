#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "diffest/baselines.hpp"
#include "diffest/dataset.hpp"
#include "diffest/geometry.hpp"
#include "diffest/regression.hpp"
#include "diffest/scp.hpp"
#include "diffest/stats.hpp"
#include "diffest/synth.hpp"
#include "diffest/truth.hpp"

namespace py = pybind11;
using namespace diffest;

namespace {

Matrix matrix_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw Error("expected a 2-d array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.data.begin());
    return m;
}

std::vector<double> vector_from_array(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw Error("expected a 1-d array");
    return {a.data(), a.data() + a.size()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Human classification difficulty estimation from embeddings";

    py::register_exception<Error>(m, "DiffestError", PyExc_ValueError);

    py::class_<Matrix>(m, "Matrix", py::buffer_protocol())
        .def(py::init<>())
        .def(py::init([](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
                 return matrix_from_array(a);
             }),
             py::arg("array"))
        .def_readonly("rows", &Matrix::rows)
        .def_readonly("cols", &Matrix::cols)
        .def_buffer([](Matrix& self) {
            return py::buffer_info(self.data.data(), sizeof(double),
                                   py::format_descriptor<double>::format(), 2,
                                   {self.rows, self.cols},
                                   {sizeof(double) * self.cols, sizeof(double)});
        });

    py::enum_<Certainty>(m, "Certainty")
        .value("very_low", Certainty::very_low)
        .value("low", Certainty::low)
        .value("medium", Certainty::medium)
        .value("moderate", Certainty::moderate)
        .value("high", Certainty::high);

    py::class_<EmbeddingDataset>(m, "EmbeddingDataset")
        .def(py::init<>())
        .def(py::init([](std::vector<std::string> ids, std::vector<int> labels,
                         const py::array_t<double, py::array::c_style | py::array::forcecast>&
                             embeddings,
                         std::vector<std::string> class_names) {
                 EmbeddingDataset data;
                 data.case_ids = std::move(ids);
                 data.labels = std::move(labels);
                 data.embeddings = matrix_from_array(embeddings);
                 data.class_names = std::move(class_names);
                 return data;
             }),
             py::arg("case_ids"), py::arg("labels"), py::arg("embeddings"),
             py::arg("class_names"))
        .def_readwrite("case_ids", &EmbeddingDataset::case_ids)
        .def_readwrite("labels", &EmbeddingDataset::labels)
        .def_readwrite("embeddings", &EmbeddingDataset::embeddings)
        .def_readwrite("class_names", &EmbeddingDataset::class_names)
        .def("__len__", &EmbeddingDataset::size);

    py::class_<AnnotationRecord>(m, "AnnotationRecord")
        .def(py::init<>())
        .def_readwrite("case_id", &AnnotationRecord::case_id)
        .def_readwrite("rater_id", &AnnotationRecord::rater_id)
        .def_readwrite("response", &AnnotationRecord::response)
        .def_readwrite("certainty", &AnnotationRecord::certainty);

    py::class_<AnnotationTable>(m, "AnnotationTable")
        .def(py::init<>())
        .def_readwrite("records", &AnnotationTable::records)
        .def("__len__", [](const AnnotationTable& t) { return t.records.size(); });

    py::class_<DifficultyVector>(m, "DifficultyVector")
        .def(py::init<>())
        .def(py::init([](std::string method, std::vector<std::string> ids,
                         std::vector<double> scores) {
                 return DifficultyVector{std::move(method), std::move(ids), std::move(scores)};
             }),
             py::arg("method_name"), py::arg("case_ids"), py::arg("scores"))
        .def_readwrite("method_name", &DifficultyVector::method_name)
        .def_readwrite("case_ids", &DifficultyVector::case_ids)
        .def_readwrite("scores", &DifficultyVector::scores)
        .def("__len__", &DifficultyVector::size);

    py::class_<ProbabilityMatrix>(m, "ProbabilityMatrix")
        .def(py::init<>())
        .def_readwrite("case_ids", &ProbabilityMatrix::case_ids)
        .def_readwrite("labels", &ProbabilityMatrix::labels)
        .def_readwrite("probs", &ProbabilityMatrix::probs)
        .def("__len__", &ProbabilityMatrix::size);

    py::class_<CentroidSet>(m, "CentroidSet")
        .def_readwrite("centroids", &CentroidSet::centroids)
        .def_readwrite("source", &CentroidSet::source)
        .def_readwrite("class_counts", &CentroidSet::class_counts);

    py::class_<NeighborRanking>(m, "NeighborRanking")
        .def_readonly("anchor", &NeighborRanking::anchor)
        .def_readonly("ordered_neighbors", &NeighborRanking::ordered_neighbors)
        .def_readonly("similarities", &NeighborRanking::similarities);

    py::class_<ClassWeights>(m, "ClassWeights")
        .def(py::init<>())
        .def(py::init([](std::vector<double> weights) {
                 ClassWeights w;
                 w.weights = std::move(weights);
                 return w;
             }),
             py::arg("weights"))
        .def_readwrite("weights", &ClassWeights::weights);

    py::class_<ExtraTreesParams>(m, "ExtraTreesParams")
        .def(py::init<>())
        .def_readwrite("n_trees", &ExtraTreesParams::n_trees)
        .def_readwrite("min_samples_split", &ExtraTreesParams::min_samples_split)
        .def_readwrite("min_samples_leaf", &ExtraTreesParams::min_samples_leaf);

    py::class_<TreeEnsembleModel>(m, "TreeEnsembleModel")
        .def_readonly("params", &TreeEnsembleModel::params)
        .def_readonly("seed", &TreeEnsembleModel::seed)
        .def_readonly("feature_count", &TreeEnsembleModel::feature_count)
        .def("__len__", [](const TreeEnsembleModel& m_) { return m_.trees.size(); });

    py::class_<CertaintyScale>(m, "CertaintyScale")
        .def(py::init<>())
        .def_readwrite("values", &CertaintyScale::values)
        .def("validate", &CertaintyScale::validate);

    py::class_<TruthOptions>(m, "TruthOptions")
        .def(py::init<>())
        .def_readwrite("scale", &TruthOptions::scale)
        .def_readwrite("use_certainty", &TruthOptions::use_certainty)
        .def_readwrite("unknown_counts_in_certainty", &TruthOptions::unknown_counts_in_certainty);

    py::class_<CaseTruth>(m, "CaseTruth")
        .def_readonly("case_id", &CaseTruth::case_id)
        .def_readonly("n_raters", &CaseTruth::n_raters)
        .def_readonly("mu_correct", &CaseTruth::mu_correct)
        .def_readonly("mu_certainty", &CaseTruth::mu_certainty)
        .def_readonly("difficulty", &CaseTruth::difficulty);

    py::class_<RaterTau>(m, "RaterTau")
        .def_readonly("rater_id", &RaterTau::rater_id)
        .def_readonly("n_cases", &RaterTau::n_cases)
        .def_readonly("tau", &RaterTau::tau);

    py::class_<SkippedRater>(m, "SkippedRater")
        .def_readonly("rater_id", &SkippedRater::rater_id)
        .def_readonly("reason", &SkippedRater::reason);

    py::class_<LoaoReport>(m, "LoaoReport")
        .def_readonly("use_certainty", &LoaoReport::use_certainty)
        .def_readonly("raters", &LoaoReport::raters)
        .def_readonly("skipped", &LoaoReport::skipped)
        .def_readonly("mean_tau", &LoaoReport::mean_tau);

    py::class_<TauResult>(m, "TauResult")
        .def_readonly("tau", &TauResult::tau)
        .def_readonly("n", &TauResult::n)
        .def_readonly("concordant", &TauResult::concordant)
        .def_readonly("discordant", &TauResult::discordant)
        .def_readonly("tied_x_only", &TauResult::tied_x_only)
        .def_readonly("tied_y_only", &TauResult::tied_y_only)
        .def_readonly("tied_both", &TauResult::tied_both);

    py::class_<BootstrapReport>(m, "BootstrapReport")
        .def_readonly("method_names", &BootstrapReport::method_names)
        .def_readonly("observed_tau", &BootstrapReport::observed_tau)
        .def_readonly("replicates", &BootstrapReport::replicates)
        .def_readonly("alpha", &BootstrapReport::alpha)
        .def_readonly("seed", &BootstrapReport::seed)
        .def_readonly("p_values", &BootstrapReport::p_values)
        .def_readonly("best_methods", &BootstrapReport::best_methods)
        .def("is_significant", &BootstrapReport::is_significant, py::arg("a"), py::arg("b"));

    py::class_<SynthConfig>(m, "SynthConfig")
        .def(py::init<>())
        .def_readwrite("n_classes", &SynthConfig::n_classes)
        .def_readwrite("points_per_class", &SynthConfig::points_per_class)
        .def_readwrite("dimension", &SynthConfig::dimension)
        .def_readwrite("concentration", &SynthConfig::concentration)
        .def_readwrite("rater_count", &SynthConfig::rater_count)
        .def_readwrite("accuracy_easy", &SynthConfig::accuracy_easy)
        .def_readwrite("accuracy_hard", &SynthConfig::accuracy_hard)
        .def_readwrite("seed", &SynthConfig::seed);

    py::class_<SynthData>(m, "SynthData")
        .def_readonly("embeddings", &SynthData::embeddings)
        .def_readonly("annotations", &SynthData::annotations)
        .def_readonly("planted", &SynthData::planted);

    // io
    m.def("load_embeddings", &load_embeddings, py::arg("path"));
    m.def("write_embeddings", &write_embeddings, py::arg("data"), py::arg("path"));
    m.def("load_annotations", &load_annotations, py::arg("path"), py::arg("class_names"));
    m.def("write_annotations", &write_annotations, py::arg("table"), py::arg("path"));
    m.def("load_probabilities", &load_probabilities, py::arg("path"));
    m.def("load_labels", &load_labels, py::arg("path"));
    m.def("load_scores", &load_scores, py::arg("path"));
    m.def("write_scores",
          py::overload_cast<const DifficultyVector&, const std::string&>(&write_scores),
          py::arg("scores"), py::arg("path"));

    // geometry
    m.def("compute_centroids", &compute_centroids, py::arg("reference"), py::arg("source") = "");
    m.def(
        "cosine_similarity",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& b) {
            const auto va = vector_from_array(a);
            const auto vb = vector_from_array(b);
            return cosine_similarity(va, vb);
        },
        py::arg("a"), py::arg("b"));
    m.def("inverse_similarity", &inverse_similarity, py::arg("data"), py::arg("centroids"));
    m.def("inverse_softmax_similarity", &inverse_softmax_similarity, py::arg("data"),
          py::arg("centroids"));
    m.def("normalize_per_class", &normalize_per_class, py::arg("scores"), py::arg("labels"));

    // scp
    m.def("class_weights", &class_weights, py::arg("data"));
    m.def("rank_neighbors", &rank_neighbors, py::arg("data"), py::arg("anchor"));
    m.def("weighted_roc_auc", &weighted_roc_auc, py::arg("ranking"), py::arg("labels"),
          py::arg("anchor_class"), py::arg("weights"));
    m.def("sample_classification_power", &sample_classification_power, py::arg("data"),
          py::arg("threads") = 1);

    // regression
    m.def("build_features", &build_features, py::arg("data"), py::arg("use_label"));
    m.def(
        "fit_extra_trees",
        [](const Matrix& features, const std::vector<double>& targets,
           const ExtraTreesParams& params, std::uint64_t seed, int threads) {
            return fit_extra_trees(features, targets, params, seed, threads);
        },
        py::arg("features"), py::arg("targets"), py::arg("params") = ExtraTreesParams{},
        py::arg("seed") = 0, py::arg("threads") = 1);
    m.def("predict", &predict, py::arg("model"), py::arg("rows"), py::arg("threads") = 1);
    m.def("cross_val_predict", &cross_val_predict, py::arg("data"), py::arg("truth"),
          py::arg("use_label"), py::arg("folds") = 5, py::arg("params") = ExtraTreesParams{},
          py::arg("seed") = 0, py::arg("threads") = 1);

    // truth
    m.def("aggregate_cases", &aggregate_cases, py::arg("table"), py::arg("true_labels"),
          py::arg("options") = TruthOptions{});
    m.def("aggregate_truth", &aggregate_truth, py::arg("table"), py::arg("true_labels"),
          py::arg("options") = TruthOptions{});
    m.def("leave_one_annotator_out", &leave_one_annotator_out, py::arg("table"),
          py::arg("true_labels"), py::arg("options") = TruthOptions{});

    // stats
    m.def(
        "kendall_tau",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            return kendall_tau(x, y);
        },
        py::arg("x"), py::arg("y"));
    m.def("tau_to_concordance", &tau_to_concordance, py::arg("tau"));
    m.def("bootstrap_compare", &bootstrap_compare, py::arg("truth"), py::arg("methods"),
          py::arg("replicates") = 50000, py::arg("alpha") = 0.05, py::arg("seed") = 0,
          py::arg("threads") = 1);

    // baselines
    m.def("classification_uncertainty", &classification_uncertainty, py::arg("probs"));
    m.def("entropy_score", &entropy_score, py::arg("probs"));
    m.def("classification_margin", &classification_margin, py::arg("probs"));
    m.def("self_taught_score", &self_taught_score, py::arg("probs"));

    // synth
    m.def("synth_generate", &synth_generate, py::arg("config"));
}
