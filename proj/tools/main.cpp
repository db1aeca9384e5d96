// diffest: estimates how difficult cases are for humans to classify, from
// precomputed embeddings and class labels. See README.md for the file formats.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "diffest/baselines.hpp"
#include "diffest/dataset.hpp"
#include "diffest/geometry.hpp"
#include "diffest/regression.hpp"
#include "diffest/scp.hpp"
#include "diffest/stats.hpp"
#include "diffest/synth.hpp"
#include "diffest/truth.hpp"

namespace {

using nlohmann::json;

// Reorders `scores` to match the truth's case ids; both must cover the same set.
diffest::DifficultyVector align_to(const diffest::DifficultyVector& scores,
                                   const diffest::DifficultyVector& truth) {
    if (scores.size() != truth.size()) {
        throw diffest::Error("method '" + scores.method_name + "' has " +
                             std::to_string(scores.size()) + " cases, truth has " +
                             std::to_string(truth.size()));
    }
    std::unordered_map<std::string, double> by_id;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        by_id.emplace(scores.case_ids[i], scores.scores[i]);
    }
    diffest::DifficultyVector aligned{scores.method_name, truth.case_ids, {}};
    aligned.scores.reserve(truth.size());
    for (const std::string& id : truth.case_ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw diffest::Error("method '" + scores.method_name + "' is missing case '" + id +
                                 "'");
        }
        aligned.scores.push_back(it->second);
    }
    return aligned;
}

diffest::DifficultyVector pick_method(const std::vector<diffest::DifficultyVector>& methods,
                                      const std::string& wanted, const std::string& path) {
    if (methods.empty()) throw diffest::Error(path + ": no score rows");
    if (wanted.empty()) {
        if (methods.size() > 1) {
            std::string names;
            for (const auto& m : methods) names += (names.empty() ? "" : ", ") + m.method_name;
            throw diffest::Error(path + " carries several methods (" + names +
                                 "); pick one with --method");
        }
        return methods.front();
    }
    for (const auto& m : methods) {
        if (m.method_name == wanted) return m;
    }
    throw diffest::Error(path + ": no method named '" + wanted + "'");
}

diffest::CertaintyScale parse_scale(const std::vector<double>& values) {
    diffest::CertaintyScale scale;
    if (!values.empty()) {
        if (values.size() != diffest::kCertaintyLevels) {
            throw diffest::Error("--scale needs exactly " +
                                 std::to_string(diffest::kCertaintyLevels) + " values");
        }
        std::copy(values.begin(), values.end(), scale.values.begin());
    }
    scale.validate();
    return scale;
}

void emit_json(const json& doc, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << doc.dump(2) << '\n';
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw diffest::Error("cannot open '" + out_path + "' for writing");
        out << doc.dump(2) << '\n';
        if (!out) throw diffest::Error("failed writing '" + out_path + "'");
    }
}

json loao_to_json(const diffest::LoaoReport& report) {
    json doc;
    doc["use_certainty"] = report.use_certainty;
    doc["mean_tau"] = report.mean_tau;
    doc["raters"] = json::array();
    for (const auto& r : report.raters) {
        doc["raters"].push_back({{"rater_id", r.rater_id}, {"n_cases", r.n_cases}, {"tau", r.tau}});
    }
    doc["skipped"] = json::array();
    for (const auto& s : report.skipped) {
        doc["skipped"].push_back({{"rater_id", s.rater_id}, {"reason", s.reason}});
    }
    return doc;
}

json bootstrap_to_json(const diffest::BootstrapReport& report) {
    json doc;
    doc["methods"] = report.method_names;
    doc["observed_tau"] = report.observed_tau;
    doc["replicates"] = report.replicates;
    doc["alpha"] = report.alpha;
    doc["seed"] = report.seed;
    json pvals = json::array();
    json sig = json::array();
    const std::size_t m = report.method_names.size();
    for (std::size_t a = 0; a < m; ++a) {
        json prow = json::array();
        json srow = json::array();
        for (std::size_t b = 0; b < m; ++b) {
            prow.push_back(report.p_values(a, b));
            srow.push_back(report.is_significant(a, b));
        }
        pvals.push_back(prow);
        sig.push_back(srow);
    }
    doc["p_values"] = pvals;
    doc["significant"] = sig;
    doc["best_methods"] = report.best_methods;
    return doc;
}

void print_bootstrap_table(const diffest::BootstrapReport& report, std::ostream& out) {
    const std::size_t m = report.method_names.size();
    std::size_t width = 12;
    for (const auto& name : report.method_names) width = std::max(width, name.size() + 2);
    out << std::left << std::setw(static_cast<int>(width)) << "method"
        << std::setw(10) << "tau" << "p(row beats col)\n";
    for (std::size_t a = 0; a < m; ++a) {
        std::ostringstream tau;
        tau << std::fixed << std::setprecision(4) << report.observed_tau[a];
        out << std::left << std::setw(static_cast<int>(width)) << report.method_names[a]
            << std::setw(10) << tau.str();
        for (std::size_t b = 0; b < m; ++b) {
            std::ostringstream p;
            p << std::fixed << std::setprecision(4) << report.p_values(a, b);
            out << (b ? " " : "") << p.str() << (report.is_significant(a, b) ? "*" : " ");
        }
        out << '\n';
    }
    out << "best: ";
    for (std::size_t i = 0; i < report.best_methods.size(); ++i) {
        out << (i ? ", " : "") << report.best_methods[i];
    }
    out << "  (* = p < alpha)\n";
}

struct ScoreArgs {
    std::string method;
    std::string embeddings_path;
    std::string reference_path;
    std::string probabilities_path;
    std::string truth_path;
    std::string out_path;
    int trees = 500;
    int min_split = 10;
    int folds = 5;
    std::uint64_t seed = 0;
    int threads = 1;
};

diffest::DifficultyVector compute_embedding_score(const ScoreArgs& args) {
    if (args.embeddings_path.empty()) {
        throw diffest::Error("method '" + args.method + "' needs --embeddings");
    }
    const auto data = diffest::load_embeddings(args.embeddings_path);

    if (args.method == "scp" || args.method == "scp_norm") {
        auto scores = diffest::sample_classification_power(data, args.threads);
        if (args.method == "scp_norm") scores = diffest::normalize_per_class(scores, data.labels);
        return scores;
    }
    if (args.method == "xt_embed" || args.method == "xt_embed_label") {
        if (args.truth_path.empty()) {
            throw diffest::Error("method '" + args.method +
                                 "' needs --truth with training difficulties");
        }
        const auto truth_methods = diffest::load_scores(args.truth_path);
        const auto truth = pick_method(truth_methods, "", args.truth_path);
        diffest::ExtraTreesParams params;
        params.n_trees = args.trees;
        params.min_samples_split = args.min_split;
        return diffest::cross_val_predict(data, truth, args.method == "xt_embed_label",
                                          args.folds, params, args.seed, args.threads);
    }

    // Centroid methods: the reference set defines the cluster centers
    // (training split when available, otherwise the scored set itself).
    const auto reference = args.reference_path.empty()
                               ? data
                               : diffest::load_embeddings(args.reference_path);
    if (!args.reference_path.empty() && reference.class_names != data.class_names) {
        throw diffest::Error("--reference and --embeddings disagree on class names");
    }
    const auto centroids = diffest::compute_centroids(
        reference, args.reference_path.empty() ? args.embeddings_path : args.reference_path);
    if (args.method == "inv_sim") return diffest::inverse_similarity(data, centroids);
    auto scores = diffest::inverse_softmax_similarity(data, centroids);
    if (args.method == "inv_softmax_norm") {
        scores = diffest::normalize_per_class(scores, data.labels);
    }
    return scores;
}

diffest::DifficultyVector compute_probability_score(const ScoreArgs& args) {
    if (args.probabilities_path.empty()) {
        throw diffest::Error("method '" + args.method + "' needs --probabilities");
    }
    const auto probs = diffest::load_probabilities(args.probabilities_path);
    if (args.method == "uncertainty") return diffest::classification_uncertainty(probs);
    if (args.method == "entropy") return diffest::entropy_score(probs);
    if (args.method == "margin") return diffest::classification_margin(probs);
    return diffest::self_taught_score(probs);
}

int run_score(const ScoreArgs& args) {
    static const std::vector<std::string> embedding_methods = {
        "inv_sim", "inv_softmax", "inv_softmax_norm", "scp", "scp_norm",
        "xt_embed", "xt_embed_label"};
    static const std::vector<std::string> probability_methods = {
        "uncertainty", "entropy", "margin", "self_taught"};

    diffest::DifficultyVector scores;
    const bool is_embedding = std::find(embedding_methods.begin(), embedding_methods.end(),
                                        args.method) != embedding_methods.end();
    const bool is_probability = std::find(probability_methods.begin(), probability_methods.end(),
                                          args.method) != probability_methods.end();
    if (is_embedding) {
        scores = compute_embedding_score(args);
    } else if (is_probability) {
        scores = compute_probability_score(args);
    } else {
        std::string known;
        for (const auto& name : embedding_methods) known += name + " ";
        for (const auto& name : probability_methods) known += name + " ";
        throw diffest::Error("unknown method '" + args.method + "'; known: " + known);
    }
    diffest::write_scores(scores, args.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Human classification difficulty estimation from embeddings"};
    app.require_subcommand(1);

    // --- synth ---
    diffest::SynthConfig synth_config;
    std::string synth_embeddings, synth_annotations, synth_truth;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic benchmark dataset");
    synth->add_option("--classes", synth_config.n_classes, "Number of classes");
    synth->add_option("--per-class", synth_config.points_per_class, "Points per class");
    synth->add_option("--dim", synth_config.dimension, "Embedding dimension");
    synth->add_option("--concentration", synth_config.concentration,
                      "Cluster tightness (larger = tighter)");
    synth->add_option("--raters", synth_config.rater_count, "Number of simulated raters");
    synth->add_option("--acc-easy", synth_config.accuracy_easy,
                      "Rater accuracy at difficulty 0");
    synth->add_option("--acc-hard", synth_config.accuracy_hard,
                      "Rater accuracy at difficulty 1");
    synth->add_option("--seed", synth_config.seed, "Random seed");
    synth->add_option("--out-embeddings", synth_embeddings, "Embeddings CSV path")->required();
    synth->add_option("--out-annotations", synth_annotations, "Annotations CSV path")->required();
    synth->add_option("--out-truth", synth_truth, "Planted difficulty scores CSV path")
        ->required();

    // --- score ---
    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Compute one difficulty estimate");
    score->add_option("--method", score_args.method, "Method name (e.g. inv_softmax, scp_norm)")
        ->required();
    score->add_option("--embeddings", score_args.embeddings_path, "Embeddings CSV");
    score->add_option("--reference", score_args.reference_path,
                      "Embeddings CSV defining the cluster centers");
    score->add_option("--probabilities", score_args.probabilities_path,
                      "Softmax probabilities CSV");
    score->add_option("--truth", score_args.truth_path,
                      "Training difficulties (scores CSV) for xt_* methods");
    score->add_option("--trees", score_args.trees, "Number of trees");
    score->add_option("--min-split", score_args.min_split, "Minimum samples to split a node");
    score->add_option("--folds", score_args.folds, "Cross-validation folds");
    score->add_option("--seed", score_args.seed, "Random seed");
    score->add_option("--threads", score_args.threads, "Worker threads (0 = hardware)");
    score->add_option("--out", score_args.out_path, "Output scores CSV")->required();

    // --- truth ---
    std::string truth_annotations, truth_labels, truth_out, truth_loao;
    bool truth_certainty = false;
    bool truth_unknown_certainty = true;
    std::vector<double> truth_scale;
    auto* truth_cmd =
        app.add_subcommand("truth", "Aggregate annotator panels into ground-truth difficulty");
    truth_cmd->add_option("--annotations", truth_annotations, "Annotations CSV")->required();
    truth_cmd->add_option("--labels", truth_labels, "CSV with id,label columns")->required();
    truth_cmd->add_flag("--certainty,!--no-certainty", truth_certainty,
                        "Weight by self-evaluated certainty");
    truth_cmd->add_option("--scale", truth_scale,
                          "Five certainty values (very_low..high)")->delimiter(',');
    truth_cmd->add_flag("--unknown-certainty,!--no-unknown-certainty", truth_unknown_certainty,
                        "Count 'unknown' responses in the certainty mean");
    truth_cmd->add_option("--loao", truth_loao, "Write a leave-one-annotator-out JSON report");
    truth_cmd->add_option("--out", truth_out, "Output scores CSV")->required();

    // --- eval ---
    std::string eval_scores, eval_truth, eval_method, eval_out;
    auto* eval = app.add_subcommand("eval", "Kendall tau of one method against truth");
    eval->add_option("--scores", eval_scores, "Scores CSV")->required();
    eval->add_option("--truth", eval_truth, "Truth scores CSV")->required();
    eval->add_option("--method", eval_method, "Method to pick when the file has several");
    eval->add_option("--out", eval_out, "Write JSON here instead of stdout");

    // --- compare ---
    std::string compare_truth, compare_out;
    std::vector<std::string> compare_scores;
    std::size_t compare_replicates = 50000;
    double compare_alpha = 0.05;
    std::uint64_t compare_seed = 0;
    int compare_threads = 1;
    auto* compare = app.add_subcommand("compare", "Paired bootstrap test between methods");
    compare->add_option("--truth", compare_truth, "Truth scores CSV")->required();
    compare->add_option("--scores", compare_scores, "Score CSVs (methods to compare)")
        ->required()
        ->expected(-1);
    compare->add_option("--replicates", compare_replicates, "Bootstrap replicates");
    compare->add_option("--alpha", compare_alpha, "Significance level");
    compare->add_option("--seed", compare_seed, "Random seed");
    compare->add_option("--threads", compare_threads, "Worker threads (0 = hardware)");
    compare->add_option("--out", compare_out, "Write JSON here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            const auto data = diffest::synth_generate(synth_config);
            diffest::write_embeddings(data.embeddings, synth_embeddings);
            diffest::write_annotations(data.annotations, synth_annotations);
            diffest::write_scores(data.planted, synth_truth);
            return 0;
        }
        if (score->parsed()) return run_score(score_args);
        if (truth_cmd->parsed()) {
            const auto table = [&] {
                // Response validation needs the label alphabet, taken from
                // the labels file.
                const auto labels = diffest::load_labels(truth_labels);
                std::vector<std::string> class_names;
                for (const auto& [id, label] : labels) {
                    if (std::find(class_names.begin(), class_names.end(), label) ==
                        class_names.end()) {
                        class_names.push_back(label);
                    }
                }
                return std::pair(diffest::load_annotations(truth_annotations, class_names),
                                 labels);
            }();
            diffest::TruthOptions options;
            options.scale = parse_scale(truth_scale);
            options.use_certainty = truth_certainty;
            options.unknown_counts_in_certainty = truth_unknown_certainty;
            diffest::write_scores(diffest::aggregate_truth(table.first, table.second, options),
                                  truth_out);
            if (!truth_loao.empty()) {
                const auto report =
                    diffest::leave_one_annotator_out(table.first, table.second, options);
                emit_json(loao_to_json(report), truth_loao);
            }
            return 0;
        }
        if (eval->parsed()) {
            const auto truth = pick_method(diffest::load_scores(eval_truth), "", eval_truth);
            const auto method =
                pick_method(diffest::load_scores(eval_scores), eval_method, eval_scores);
            const auto aligned = align_to(method, truth);
            const auto tau = diffest::kendall_tau(aligned.scores, truth.scores);
            json doc;
            doc["method"] = aligned.method_name;
            doc["n"] = tau.n;
            doc["tau"] = tau.tau;
            doc["concordance"] = diffest::tau_to_concordance(tau.tau);
            emit_json(doc, eval_out);
            return 0;
        }
        if (compare->parsed()) {
            const auto truth = pick_method(diffest::load_scores(compare_truth), "", compare_truth);
            std::vector<diffest::DifficultyVector> methods;
            for (const auto& path : compare_scores) {
                for (const auto& method : diffest::load_scores(path)) {
                    methods.push_back(align_to(method, truth));
                }
            }
            const auto report = diffest::bootstrap_compare(
                truth, methods, compare_replicates, compare_alpha, compare_seed, compare_threads);
            print_bootstrap_table(report, std::cerr);
            emit_json(bootstrap_to_json(report), compare_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
