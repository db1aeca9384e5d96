#include "diffest/truth.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "diffest/stats.hpp"

namespace diffest {

namespace {

const std::string& true_label_for(
    const std::unordered_map<std::string, std::string>& true_labels,
    const std::string& case_id) {
    const auto it = true_labels.find(case_id);
    if (it == true_labels.end()) throw Error("no true label for case '" + case_id + "'");
    return it->second;
}

double rater_certainty(const AnnotationRecord& record, const CertaintyScale& scale) {
    if (!record.certainty) {
        throw Error("record (case '" + record.case_id + "', rater '" + record.rater_id +
                    "') has no certainty level but certainty weighting is enabled");
    }
    return scale.value(*record.certainty);
}

}  // namespace

void CertaintyScale::validate() const {
    if (values.front() != 0.0 || values.back() != 1.0) {
        throw Error("certainty scale endpoints must be 0 and 1");
    }
    for (int i = 1; i < kCertaintyLevels; ++i) {
        if (!(values[i] > values[i - 1])) {
            throw Error("certainty scale must be strictly increasing");
        }
    }
}

std::vector<CaseTruth> aggregate_cases(
    const AnnotationTable& table,
    const std::unordered_map<std::string, std::string>& true_labels,
    const TruthOptions& options) {
    options.scale.validate();
    if (table.records.empty()) throw Error("aggregate_cases: no annotations");

    // Sorted containers make the output independent of record order.
    std::map<std::string, std::map<std::string, const AnnotationRecord*>> by_case;
    for (const auto& record : table.records) {
        by_case[record.case_id][record.rater_id] = &record;
    }

    std::vector<CaseTruth> result;
    result.reserve(by_case.size());
    for (const auto& [case_id, raters] : by_case) {
        const std::string& truth = true_label_for(true_labels, case_id);
        CaseTruth entry;
        entry.case_id = case_id;
        entry.n_raters = raters.size();
        std::size_t correct = 0;
        double certainty_sum = 0.0;
        std::size_t certainty_count = 0;
        for (const auto& [rater_id, record] : raters) {
            if (record->response == truth) ++correct;
            if (options.use_certainty) {
                const double value = rater_certainty(*record, options.scale);
                if (options.unknown_counts_in_certainty ||
                    record->response != kUnknownResponse) {
                    certainty_sum += value;
                    ++certainty_count;
                }
            }
        }
        entry.mu_correct = static_cast<double>(correct) / static_cast<double>(entry.n_raters);
        if (options.use_certainty && certainty_count > 0) {
            entry.mu_certainty = certainty_sum / static_cast<double>(certainty_count);
            entry.difficulty = 1.0 - entry.mu_correct * *entry.mu_certainty;
        } else {
            entry.difficulty = 1.0 - entry.mu_correct;
        }
        result.push_back(std::move(entry));
    }
    return result;
}

DifficultyVector aggregate_truth(
    const AnnotationTable& table,
    const std::unordered_map<std::string, std::string>& true_labels,
    const TruthOptions& options) {
    const auto cases = aggregate_cases(table, true_labels, options);
    DifficultyVector result{"truth", {}, {}};
    result.case_ids.reserve(cases.size());
    result.scores.reserve(cases.size());
    for (const auto& entry : cases) {
        result.case_ids.push_back(entry.case_id);
        result.scores.push_back(entry.difficulty);
    }
    return result;
}

LoaoReport leave_one_annotator_out(
    const AnnotationTable& table,
    const std::unordered_map<std::string, std::string>& true_labels,
    const TruthOptions& options) {
    options.scale.validate();

    std::set<std::string> rater_ids;
    for (const auto& record : table.records) rater_ids.insert(record.rater_id);
    if (rater_ids.size() < 2) {
        throw Error("leave_one_annotator_out: need at least two raters");
    }

    LoaoReport report;
    report.use_certainty = options.use_certainty;
    double tau_sum = 0.0;

    for (const std::string& rater : rater_ids) {
        std::map<std::string, const AnnotationRecord*> own;
        AnnotationTable others;
        for (const auto& record : table.records) {
            if (record.rater_id == rater) {
                own[record.case_id] = &record;
            } else {
                others.records.push_back(record);
            }
        }
        // Panel difficulty from everyone else, restricted to this rater's cases.
        AnnotationTable overlap_table;
        for (const auto& record : others.records) {
            if (own.count(record.case_id)) overlap_table.records.push_back(record);
        }
        if (overlap_table.records.empty()) {
            report.skipped.push_back({rater, "fewer than two overlapping cases"});
            continue;
        }
        const auto panel = aggregate_cases(overlap_table, true_labels, options);
        if (panel.size() < 2) {
            report.skipped.push_back({rater, "fewer than two overlapping cases"});
            continue;
        }

        std::vector<double> own_scores, panel_scores;
        own_scores.reserve(panel.size());
        panel_scores.reserve(panel.size());
        for (const auto& entry : panel) {
            const AnnotationRecord& record = *own.at(entry.case_id);
            const double correct =
                record.response == true_label_for(true_labels, entry.case_id) ? 1.0 : 0.0;
            double score = 1.0 - correct;
            if (options.use_certainty) {
                score = 1.0 - correct * rater_certainty(record, options.scale);
            }
            own_scores.push_back(score);
            panel_scores.push_back(entry.difficulty);
        }

        try {
            const TauResult tau = kendall_tau(own_scores, panel_scores);
            report.raters.push_back({rater, panel.size(), tau.tau});
            tau_sum += tau.tau;
        } catch (const Error&) {
            report.skipped.push_back({rater, "undefined tau (all-tied scores)"});
        }
    }

    if (report.raters.empty()) {
        throw Error("leave_one_annotator_out: no rater produced a defined correlation");
    }
    report.mean_tau = tau_sum / static_cast<double>(report.raters.size());
    return report;
}

}  // namespace diffest
