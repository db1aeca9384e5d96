#include "diffest/dataset.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace diffest {

namespace {

const std::array<const char*, kCertaintyLevels> kCertaintyNames = {
    "very_low", "low", "medium", "moderate", "high"};

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& message) {
    throw Error(path + ":" + std::to_string(line) + ": " + message);
}

std::vector<std::string> split_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_double(const std::string& field, const std::string& path, std::size_t line,
                    const char* what) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        fail(path, line, std::string("non-numeric ") + what + " '" + field + "'");
    }
    if (!std::isfinite(value)) {
        fail(path, line, std::string("non-finite ") + what + " '" + field + "'");
    }
    return value;
}

int parse_int(const std::string& field, const std::string& path, std::size_t line,
              const char* what) {
    int value = 0;
    const char* first = field.data();
    const char* last = first + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        fail(path, line, std::string("invalid ") + what + " '" + field + "'");
    }
    return value;
}

std::string format_double(double value) {
    std::array<char, 32> buffer;
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), ptr);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    return out;
}

std::vector<std::string> read_header(std::ifstream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw Error(path + ": empty file, expected a header row");
    return split_line(std::move(line));
}

// Header must start with `id,label` and continue `<prefix>0,<prefix>1,...`.
void check_vector_header(const std::vector<std::string>& header, char prefix,
                         const std::string& path) {
    bool ok = header.size() >= 3 && header[0] == "id" && header[1] == "label";
    for (std::size_t j = 2; ok && j < header.size(); ++j) {
        ok = header[j] == std::string(1, prefix) + std::to_string(j - 2);
    }
    if (!ok) {
        fail(path, 1,
             std::string("bad header, expected id,label,") + prefix + "0,...," + prefix +
                 "{n-1}");
    }
}

}  // namespace

const char* certainty_to_string(Certainty level) {
    return kCertaintyNames[static_cast<int>(level)];
}

Certainty certainty_from_string(const std::string& token) {
    for (int i = 0; i < kCertaintyLevels; ++i) {
        if (token == kCertaintyNames[i]) return static_cast<Certainty>(i);
    }
    throw Error("unknown certainty level '" + token + "'");
}

EmbeddingDataset load_embeddings(const std::string& path) {
    auto in = open_input(path);
    const auto header = read_header(in, path);
    check_vector_header(header, 'e', path);
    const std::size_t dim = header.size() - 2;

    EmbeddingDataset data;
    std::unordered_set<std::string> seen_ids;
    std::unordered_map<std::string, int> label_index;
    std::vector<double> coords;

    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_line(std::move(line));
        if (fields.size() != header.size()) {
            fail(path, line_no,
                 "expected " + std::to_string(header.size()) + " fields, got " +
                     std::to_string(fields.size()));
        }
        const std::string& id = fields[0];
        if (id.empty()) fail(path, line_no, "empty id");
        if (!seen_ids.insert(id).second) fail(path, line_no, "duplicate id '" + id + "'");
        const std::string& label = fields[1];
        if (label.empty()) fail(path, line_no, "empty label");
        if (label == kUnknownResponse) {
            fail(path, line_no, "label 'unknown' is reserved for annotation responses");
        }

        coords.clear();
        double sumsq = 0.0;
        for (std::size_t j = 2; j < fields.size(); ++j) {
            const double v = parse_double(fields[j], path, line_no, "coordinate");
            coords.push_back(v);
            sumsq += v * v;
        }
        const double norm = std::sqrt(sumsq);
        if (norm == 0.0) fail(path, line_no, "zero-norm embedding for id '" + id + "'");
        if (std::abs(norm - 1.0) > 1e-6) {
            for (double& v : coords) v /= norm;
        }

        auto [it, inserted] =
            label_index.emplace(label, static_cast<int>(data.class_names.size()));
        if (inserted) data.class_names.push_back(label);
        data.case_ids.push_back(id);
        data.labels.push_back(it->second);
        data.embeddings.data.insert(data.embeddings.data.end(), coords.begin(), coords.end());
    }
    data.embeddings.rows = data.case_ids.size();
    data.embeddings.cols = dim;
    return data;
}

void write_embeddings(const EmbeddingDataset& data, const std::string& path) {
    auto out = open_output(path);
    out << "id,label";
    for (std::size_t j = 0; j < data.dim(); ++j) out << ",e" << j;
    out << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << data.case_ids[i] << ',' << data.class_names[data.labels[i]];
        for (const double v : data.embeddings.row(i)) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) throw Error("failed writing '" + path + "'");
}

AnnotationTable load_annotations(const std::string& path,
                                 const std::vector<std::string>& class_names) {
    auto in = open_input(path);
    const auto header = read_header(in, path);
    const std::vector<std::string> expected = {"case_id", "rater_id", "response", "certainty"};
    if (header != expected) fail(path, 1, "bad header, expected case_id,rater_id,response,certainty");

    const std::unordered_set<std::string> valid(class_names.begin(), class_names.end());
    AnnotationTable table;
    std::set<std::pair<std::string, std::string>> seen;

    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_line(std::move(line));
        if (fields.size() != 4) {
            fail(path, line_no, "expected 4 fields, got " + std::to_string(fields.size()));
        }
        AnnotationRecord record;
        record.case_id = fields[0];
        record.rater_id = fields[1];
        record.response = fields[2];
        if (record.case_id.empty()) fail(path, line_no, "empty case_id");
        if (record.rater_id.empty()) fail(path, line_no, "empty rater_id");
        if (record.response != kUnknownResponse && valid.count(record.response) == 0) {
            fail(path, line_no, "unknown response class '" + record.response + "'");
        }
        if (!fields[3].empty()) {
            try {
                record.certainty = certainty_from_string(fields[3]);
            } catch (const Error& e) {
                fail(path, line_no, e.what());
            }
        }
        if (!seen.emplace(record.case_id, record.rater_id).second) {
            fail(path, line_no,
                 "duplicate (case, rater) pair ('" + record.case_id + "', '" +
                     record.rater_id + "')");
        }
        table.records.push_back(std::move(record));
    }
    return table;
}

void write_annotations(const AnnotationTable& table, const std::string& path) {
    auto out = open_output(path);
    out << "case_id,rater_id,response,certainty\n";
    for (const auto& record : table.records) {
        out << record.case_id << ',' << record.rater_id << ',' << record.response << ',';
        if (record.certainty) out << certainty_to_string(*record.certainty);
        out << '\n';
    }
    if (!out) throw Error("failed writing '" + path + "'");
}

ProbabilityMatrix load_probabilities(const std::string& path) {
    auto in = open_input(path);
    const auto header = read_header(in, path);
    check_vector_header(header, 'p', path);
    const std::size_t num_classes = header.size() - 2;

    ProbabilityMatrix matrix;
    std::unordered_set<std::string> seen_ids;
    std::vector<double> row;

    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_line(std::move(line));
        if (fields.size() != header.size()) {
            fail(path, line_no,
                 "expected " + std::to_string(header.size()) + " fields, got " +
                     std::to_string(fields.size()));
        }
        const std::string& id = fields[0];
        if (id.empty()) fail(path, line_no, "empty id");
        if (!seen_ids.insert(id).second) fail(path, line_no, "duplicate id '" + id + "'");
        const int label = parse_int(fields[1], path, line_no, "label index");
        if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
            fail(path, line_no, "label index " + std::to_string(label) + " outside [0, " +
                                    std::to_string(num_classes) + ")");
        }

        row.clear();
        double sum = 0.0;
        for (std::size_t j = 2; j < fields.size(); ++j) {
            const double p = parse_double(fields[j], path, line_no, "probability");
            if (p < 0.0) fail(path, line_no, "negative probability " + fields[j]);
            row.push_back(p);
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-3) {
            fail(path, line_no, "row sum " + format_double(sum) + " out of tolerance");
        }
        if (sum != 1.0) {
            for (double& p : row) p /= sum;
        }

        matrix.case_ids.push_back(id);
        matrix.labels.push_back(label);
        matrix.probs.data.insert(matrix.probs.data.end(), row.begin(), row.end());
    }
    matrix.probs.rows = matrix.case_ids.size();
    matrix.probs.cols = num_classes;
    return matrix;
}

std::unordered_map<std::string, std::string> load_labels(const std::string& path) {
    auto in = open_input(path);
    const auto header = read_header(in, path);
    if (header.size() < 2 || header[0] != "id" || header[1] != "label") {
        fail(path, 1, "bad header, expected the first two columns to be id,label");
    }

    std::unordered_map<std::string, std::string> labels;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_line(std::move(line));
        if (fields.size() != header.size()) {
            fail(path, line_no,
                 "expected " + std::to_string(header.size()) + " fields, got " +
                     std::to_string(fields.size()));
        }
        if (fields[0].empty()) fail(path, line_no, "empty id");
        if (fields[1].empty()) fail(path, line_no, "empty label");
        if (!labels.emplace(fields[0], fields[1]).second) {
            fail(path, line_no, "duplicate id '" + fields[0] + "'");
        }
    }
    return labels;
}

std::vector<DifficultyVector> load_scores(const std::string& path) {
    auto in = open_input(path);
    const auto header = read_header(in, path);
    const std::vector<std::string> expected = {"id", "method", "score"};
    if (header != expected) fail(path, 1, "bad header, expected id,method,score");

    std::vector<DifficultyVector> methods;
    std::unordered_map<std::string, std::size_t> method_index;
    std::unordered_set<std::string> seen;  // method + '\x1f' + id

    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_line(std::move(line));
        if (fields.size() != 3) {
            fail(path, line_no, "expected 3 fields, got " + std::to_string(fields.size()));
        }
        if (fields[0].empty()) fail(path, line_no, "empty id");
        if (fields[1].empty()) fail(path, line_no, "empty method name");
        const double score = parse_double(fields[2], path, line_no, "score");
        if (!seen.insert(fields[1] + '\x1f' + fields[0]).second) {
            fail(path, line_no,
                 "duplicate id '" + fields[0] + "' for method '" + fields[1] + "'");
        }
        auto [it, inserted] = method_index.emplace(fields[1], methods.size());
        if (inserted) {
            methods.push_back(DifficultyVector{fields[1], {}, {}});
        }
        auto& vec = methods[it->second];
        vec.case_ids.push_back(fields[0]);
        vec.scores.push_back(score);
    }
    return methods;
}

void write_scores(const std::vector<DifficultyVector>& methods, const std::string& path) {
    auto out = open_output(path);
    out << "id,method,score\n";
    for (const auto& vec : methods) {
        if (vec.case_ids.size() != vec.scores.size()) {
            throw Error("difficulty vector '" + vec.method_name + "' has mismatched lengths");
        }
        for (std::size_t i = 0; i < vec.size(); ++i) {
            if (!std::isfinite(vec.scores[i])) {
                throw Error("non-finite score for id '" + vec.case_ids[i] + "' in method '" +
                            vec.method_name + "'");
            }
            out << vec.case_ids[i] << ',' << vec.method_name << ','
                << format_double(vec.scores[i]) << '\n';
        }
    }
    if (!out) throw Error("failed writing '" + path + "'");
}

void write_scores(const DifficultyVector& scores, const std::string& path) {
    write_scores(std::vector<DifficultyVector>{scores}, path);
}

}  // namespace diffest
