#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "diffest/types.hpp"

namespace helpers {

/// In-memory dataset from explicit vectors; labels index class names c0, c1, ...
inline diffest::EmbeddingDataset make_dataset(const std::vector<std::vector<double>>& vectors,
                                              const std::vector<int>& labels) {
    diffest::EmbeddingDataset data;
    const std::size_t dim = vectors.empty() ? 0 : vectors.front().size();
    data.embeddings = diffest::Matrix(vectors.size(), dim);
    int max_label = -1;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        data.case_ids.push_back("c" + std::to_string(i));
        data.labels.push_back(labels[i]);
        max_label = std::max(max_label, labels[i]);
        std::copy(vectors[i].begin(), vectors[i].end(), data.embeddings.row(i).begin());
    }
    for (int c = 0; c <= max_label; ++c) data.class_names.push_back("c" + std::to_string(c));
    return data;
}

/// Unique temp file that removes itself; write with operator().
class TempFile {
public:
    explicit TempFile(const std::string& name)
        : path_((std::filesystem::temp_directory_path() /
                 ("diffest_test_" + std::to_string(counter()++) + "_" + name))
                    .string()) {}
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    const std::string& path() const { return path_; }

    void write(const std::string& content) const {
        std::ofstream out(path_, std::ios::binary);
        out << content;
    }

    std::string read() const {
        std::ifstream in(path_, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

private:
    static int& counter() {
        static int value = 0;
        return value;
    }
    std::string path_;
};

}  // namespace helpers
