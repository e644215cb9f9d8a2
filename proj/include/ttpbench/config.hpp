#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ttpbench {

/// Flat JSON run configuration. Unknown keys are rejected.
struct GridConfig {
    std::string bundle_path;
    std::string conllu_path;  // optional; required for TFIDF_NP and BM25
    std::vector<std::string> methods{"TFIDF"};
    std::vector<std::string> classifiers{"KNN"};
    std::vector<int> n_list{2};
    std::vector<std::string> oversample_modes{"none"};
    int K = 5;
    std::uint64_t seed = 0;
    int min_support = 30;
    int num_topics = 500;
    int smote_k = 6;
    double bm25_k1 = 1.5;
    double bm25_b = 0.75;
    std::string out_dir = "out";

    bool operator==(const GridConfig&) const = default;

    /// Throws Error naming the offending field.
    void validate() const;
};

/// Names are canonicalized (e.g. "tfidf-np" -> "TFIDF_NP") and validated.
GridConfig parse_grid_config(std::string_view json_text);
GridConfig load_grid_config(const std::string& path);
std::string serialize_grid_config(const GridConfig& config);

}  // namespace ttpbench
