#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "ttpbench/tfidf.hpp"

namespace ttpbench {

struct Bm25Params {
    double k1 = 1.5;
    double b = 0.75;
};

/// Okapi BM25 over a small fixed collection (one bag of words per technique).
class Bm25Index {
public:
    Bm25Index(const std::vector<TokenList>& collection, Bm25Params params = {});

    /// ln((N - df + 0.5) / (df + 0.5) + 1); zero for unseen terms.
    double idf(const std::string& term) const;

    /// Score of `query` against every document of the collection. Repeated
    /// query terms contribute once per occurrence.
    std::vector<double> scores(const TokenList& query) const;

    std::size_t size() const { return doc_len_.size(); }

private:
    Bm25Params params_;
    std::vector<std::unordered_map<std::string, double>> term_freq_;
    std::vector<double> doc_len_;
    std::unordered_map<std::string, double> df_;
    double avg_len_ = 0.0;
};

/// rows = queries (document SVO bags), cols = technique bags.
Eigen::MatrixXd bm25_features(const std::vector<TokenList>& query_bags, const std::vector<TokenList>& technique_bags,
                              Bm25Params params = {});

}  // namespace ttpbench
