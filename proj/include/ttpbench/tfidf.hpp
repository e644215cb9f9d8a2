#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ttpbench/feature_matrix.hpp"

namespace ttpbench {

using TokenList = std::vector<std::string>;

/// Terms sorted lexicographically with their document frequencies.
class Vocabulary {
public:
    std::vector<std::string> terms;
    std::vector<std::size_t> df;
    std::size_t n_docs = 0;

    std::optional<std::size_t> index_of(const std::string& term) const;
    std::size_t size() const { return terms.size(); }

    /// Smoothed idf: ln((1 + n_docs) / (1 + df)) + 1.
    double idf(std::size_t term_index) const;

    void build_index();

private:
    std::unordered_map<std::string, std::size_t> index_;
};

/// Throws when every document is empty.
Vocabulary tfidf_fit(const std::vector<TokenList>& docs);

/// Raw counts times idf, each nonzero row scaled to unit L2 norm. Terms not in
/// the vocabulary are ignored; empty rows stay zero.
SparseMatrix tfidf_transform(const Vocabulary& vocab, const std::vector<TokenList>& docs);

}  // namespace ttpbench
