#include "ttpbench/tfidf.hpp"

#include <cmath>
#include <map>

#include "ttpbench/error.hpp"

namespace ttpbench {

std::optional<std::size_t> Vocabulary::index_of(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double Vocabulary::idf(std::size_t term_index) const {
    return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df[term_index]))) + 1.0;
}

void Vocabulary::build_index() {
    index_.clear();
    for (std::size_t i = 0; i < terms.size(); ++i) index_.emplace(terms[i], i);
}

Vocabulary tfidf_fit(const std::vector<TokenList>& docs) {
    std::map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
        std::map<std::string, bool> seen;
        for (const auto& t : doc)
            if (seen.emplace(t, true).second) ++df[t];
    }
    if (df.empty()) throw Error("tfidf_fit: all documents are empty");
    Vocabulary vocab;
    vocab.n_docs = docs.size();
    for (auto& [term, count] : df) {
        vocab.terms.push_back(term);
        vocab.df.push_back(count);
    }
    vocab.build_index();
    return vocab;
}

SparseMatrix tfidf_transform(const Vocabulary& vocab, const std::vector<TokenList>& docs) {
    SparseMatrix out(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(vocab.size()));
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t r = 0; r < docs.size(); ++r) {
        std::map<std::size_t, double> counts;
        for (const auto& t : docs[r])
            if (auto idx = vocab.index_of(t)) counts[*idx] += 1.0;
        double norm2 = 0.0;
        for (auto& [idx, w] : counts) {
            w *= vocab.idf(idx);
            norm2 += w * w;
        }
        if (norm2 == 0.0) continue;
        const double inv = 1.0 / std::sqrt(norm2);
        for (const auto& [idx, w] : counts)
            trips.emplace_back(static_cast<int>(r), static_cast<int>(idx), w * inv);
    }
    out.setFromTriplets(trips.begin(), trips.end());
    out.makeCompressed();
    return out;
}

}  // namespace ttpbench
