#include "ttpbench/bm25.hpp"

#include <cmath>

namespace ttpbench {

Bm25Index::Bm25Index(const std::vector<TokenList>& collection, Bm25Params params) : params_(params) {
    double total = 0.0;
    for (const auto& doc : collection) {
        std::unordered_map<std::string, double> tf;
        for (const auto& t : doc) tf[t] += 1.0;
        for (const auto& [term, count] : tf) df_[term] += 1.0;
        term_freq_.push_back(std::move(tf));
        doc_len_.push_back(static_cast<double>(doc.size()));
        total += static_cast<double>(doc.size());
    }
    avg_len_ = collection.empty() ? 0.0 : total / static_cast<double>(collection.size());
}

double Bm25Index::idf(const std::string& term) const {
    auto it = df_.find(term);
    if (it == df_.end()) return 0.0;
    const double n = static_cast<double>(doc_len_.size());
    return std::log((n - it->second + 0.5) / (it->second + 0.5) + 1.0);
}

std::vector<double> Bm25Index::scores(const TokenList& query) const {
    std::vector<double> out(doc_len_.size(), 0.0);
    for (const auto& q : query) {
        const double w = idf(q);
        if (w == 0.0) continue;
        for (std::size_t j = 0; j < doc_len_.size(); ++j) {
            auto it = term_freq_[j].find(q);
            if (it == term_freq_[j].end()) continue;
            const double f = it->second;
            const double rel_len = avg_len_ > 0.0 ? doc_len_[j] / avg_len_ : 1.0;
            out[j] += w * f * (params_.k1 + 1.0) / (f + params_.k1 * (1.0 - params_.b + params_.b * rel_len));
        }
    }
    return out;
}

Eigen::MatrixXd bm25_features(const std::vector<TokenList>& query_bags, const std::vector<TokenList>& technique_bags,
                              Bm25Params params) {
    const Bm25Index index(technique_bags, params);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(query_bags.size()), static_cast<Eigen::Index>(technique_bags.size()));
    for (std::size_t i = 0; i < query_bags.size(); ++i) {
        const auto s = index.scores(query_bags[i]);
        for (std::size_t j = 0; j < s.size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s[j];
    }
    return out;
}

}  // namespace ttpbench
