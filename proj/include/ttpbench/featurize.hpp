#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ttpbench/annotations.hpp"
#include "ttpbench/attack_ingest.hpp"
#include "ttpbench/bm25.hpp"
#include "ttpbench/feature_matrix.hpp"
#include "ttpbench/lsi.hpp"
#include "ttpbench/tfidf.hpp"

namespace ttpbench {

/// Per-document inputs of all five methods, computed once per corpus slice.
struct PreparedCorpus {
    std::vector<std::string> doc_ids;
    std::vector<int> labels;
    std::vector<std::string> label_set;

    std::vector<TokenList> tokens;
    std::vector<TokenList> technique_tokens;  // label_set order

    bool annotated = false;
    std::vector<std::vector<std::vector<NounPhrase>>> phrases;  // doc -> sentence -> phrases
    std::vector<TokenList> svo_bags;
    std::vector<TokenList> technique_svo_bags;

    std::size_t size() const { return tokens.size(); }
};

/// Preprocess texts of `corpus` and the descriptions of its label_set
/// techniques. With `annotations` set, every document and technique must
/// have CoNLL-U sentences (technique docs are keyed by technique id).
PreparedCorpus prepare_corpus(const LabeledCorpus& corpus, const std::vector<TechniqueInfo>& techniques,
                              const AnnotationIndex* annotations);

/// All contiguous sub-spans of a document's phrases whose key is in
/// `vocabulary_keys`, one entry per occurrence.
TokenList phrase_terms(const std::vector<std::vector<NounPhrase>>& doc_phrases,
                       const std::set<std::string>& vocabulary_keys);

struct FeatureParams {
    Eigen::Index num_topics = 500;
    Bm25Params bm25;
    std::uint64_t seed = 0;
};

/// Fit a method's vocabulary/model on a subset of rows and transform any rows.
class Featurizer {
public:
    Featurizer(Method method, const PreparedCorpus& corpus, FeatureParams params = {});

    void fit(const std::vector<std::size_t>& rows);
    FeatureMatrix transform(const std::vector<std::size_t>& rows) const;

    Method method() const { return method_; }
    /// Rows the current model was fitted on.
    const std::vector<std::size_t>& fit_rows() const { return fit_rows_; }

private:
    Method method_;
    const PreparedCorpus& corpus_;
    FeatureParams params_;
    std::vector<std::size_t> fit_rows_;

    Vocabulary vocab_;
    std::optional<LsiModel> lsi_;
    std::optional<LsiCoModel> lsi_co_;
    std::set<std::string> independent_;
};

std::vector<std::size_t> all_rows(std::size_t n);

/// Fit on every row and transform every row.
FeatureMatrix build_features(Method method, const PreparedCorpus& corpus, FeatureParams params = {});

}  // namespace ttpbench
