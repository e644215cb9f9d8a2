#include "ttpbench/featurize.hpp"

#include <numeric>
#include <unordered_map>

#include "ttpbench/error.hpp"
#include "ttpbench/textprep.hpp"

namespace ttpbench {

PreparedCorpus prepare_corpus(const LabeledCorpus& corpus, const std::vector<TechniqueInfo>& techniques,
                              const AnnotationIndex* annotations) {
    std::unordered_map<std::string, const TechniqueInfo*> by_id;
    for (const auto& t : techniques) by_id.emplace(t.technique_id, &t);

    PreparedCorpus out;
    out.label_set = corpus.label_set;
    out.labels = corpus.labels();
    for (const auto& rec : corpus.records) {
        out.doc_ids.push_back(rec.doc_id);
        out.tokens.push_back(preprocess(rec.text, rec.doc_id).tokens);
    }
    for (const auto& id : corpus.label_set) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw Error("no technique description for " + id);
        out.technique_tokens.push_back(preprocess(it->second->description, id).tokens);
    }
    if (annotations == nullptr) return out;

    out.annotated = true;
    for (const auto& doc_id : out.doc_ids) {
        std::vector<std::vector<NounPhrase>> doc_phrases;
        std::vector<SvoTuple> tuples;
        for (const auto& sent : annotations->sentences(doc_id)) {
            doc_phrases.push_back(extract_noun_phrases(sent));
            auto svo = extract_svo(sent);
            tuples.insert(tuples.end(), svo.begin(), svo.end());
        }
        out.phrases.push_back(std::move(doc_phrases));
        out.svo_bags.push_back(svo_bag(tuples));
    }
    for (const auto& id : out.label_set) {
        std::vector<SvoTuple> tuples;
        for (const auto& sent : annotations->sentences(id)) {
            auto svo = extract_svo(sent);
            tuples.insert(tuples.end(), svo.begin(), svo.end());
        }
        out.technique_svo_bags.push_back(svo_bag(tuples));
    }
    return out;
}

TokenList phrase_terms(const std::vector<std::vector<NounPhrase>>& doc_phrases,
                       const std::set<std::string>& vocabulary_keys) {
    TokenList terms;
    for (const auto& sentence : doc_phrases) {
        for (const auto& p : sentence) {
            for (std::size_t i = 0; i < p.tokens.size(); ++i) {
                std::string key;
                for (std::size_t j = i; j < p.tokens.size(); ++j) {
                    if (j > i) key.push_back(' ');
                    key += p.tokens[j];
                    if (vocabulary_keys.count(key)) terms.push_back(key);
                }
            }
        }
    }
    return terms;
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

Featurizer::Featurizer(Method method, const PreparedCorpus& corpus, FeatureParams params)
    : method_(method), corpus_(corpus), params_(params) {
    if (needs_annotations(method) && !corpus.annotated)
        throw Error(std::string(method_name(method)) + " requires CoNLL-U annotations");
}

namespace {

template <typename T>
std::vector<T> pick(const std::vector<T>& items, const std::vector<std::size_t>& rows) {
    std::vector<T> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(items.at(r));
    return out;
}

}  // namespace

void Featurizer::fit(const std::vector<std::size_t>& rows) {
    fit_rows_ = rows;
    SvdOptions svd;
    svd.seed = params_.seed;
    switch (method_) {
        case Method::TFIDF:
            vocab_ = tfidf_fit(pick(corpus_.tokens, rows));
            break;
        case Method::LSI: {
            const auto docs = pick(corpus_.tokens, rows);
            vocab_ = tfidf_fit(docs);
            const SparseMatrix x = tfidf_transform(vocab_, docs);
            lsi_ = lsi_fit(x, effective_topics(params_.num_topics, x.rows(), x.cols()), svd);
            break;
        }
        case Method::LSI_CO:
            lsi_co_ = LsiCoModel::fit(pick(corpus_.tokens, rows), corpus_.technique_tokens, params_.num_topics, svd);
            break;
        case Method::TFIDF_NP: {
            std::vector<std::vector<NounPhrase>> sentences;
            for (auto r : rows)
                for (const auto& s : corpus_.phrases.at(r)) sentences.push_back(s);
            independent_ = independent_phrases(sentences);
            std::vector<TokenList> docs;
            for (auto r : rows) docs.push_back(phrase_terms(corpus_.phrases.at(r), independent_));
            vocab_ = tfidf_fit(docs);
            break;
        }
        case Method::BM25:
            break;
    }
}

FeatureMatrix Featurizer::transform(const std::vector<std::size_t>& rows) const {
    FeatureMatrix fm;
    fm.method_tag = method_;
    fm.label_set = corpus_.label_set;
    fm.labels = pick(corpus_.labels, rows);
    switch (method_) {
        case Method::TFIDF:
            fm.values = tfidf_transform(vocab_, pick(corpus_.tokens, rows));
            fm.col_meta = vocab_.terms;
            break;
        case Method::LSI:
            if (!lsi_) throw Error("LSI featurizer used before fit");
            fm.values = to_sparse(lsi_project(*lsi_, tfidf_transform(vocab_, pick(corpus_.tokens, rows))));
            break;
        case Method::LSI_CO:
            if (!lsi_co_) throw Error("LSI_CO featurizer used before fit");
            fm.values = to_sparse(lsi_co_->transform(pick(corpus_.tokens, rows)));
            fm.col_meta = corpus_.label_set;
            break;
        case Method::TFIDF_NP: {
            std::vector<TokenList> docs;
            for (auto r : rows) docs.push_back(phrase_terms(corpus_.phrases.at(r), independent_));
            fm.values = tfidf_transform(vocab_, docs);
            fm.col_meta = vocab_.terms;
            break;
        }
        case Method::BM25:
            fm.values = to_sparse(bm25_features(pick(corpus_.svo_bags, rows), corpus_.technique_svo_bags, params_.bm25));
            fm.col_meta = corpus_.label_set;
            break;
    }
    fm.validate();
    return fm;
}

FeatureMatrix build_features(Method method, const PreparedCorpus& corpus, FeatureParams params) {
    Featurizer f(method, corpus, params);
    const auto rows = all_rows(corpus.size());
    f.fit(rows);
    return f.transform(rows);
}

}  // namespace ttpbench
