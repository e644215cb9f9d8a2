#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ttpbench {

struct AnnotatedToken {
    std::string form;
    std::string lemma;
    std::string upos;
    int head = 0;  // 1-based, 0 = root
    std::string deprel;
};

/// One CoNLL-U sentence block. Token i (0-based) has CoNLL-U id i + 1.
struct AnnotatedSentence {
    std::string doc_id;
    std::vector<AnnotatedToken> tokens;

    /// 0-based index of the root token, or -1.
    int root() const;
};

struct NounPhrase {
    std::vector<std::string> tokens;  // stemmed
    std::string surface;              // source forms joined by a space
    std::size_t begin = 0;            // token span [begin, end) in the sentence
    std::size_t end = 0;

    std::string key() const;
};

struct SvoTuple {
    std::string subject;
    std::string verb;
    std::string object;
    bool partial = false;  // subject or object missing

    bool operator==(const SvoTuple&) const = default;
    auto operator<=>(const SvoTuple&) const = default;
};

std::vector<AnnotatedSentence> parse_conllu(std::string_view text);
std::vector<AnnotatedSentence> read_conllu(const std::string& path);

/// Sentences grouped by doc_id, document order preserved.
class AnnotationIndex {
public:
    AnnotationIndex() = default;
    explicit AnnotationIndex(std::vector<AnnotatedSentence> sentences);

    bool contains(const std::string& doc_id) const { return docs_.count(doc_id) != 0; }
    /// Throws Error naming the doc id when absent.
    const std::vector<AnnotatedSentence>& sentences(const std::string& doc_id) const;
    std::size_t size() const { return docs_.size(); }

private:
    std::unordered_map<std::string, std::vector<AnnotatedSentence>> docs_;
};

/// Maximal runs matching (ADJ|NOUN|PROPN)* (NOUN|PROPN)+. Stopwords break runs.
std::vector<NounPhrase> extract_noun_phrases(const AnnotatedSentence& sentence);

/// Keys of phrases that occur at least once not strictly inside a longer
/// phrase of the same sentence. Input is grouped per sentence.
std::set<std::string> independent_phrases(const std::vector<std::vector<NounPhrase>>& phrases_per_sentence);

/// Subject/verb/object tuples per VERB token, lowercased lemmas.
std::vector<SvoTuple> extract_svo(const AnnotatedSentence& sentence);

/// Stemmed bag of words of a tuple list (subject, verb and object words).
std::vector<std::string> svo_bag(const std::vector<SvoTuple>& tuples);

}  // namespace ttpbench
