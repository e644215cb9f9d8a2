#include "ttpbench/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ttpbench/error.hpp"
#include "ttpbench/textprep.hpp"

namespace ttpbench {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        cols.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return cols;
}

bool parse_int(std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool is_nominal(const std::string& upos) { return upos == "NOUN" || upos == "PROPN"; }

}  // namespace

int AnnotatedSentence::root() const {
    for (std::size_t i = 0; i < tokens.size(); ++i)
        if (tokens[i].head == 0) return static_cast<int>(i);
    return -1;
}

std::string NounPhrase::key() const {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

std::vector<AnnotatedSentence> parse_conllu(std::string_view text) {
    std::vector<AnnotatedSentence> out;
    std::string doc_id;
    AnnotatedSentence current;
    std::vector<std::size_t> token_lines;
    std::size_t line_no = 0;

    auto finish = [&] {
        if (current.tokens.empty()) return;
        const int n = static_cast<int>(current.tokens.size());
        for (std::size_t i = 0; i < current.tokens.size(); ++i) {
            const int head = current.tokens[i].head;
            if (head < 0 || head > n)
                throw ParseError("conllu: head " + std::to_string(head) + " out of range", token_lines[i]);
        }
        out.push_back(std::move(current));
        current = AnnotatedSentence{};
        token_lines.clear();
    };

    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        pos = nl + 1;

        if (trim_view(line).empty()) {
            finish();
            if (nl == text.size()) break;
            continue;
        }
        if (line.front() == '#') {
            auto body = trim_view(line.substr(1));
            if (body.rfind("doc_id", 0) == 0) {
                auto eq = body.find('=');
                if (eq != std::string_view::npos) {
                    finish();
                    doc_id = std::string(trim_view(body.substr(eq + 1)));
                }
            }
            if (nl == text.size()) break;
            continue;
        }

        auto cols = split_tabs(line);
        if (cols.size() != 10)
            throw ParseError("conllu: expected 10 tab-separated columns, got " + std::to_string(cols.size()), line_no);
        const auto id_col = cols[0];
        if (id_col.find('-') != std::string_view::npos || id_col.find('.') != std::string_view::npos) {
            // Multiword range lines are dropped in favour of their parts;
            // empty nodes carry no basic-tree head.
            if (nl == text.size()) break;
            continue;
        }
        int id = 0;
        if (!parse_int(id_col, id)) throw ParseError("conllu: bad token id '" + std::string(id_col) + "'", line_no);
        if (id != static_cast<int>(current.tokens.size()) + 1)
            throw ParseError("conllu: non-contiguous token id " + std::to_string(id), line_no);
        if (current.tokens.empty()) {
            if (doc_id.empty()) throw ParseError("conllu: sentence without a preceding '# doc_id =' comment", line_no);
            current.doc_id = doc_id;
        }
        AnnotatedToken tok;
        tok.form = std::string(cols[1]);
        tok.lemma = cols[2] == "_" ? tok.form : std::string(cols[2]);
        tok.upos = std::string(cols[3]);
        if (!parse_int(cols[6], tok.head)) throw ParseError("conllu: bad head '" + std::string(cols[6]) + "'", line_no);
        tok.deprel = std::string(cols[7]);
        current.tokens.push_back(std::move(tok));
        token_lines.push_back(line_no);
        if (nl == text.size()) break;
    }
    finish();
    return out;
}

std::vector<AnnotatedSentence> read_conllu(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_conllu(buf.str());
}

AnnotationIndex::AnnotationIndex(std::vector<AnnotatedSentence> sentences) {
    for (auto& s : sentences) docs_[s.doc_id].push_back(std::move(s));
}

const std::vector<AnnotatedSentence>& AnnotationIndex::sentences(const std::string& doc_id) const {
    auto it = docs_.find(doc_id);
    if (it == docs_.end()) throw Error("no annotations for document " + doc_id);
    return it->second;
}

std::vector<NounPhrase> extract_noun_phrases(const AnnotatedSentence& sentence) {
    std::vector<NounPhrase> phrases;
    const auto& toks = sentence.tokens;
    auto eligible = [&](std::size_t i) {
        const auto& t = toks[i];
        if (t.upos != "ADJ" && !is_nominal(t.upos)) return false;
        return !stopwords().count(ascii_lower(t.form));
    };
    std::size_t i = 0;
    while (i < toks.size()) {
        if (!eligible(i)) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < toks.size() && eligible(end)) ++end;
        std::size_t last = end;
        while (last > i && !is_nominal(toks[last - 1].upos)) --last;
        if (last > i) {
            NounPhrase np;
            np.begin = i;
            np.end = last;
            for (std::size_t k = i; k < last; ++k) {
                for (auto& piece : normalize_words(toks[k].form)) np.tokens.push_back(std::move(piece));
                if (!np.surface.empty()) np.surface.push_back(' ');
                np.surface += toks[k].form;
            }
            if (!np.tokens.empty()) phrases.push_back(std::move(np));
        }
        i = end;
    }
    return phrases;
}

std::set<std::string> independent_phrases(const std::vector<std::vector<NounPhrase>>& phrases_per_sentence) {
    std::set<std::string> keys;
    for (const auto& sentence : phrases_per_sentence) {
        for (const auto& p : sentence) {
            const bool nested = std::any_of(sentence.begin(), sentence.end(), [&](const NounPhrase& q) {
                return q.begin <= p.begin && p.end <= q.end && (q.end - q.begin) > (p.end - p.begin);
            });
            if (!nested) keys.insert(p.key());
        }
    }
    return keys;
}

std::vector<SvoTuple> extract_svo(const AnnotatedSentence& sentence) {
    const auto& toks = sentence.tokens;
    const auto n = toks.size();
    auto lemma = [&](std::size_t i) { return ascii_lower(toks[i].lemma); };

    // Object lemma plus the compound modifiers adjacent to it, in surface order.
    auto object_text = [&](std::size_t obj) {
        std::vector<bool> in(n, false);
        in[obj] = true;
        std::size_t lo = obj;
        while (lo > 0) {
            const auto& t = toks[lo - 1];
            if (t.deprel != "compound" || t.head < 1 || !in[static_cast<std::size_t>(t.head - 1)]) break;
            in[--lo] = true;
        }
        std::size_t hi = obj;
        while (hi + 1 < n) {
            const auto& t = toks[hi + 1];
            if (t.deprel != "compound" || t.head < 1 || !in[static_cast<std::size_t>(t.head - 1)]) break;
            in[++hi] = true;
        }
        std::string out;
        for (std::size_t k = lo; k <= hi; ++k) {
            if (!out.empty()) out.push_back(' ');
            out += lemma(k);
        }
        return out;
    };

    std::vector<SvoTuple> tuples;
    for (std::size_t v = 0; v < n; ++v) {
        if (toks[v].upos != "VERB") continue;
        std::vector<std::string> subjects;
        std::vector<std::string> objects;
        for (std::size_t d = 0; d < n; ++d) {
            if (toks[d].head != static_cast<int>(v) + 1) continue;
            const auto& rel = toks[d].deprel;
            if (rel == "nsubj" || rel == "nsubj:pass") {
                subjects.push_back(lemma(d));
            } else if (rel == "obj" || rel == "dobj" || rel == "obl" || rel == "iobj") {
                objects.push_back(object_text(d));
            }
        }
        if (subjects.empty() && objects.empty()) continue;
        const auto verb = lemma(v);
        const bool partial = subjects.empty() || objects.empty();
        if (subjects.empty()) subjects.emplace_back();
        if (objects.empty()) objects.emplace_back();
        for (const auto& s : subjects)
            for (const auto& o : objects) tuples.push_back({s, verb, o, partial});
    }
    return tuples;
}

std::vector<std::string> svo_bag(const std::vector<SvoTuple>& tuples) {
    std::vector<std::string> bag;
    for (const auto& t : tuples)
        for (const auto* part : {&t.subject, &t.verb, &t.object})
            for (auto& w : normalize_words(*part)) bag.push_back(std::move(w));
    return bag;
}

}  // namespace ttpbench
