#include "ttpbench/textprep.hpp"

#include <sstream>

#include "ttpbench/porter.hpp"

namespace ttpbench {

// Generated from resources/stopwords.txt at configure time.
extern const char* const kStopwordResource;

namespace {

constexpr std::size_t kMinTokenLength = 2;

bool is_token_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool keep(const std::string& token) {
    return token.size() >= kMinTokenLength && !stopwords().count(token);
}

}  // namespace

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = [] {
        std::unordered_set<std::string> out;
        std::istringstream in(kStopwordResource);
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && is_space(line.back())) line.pop_back();
            if (!line.empty()) out.insert(line);
        }
        return out;
    }();
    return words;
}

std::string clean(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto rest = text.substr(i);
        if (rest.rfind("http://", 0) == 0 || rest.rfind("https://", 0) == 0) {
            while (i < text.size() && !is_space(text[i])) ++i;
            continue;
        }
        if (rest.rfind("(Citation:", 0) == 0) {
            int depth = 0;
            std::size_t j = i;
            for (; j < text.size(); ++j) {
                if (text[j] == '(') ++depth;
                if (text[j] == ')' && --depth == 0) break;
            }
            if (j < text.size()) {
                i = j + 1;
                continue;
            }
        }
        out.push_back(text[i]);
        ++i;
    }
    return out;
}

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

std::string stem_token(std::string_view token) {
    std::string current(token);
    for (int iter = 0; iter < 8; ++iter) {
        auto next = porter_stem(current);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

std::vector<std::string> normalize_words(std::string_view text) {
    const std::string lower = ascii_lower(text);
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && keep(cur)) {
            auto stemmed = stem_token(cur);
            if (keep(stemmed)) tokens.push_back(std::move(stemmed));
        }
        cur.clear();
    };
    for (unsigned char c : lower) {
        if (is_token_byte(c)) {
            cur.push_back(static_cast<char>(c));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

TokenizedDoc preprocess(std::string_view text, std::string doc_id) {
    TokenizedDoc doc;
    doc.doc_id = std::move(doc_id);
    doc.raw_len = text.size();
    doc.tokens = normalize_words(clean(text));
    return doc;
}

}  // namespace ttpbench
