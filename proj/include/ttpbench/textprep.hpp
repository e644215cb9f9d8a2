#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ttpbench {

struct TokenizedDoc {
    std::string doc_id;
    std::vector<std::string> tokens;
    std::size_t raw_len = 0;
};

/// The shipped English stopword list (resources/stopwords.txt, compiled in).
const std::unordered_set<std::string>& stopwords();

/// Remove http(s) URLs (up to the next whitespace) and "(Citation: ...)" spans.
std::string clean(std::string_view text);

/// Lowercase ASCII letters only; bytes >= 0x80 pass through.
std::string ascii_lower(std::string_view text);

/// Porter stem iterated to a fixed point so that stemming is idempotent.
std::string stem_token(std::string_view token);

/// Split on ASCII non-alphanumerics, then stopword/length filtering and
/// stemming. Does not call clean(); used for annotation forms and SVO words.
std::vector<std::string> normalize_words(std::string_view text);

/// clean -> lowercase -> split -> drop stopwords -> drop len < 2 -> stem.
TokenizedDoc preprocess(std::string_view text, std::string doc_id = {});

}  // namespace ttpbench
