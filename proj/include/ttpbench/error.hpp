#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ttpbench {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. `position` is a 1-based line number for line
/// oriented formats and a byte offset for JSON.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace ttpbench
