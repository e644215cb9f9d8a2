#pragma once

#include <string>
#include <string_view>

namespace ttpbench {

/// Classic Porter (1980) suffix stripping on a lowercase ASCII word.
/// Words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace ttpbench
