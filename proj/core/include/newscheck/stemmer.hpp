#pragma once

#include <string>
#include <string_view>

namespace newscheck {

/// Snowball Portuguese stemmer. Input is expected lowercase; accented and
/// accent-stripped words are both handled.
///
///   stem_portuguese("meninas") == "menin"
///   stem_portuguese("nacionalidade") == "nacional"
std::string stem_portuguese(std::string_view word);

}  // namespace newscheck
