#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace hcmc {

/// Latin letters with diacritics become their ASCII base letters ("café" ->
/// "cafe", "Æ" -> "AE"); combining marks U+0300..U+036F are removed. Other
/// characters pass through unchanged.
std::string fold_diacritics(std::string_view utf8);

/// Cleans one subtitle cue: strips <tags> and {\override} tags, folds
/// diacritics, removes [bracketed] and (parenthesized) sound descriptions,
/// ♪ music segments and a leading all-caps "SPEAKER:" label, then collapses
/// whitespace. Returns nullopt when nothing spoken remains.
std::optional<std::string> normalize_utterance(std::string_view text);

}  // namespace hcmc
