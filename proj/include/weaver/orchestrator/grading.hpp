#pragma once

#include <string>
#include <string_view>

namespace weaver {

// Case-folded, trimmed, inner whitespace collapsed, trailing . ! ? ; : ,
// stripped.
std::string normalize_answer(std::string_view text);

bool answers_match(std::string_view answer, std::string_view gold);

}  // namespace weaver
