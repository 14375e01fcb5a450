#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vf {

// Word tokens for indexing and matching: case-folded, punctuation dropped,
// digits retained. Non-ASCII bytes are treated as letter characters so
// UTF-8 words survive intact.
std::vector<std::string> tokenize(std::string_view text);

// Penn-style surface tokens for tagging: punctuation kept as separate
// tokens, case preserved.
std::vector<std::string> tokenize_surface(std::string_view text);

std::string fold_case(std::string_view word);

// Number of Unicode scalar values in a UTF-8 string.
std::size_t codepoint_count(std::string_view text);

std::string trim(std::string_view text);

}  // namespace vf
