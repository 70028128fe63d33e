#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace alp::textnorm {

// Canonical decomposition, combining marks removed, lowercased. Idempotent.
// Invalid UTF-8 sequences are replaced with U+FFFD before folding.
std::string fold(std::string_view text);

// fold(text) split on every code point that is neither a letter nor a decimal
// digit. Apostrophes separate tokens, so "L'ingénieur" gives {"l", "ingenieur"}.
// No stopwords, no stemming.
std::vector<std::string> tokenize(std::string_view text);

// Sorted, de-duplicated tokens.
std::vector<std::string> token_set(std::string_view text);

// |a ∩ b| / |a ∪ b| over sorted unique token vectors; 0 when both are empty.
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

// First run of four ASCII digits, e.g. "vers 1868-1869" -> 1868.
std::optional<int> extract_year(std::string_view text);

std::string trim(std::string_view text);

}  // namespace alp::textnorm
