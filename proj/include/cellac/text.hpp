#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cellac {

/// Trims ASCII and common Unicode whitespace from both ends.
std::string trim(std::string_view s);

/// Collapses runs of whitespace into a single space and trims.
std::string collapse_whitespace(std::string_view s);

/// ASCII-only lowercase. Multibyte sequences pass through unchanged.
std::string ascii_lower(std::string_view s);

/// Heading label key: Unicode NFC, full lowercase, whitespace collapsed.
std::string normalize_label(std::string_view s);

/// Decodes UTF-8 into code points. Invalid bytes map to U+FFFD.
std::u32string utf8_decode(std::string_view s);

/// Lowercased whitespace tokens.
std::vector<std::string> tokenize(std::string_view s);

/// Splits a camelCase or snake_case identifier into lowercase words:
/// "timeZone" -> "time zone".
std::string split_camel_case(std::string_view identifier);

std::vector<std::string> split(std::string_view s, char sep);

bool starts_with_ci(std::string_view s, std::string_view prefix);

/// Term-frequency bag. Ordered so cosine sums are reproducible.
using TermVector = std::map<std::string, double>;

TermVector term_vector(std::string_view text);
void add_terms(TermVector& tv, std::string_view text);
double cosine(const TermVector& a, const TermVector& b);
/// Sets every weight to 1.
TermVector binarize(TermVector tv);

/// Shortest round-trip decimal rendering without exponent.
std::string format_number(double v);

}  // namespace cellac
