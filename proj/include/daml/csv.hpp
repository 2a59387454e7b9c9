#pragma once

// Minimal CSV helpers shared by the panel, metrics and results writers.
// Fields may be double-quoted ("" escapes a quote); lines starting with '#'
// are comments.

#include <string>
#include <string_view>
#include <vector>

namespace daml::csv {

inline constexpr int kSchemaVersion = 1;

std::vector<std::string> split_line(std::string_view line);
std::string quote(std::string_view field);  // quotes only when needed
/// Shortest-exact text for a double ("nan", "inf" for non-finite).
std::string real(double x);
/// Parses a double field; throws ValidationError mentioning `what`.
double parse_real(std::string_view field, std::string_view what);
long long parse_int(std::string_view field, std::string_view what);
std::string schema_comment();  // "# schema_version: 1"

}  // namespace daml::csv
