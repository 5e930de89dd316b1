#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ppinfer {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_real(double x);

/// Strict full-string parse; throws ParameterError naming `what` on failure.
double parse_real(std::string_view text, std::string_view what = "number");
unsigned long long parse_count(std::string_view text, std::string_view what = "count");

/// Splits on `sep`, trimming ASCII whitespace from every piece.
std::vector<std::string> split_trim(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace ppinfer
