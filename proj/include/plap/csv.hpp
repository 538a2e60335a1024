#pragma once

#include <string>
#include <vector>

namespace plap::csv {

/// Shortest-round-trip-safe decimal ("%.17g"); nan/inf spelled out.
std::string real(double value);

std::vector<std::string> split(const std::string& line, char sep = ',');

/// Parses a full-string real; throws std::runtime_error naming `what`.
double parse_real(const std::string& text, const std::string& what);

}  // namespace plap::csv
