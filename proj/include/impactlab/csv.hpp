#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace impactlab::csv {

/// Splits one CSV record on commas. Quoting is not supported; none of the
/// schemas here carry embedded commas.
std::vector<std::string_view> split(std::string_view line);

/// Reads one LF-terminated line, dropping a trailing CR. False at end of input.
bool read_line(std::istream& in, std::string& line);

std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);
std::optional<double> parse_double(std::string_view s);

/// Report-boundary float formatting: 6 significant digits, "nan"/"inf" spelled out.
std::string fmt(double v);
std::string fmt(std::optional<double> v);

}  // namespace impactlab::csv
