#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "ballidx/metric.hpp"

namespace ballidx {

/// Parses one object per line as comma-separated reals. The first non-blank
/// line is treated as a header if any of its tokens is not a number; the
/// dimension comes from the first data line. Errors name the offending line.
Dataset parse_csv(std::istream& in, std::string_view source_name = "<stream>");

Dataset read_csv(const std::string& path);

/// Writes with shortest round-trip formatting, no header.
void write_csv(std::ostream& out, const Dataset& ds);
void write_csv(const std::string& path, const Dataset& ds);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

} // namespace ballidx
