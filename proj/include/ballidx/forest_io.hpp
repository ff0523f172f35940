#pragma once

#include <iosfwd>
#include <string>

#include "ballidx/forest.hpp"

namespace ballidx {

/// Magic first line of a forest artifact; the trailing number is the format version.
inline constexpr const char* kForestMagic = "ballidx-forest";
inline constexpr int kForestFormatVersion = 1;

/// Line-oriented text artifact holding the dataset, metric, method, plan
/// summary and every tree node. Reals use shortest round-trip formatting, so
/// a loaded forest answers queries bit-identically. Custom metrics cannot be
/// saved.
void save_forest(const Forest& forest, std::ostream& out);
void save_forest(const Forest& forest, const std::string& path);

/// Throws a data error naming the line on any malformed or truncated input.
Forest load_forest(std::istream& in);
Forest load_forest(const std::string& path);

} // namespace ballidx
