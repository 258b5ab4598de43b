#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "nearlattice/configuration.hpp"

namespace nearlattice {

inline constexpr int kSnapshotVersion = 1;

struct Snapshot {
  Configuration config;
  std::uint64_t seed = 0;
  long sweep = 0;
};

/// Text snapshot: header lines then one line per site with integer
/// coordinates, basis index and position at 17 significant digits.
void save_snapshot(std::ostream& out, const Configuration& c, std::uint64_t seed, long sweep);
void save_snapshot(const std::filesystem::path& path, const Configuration& c, std::uint64_t seed, long sweep);

/// Throws PARSE_ERROR (with line number) or VERSION_MISMATCH.
Snapshot load_snapshot(std::istream& in);
Snapshot load_snapshot(const std::filesystem::path& path);

/// Decimal text with 17 significant digits; round-trips every double.
std::string format_double(double value);
/// Strict full-string parse; throws PARSE_ERROR.
double parse_double(std::string_view text);

}  // namespace nearlattice
