#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "heis/construction.hpp"

namespace heis::construction {

/// Raised when a map file is truncated, has the wrong magic or an unknown version.
class MapFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kMapFormatVersion = 1;

/// Layout (all little-endian):
///   "HEISMAP1" | u32 version | u32 target_N | u32 depth | u32 reserved
///   f64 p, alpha, beta_c, sigma | u64 seed
///   per level 1..depth: u64 count, then count records of
///   f64 x, y, t, radius, xi[target_N]
void write_map(std::ostream& out, const RandomMap& map);
RandomMap read_map(std::istream& in);

void save_map(const std::string& path, const RandomMap& map);
RandomMap load_map(const std::string& path);

}  // namespace heis::construction
