#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "pucci/domain.hpp"
#include "pucci/radial.hpp"

namespace pucci {

inline constexpr const char* kToolVersion = "pucci-lab 1.0.0";

/// Writes content to path atomically (temp file in the same directory,
/// then rename).  Creates parent directories as needed.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// FNV-1a 64-bit hash; stable across platforms, used for cache keys.
std::uint64_t fnv1a64(const std::string& data);
std::string hash_hex(const std::string& data);

/// Radial profile as CSV (r, v, dv) with '#' header lines carrying the
/// parameter set and tool version.
std::string radial_profile_csv(const RadialProfile& prof, const std::string& header);

/// Grid function as columnar text (r, theta, u), physical radius r =
/// s * rho(theta); '#' header lines carry parameters and version.
std::string grid_solution_csv(const DiscreteSolution& sol, const std::string& header);

}  // namespace pucci
