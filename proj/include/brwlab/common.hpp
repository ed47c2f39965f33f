#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace brw {

using VertexId = std::int64_t;

inline constexpr VertexId kNoVertex = -1;

// Library-wide numeric defaults. Callers can override per operation; these are
// the values used when a config does not say otherwise.
namespace defaults {
inline constexpr double fixed_point_tol = 1e-10;
inline constexpr long max_fixed_point_iters = 1000000;
inline constexpr double perron_tol = 1e-12;
inline constexpr std::int64_t population_cap = 10000000;
inline constexpr std::uint64_t master_seed = 20240901ULL;
}  // namespace defaults

// Thrown when an exact computation would need vertices beyond the generation
// cap of a lazy vertex space. We refuse rather than silently approximate.
class CapExceededError : public std::runtime_error {
 public:
  explicit CapExceededError(const std::string& what) : std::runtime_error(what) {}
};

// Bad model input: unnormalized law, negative rate, unknown vertex, ...
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Operation preconditions (reducible matrix passed to a Perron solver, etc.).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// FNV-1a, used for stable per-site stream keys. Stability across platforms
// matters more than speed here; labels are hashed once per interned vertex.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace brw
