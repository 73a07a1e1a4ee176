// Shared basics: error types, validation reports, id aliases, small helpers.
#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace shuffleopt {

using NodeId = int;
using LinkId = int;
using DemandId = int;
using GroupId = int;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error hierarchy. Everything thrown by the library derives from Error so the
// CLI can map categories to exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user-supplied value (generator params, domain preconditions).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed document (topology/placement/scenario/config/LP text).
class ParseError : public Error {
 public:
  using Error::Error;
};

class PlacementError : public Error {
 public:
  using Error::Error;
};

class ScenarioError : public Error {
 public:
  using Error::Error;
};

// Thrown by model builders when the instance has no positive network demand;
// completion time is 0 by definition upstream.
class DegenerateModelError : public Error {
 public:
  using Error::Error;
};

// A failure scenario disconnected one or more positive demands.
class FatalScenarioError : public Error {
 public:
  FatalScenarioError(const std::string& msg, std::vector<DemandId> demands)
      : Error(msg), disconnected(std::move(demands)) {}
  std::vector<DemandId> disconnected;
};

// The solver could not certify a result (singular basis, iteration runaway).
class SolverFailure : public Error {
 public:
  using Error::Error;
};

// Node budget or similar resource cap exceeded; message carries the remaining gap.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ModelMismatchError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Accumulates human-readable invariant violations; empty means valid.
struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  void add(const std::string& v) { violations.push_back(v); }

  std::string to_string() const {
    std::string out;
    for (const auto& v : violations) {
      out += v;
      out += '\n';
    }
    return out;
  }
};

// FNV-1a, used for content fingerprints and basis tags.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t seed = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a_append(std::uint64_t h, double v) {
  return fnv1a(&v, sizeof(v), h);
}

inline std::uint64_t fnv1a_append(std::uint64_t h, std::int64_t v) {
  return fnv1a(&v, sizeof(v), h);
}

inline std::uint64_t fnv1a_append(std::uint64_t h, const std::string& s) {
  return fnv1a(s.data(), s.size(), h);
}

inline std::string hex64(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return s;
}

// Stable float formatting for all machine-readable output (CSV, documents).
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::string(buf);
}

}  // namespace shuffleopt
