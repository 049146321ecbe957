#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace exclab {

// Shared numerical tolerances.
inline constexpr double kVectorTolerance = 1e-12;
inline constexpr double kMatrixTolerance = 1e-10;

// Born probabilities below this are treated as exact zeros (|amplitude| < kVectorTolerance).
inline constexpr double kZeroProbability = kVectorTolerance * kVectorTolerance;

// Dense state vectors are capped at 2^14 amplitudes.
inline constexpr int kMaxQubits = 14;

// Materialized 2^m x 2^m measurements are capped here.
inline constexpr int kMaxMaterializedQubits = 10;

/// Caller passed arguments outside an operation's contract.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A request exceeds a configured size or enumeration budget.
class ResourceError : public std::length_error {
 public:
  using std::length_error::length_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw UsageError(message);
}

inline void require_resource(bool condition, const std::string& message) {
  if (!condition) throw ResourceError(message);
}

}  // namespace detail
}  // namespace exclab
