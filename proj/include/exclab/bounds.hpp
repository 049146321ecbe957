#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "exclab/config.hpp"
#include "exclab/pbr.hpp"
#include "exclab/qcore.hpp"

namespace exclab::bounds {

/// Largest n for which gamma() is evaluated exactly.
inline constexpr int kExactGammaMaxN = 64;

/// floor(v) that tolerates v landing a few ulps below an exact integer.
inline long long floor_tolerant(double v) { return static_cast<long long>(std::floor(v * (1.0 + 1e-12))); }

struct GameParameters {
  int n = 1;
  int m = 1;
  std::optional<double> alpha;
  std::optional<double> delta;

  /// m = floor(alpha n).
  static GameParameters from_alpha(int n, double alpha, std::optional<double> delta = std::nullopt);

  void validate() const {
    detail::require(n >= 1, "GameParameters: n must be at least 1");
    detail::require(m >= 1 && m <= n, "GameParameters: need 1 <= m <= n");
    if (alpha) detail::require(m == floor_tolerant(*alpha * n),
                               "GameParameters: m must equal floor(alpha n)");
    if (delta) detail::require(*delta > 0.0 && *delta < 1.0, "GameParameters: delta must lie in (0, 1)");
  }
};

inline GameParameters GameParameters::from_alpha(int n, double alpha, std::optional<double> delta) {
  detail::require(alpha > 0.0 && alpha <= 1.0, "GameParameters: alpha must lie in (0, 1]");
  GameParameters p{n, static_cast<int>(floor_tolerant(alpha * n)), alpha, delta};
  p.validate();
  return p;
}

/// sum_{i=0}^{m-1} C(n, i), exact for n <= 64.
inline std::uint64_t gamma(int n, int m) {
  detail::require(n >= 1 && m >= 1 && m <= n, "gamma: need 1 <= m <= n");
  detail::require(n <= kExactGammaMaxN, "gamma: exact evaluation limited to n <= 64; use gamma_log2");
  unsigned __int128 term = 1;
  unsigned __int128 sum = 0;
  for (int i = 0; i < m; ++i) {
    sum += term;
    term = term * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
  }
  return static_cast<std::uint64_t>(sum);
}

inline double gamma_log2_exact(int n, int m) {
  return static_cast<double>(std::log2(static_cast<long double>(gamma(n, m))));
}

/// log2 sum_{i<=k} C(n, i) through log-gamma terms and a compensated log-sum-exp.
inline double log2_binomial_prefix_sum(long long n, long long k) {
  detail::require(n >= 0 && k >= 0 && k <= n, "log2_binomial_prefix_sum: need 0 <= k <= n");
  const double lg_n = std::lgamma(static_cast<double>(n) + 1.0);
  auto log_term = [&](long long i) {
    return lg_n - std::lgamma(static_cast<double>(i) + 1.0) - std::lgamma(static_cast<double>(n - i) + 1.0);
  };
  // Terms increase up to n/2, so the largest summand is at min(k, n/2).
  const double peak = log_term(std::min(k, n / 2));
  double sum = 0.0;
  double carry = 0.0;
  for (long long i = k; i >= 0; --i) {
    const double t = std::exp(log_term(i) - peak);
    if (t < 1e-300 && i < n / 2) break;
    const double y = t - carry;
    const double next = sum + y;
    carry = (next - sum) - y;
    sum = next;
  }
  return (peak + std::log(sum)) / std::numbers::ln2;
}

inline double gamma_log2_approx(long long n, long long m) {
  detail::require(n >= 1 && m >= 1 && m <= n, "gamma_log2: need 1 <= m <= n");
  return log2_binomial_prefix_sum(n, m - 1);
}

/// log2 gamma(n, m): exact path for n <= 64, log domain otherwise.
inline double gamma_log2(long long n, long long m) {
  if (n <= kExactGammaMaxN) return gamma_log2_exact(static_cast<int>(n), static_cast<int>(m));
  return gamma_log2_approx(n, m);
}

inline double classical_ic_lower_bound(long long n, long long m) {
  return std::max(0.0, static_cast<double>(n) - gamma_log2(n, m));
}

inline double classical_ic_lower_bound(const GameParameters& p) {
  p.validate();
  return classical_ic_lower_bound(p.n, p.m);
}

/// n H2(cos^2(theta_m / 2)): n times the entropy of the equal mixture of psi_0, psi_1.
inline double quantum_message_entropy_upper(long long n, int m) {
  detail::require(n >= 1 && m >= 1 && m <= n, "quantum_message_entropy_upper: need 1 <= m <= n");
  const double half = pbr::theta(m) / 2.0;
  // sin^2 keeps precision when theta_m is tiny; H2 is symmetric.
  const double s = std::sin(half);
  return static_cast<double>(n) * binary_entropy(s * s);
}

inline double quantum_message_entropy_upper(const GameParameters& p) {
  p.validate();
  return quantum_message_entropy_upper(p.n, p.m);
}

inline double quantum_ic_upper_bound(long long n, int m) { return 2.0 * quantum_message_entropy_upper(n, m); }
inline double quantum_ic_upper_bound(const GameParameters& p) { return 2.0 * quantum_message_entropy_upper(p); }

struct BinomialSumCheck {
  double lhs;  ///< log2 sum_{i <= floor(q n)} C(n, i)
  double rhs;  ///< n H2(q)
};

inline BinomialSumCheck binomial_sum_bound_check(long long n, double q) {
  detail::require(n >= 1, "binomial_sum_bound_check: n must be at least 1");
  detail::require(q > 0.0 && q <= 0.5, "binomial_sum_bound_check: q must lie in (0, 1/2]");
  const long long k = floor_tolerant(q * static_cast<double>(n));
  const double lhs = n <= kExactGammaMaxN ? gamma_log2_exact(static_cast<int>(n), static_cast<int>(k + 1))
                                          : log2_binomial_prefix_sum(n, k);
  return {lhs, static_cast<double>(n) * binary_entropy(q)};
}

struct BoundsRow {
  long long n;
  long long m;
  double gamma_log2;
  double classical_ic_lower;
  double quantum_entropy_upper;
  double quantum_ic_upper;
};

/// How m is derived from n for a table.
struct MRule {
  enum class Kind { power, linear, fixed };
  Kind kind = Kind::power;
  double value = 0.75;  ///< exponent c, fraction alpha, or the fixed m

  static MRule power(double exponent) { return {Kind::power, exponent}; }
  static MRule linear(double alpha) { return {Kind::linear, alpha}; }
  static MRule fixed(long long m) { return {Kind::fixed, static_cast<double>(m)}; }

  static MRule parse(const std::string& kind, double value) {
    if (kind == "power") return power(value);
    if (kind == "linear") return linear(value);
    if (kind == "fixed") return fixed(static_cast<long long>(value));
    throw UsageError("unknown m rule '" + kind + "' (expected power, linear or fixed)");
  }

  [[nodiscard]] std::string name() const {
    switch (kind) {
      case Kind::power: return "power";
      case Kind::linear: return "linear";
      case Kind::fixed: return "fixed";
    }
    return "?";
  }

  [[nodiscard]] long long m_for(long long n) const {
    long long m = 0;
    switch (kind) {
      case Kind::power:
        detail::require(value > 0.0 && value <= 1.0, "power rule: exponent must lie in (0, 1]");
        m = floor_tolerant(std::pow(static_cast<double>(n), value));
        break;
      case Kind::linear:
        detail::require(value > 0.0 && value <= 1.0, "linear rule: alpha must lie in (0, 1]");
        m = floor_tolerant(value * static_cast<double>(n));
        break;
      case Kind::fixed:
        m = static_cast<long long>(value);
        break;
    }
    detail::require(m >= 1 && m <= n,
                    "m rule gives m = " + std::to_string(m) + " for n = " + std::to_string(n) + "; need 1 <= m <= n");
    return m;
  }
};

inline BoundsRow bounds_row(long long n, long long m) {
  detail::require(n >= 1 && m >= 1 && m <= n, "bounds_row: need 1 <= m <= n");
  detail::require(m <= std::numeric_limits<int>::max(), "bounds_row: m too large");
  const double g = gamma_log2(n, m);
  const double qe = quantum_message_entropy_upper(n, static_cast<int>(m));
  return {n, m, g, std::max(0.0, static_cast<double>(n) - g), qe, 2.0 * qe};
}

inline std::vector<BoundsRow> separation_table(const std::vector<long long>& n_values, const MRule& rule) {
  std::vector<BoundsRow> rows;
  rows.reserve(n_values.size());
  for (auto n : n_values) {
    detail::require(n >= 1, "separation_table: n must be at least 1");
    rows.push_back(bounds_row(n, rule.m_for(n)));
  }
  return rows;
}

}  // namespace exclab::bounds
