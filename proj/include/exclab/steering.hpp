#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exclab/bitstring.hpp"
#include "exclab/config.hpp"
#include "exclab/pbr.hpp"
#include "exclab/qcore.hpp"
#include "exclab/rng.hpp"

namespace exclab::steering {

/// Shared pair, Alice's two measurements, and the four states Bob can be left in.
///
/// The pair is a|00> + b|11> with a^2, b^2 = (1 +- cos t / (1 + sin t)) / 2.
/// Measuring S = {(a, b), (b, -a)} on Alice's qubit leaves Bob in psi_0(t)
/// or |->; R = {(a, -b), (b, a)} leaves him in psi_1(t) or |+>.
struct SteeringKit {
  int m;
  double theta;
  StateVector phi_ab;
  RankOneMeasurement meas_S;
  RankOneMeasurement meas_R;
  /// Indexed by 2 * bit + outcome: psi_0, |->, psi_1, |+>.
  std::array<StateVector, 4> targets;

  [[nodiscard]] const RankOneMeasurement& measurement_for(int bit) const { return bit == 0 ? meas_S : meas_R; }
  [[nodiscard]] const StateVector& target(int bit, int outcome) const {
    return targets[static_cast<std::size_t>(2 * bit + outcome)];
  }
};

/// Coefficients (a, b) of the shared pair for angle t.
inline std::pair<double, double> pair_coefficients(double t) {
  const double ratio = std::cos(t) / (1.0 + std::sin(t));
  return {std::sqrt(0.5 * (1.0 + ratio)), std::sqrt(0.5 * (1.0 - ratio))};
}

inline SteeringKit build_kit(int m) {
  detail::require(m >= 1, "build_kit: m must be at least 1");
  const double t = pbr::theta(m);
  const auto [a, b] = pair_coefficients(t);
  const std::vector<BitString> labels{BitString::parse("0"), BitString::parse("1")};
  return SteeringKit{
      m,
      t,
      StateVector({a, 0.0, 0.0, b}),
      RankOneMeasurement({StateVector({a, b}), StateVector({b, -a})}, labels),
      RankOneMeasurement({StateVector({a, -b}), StateVector({b, a})}, labels),
      {pbr::psi(0, t), ket_minus(), pbr::psi(1, t), ket_plus()},
  };
}

/// Alice measures the first qubit of a two-qubit state with `meas`.
/// Returns per-outcome probabilities and Bob's normalized conditional states.
struct SteeringBranches {
  std::array<double, 2> probability;
  std::array<std::optional<StateVector>, 2> bob_state;
};

inline SteeringBranches steering_branches(const StateVector& pair, const RankOneMeasurement& meas) {
  detail::require(pair.qubit_count() == 2 && meas.dimension() == 2 && meas.size() == 2,
                  "steering_branches: need a two-qubit state and a two-outcome qubit measurement");
  SteeringBranches out{};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& v = meas.outcome(k);
    // Bob's unnormalized state: sum_a conj(v_a) pair[a, b].
    std::vector<Complex> bob{std::conj(v[0]) * pair[0] + std::conj(v[1]) * pair[2],
                             std::conj(v[0]) * pair[1] + std::conj(v[1]) * pair[3]};
    const double p = std::norm(bob[0]) + std::norm(bob[1]);
    out.probability[k] = p;
    if (p > kZeroProbability) out.bob_state[k] = StateVector::normalized(std::move(bob));
  }
  return out;
}

struct SteerResult {
  int outcome;
  StateVector bob_state;
};

/// One use of the pair: Alice measures S (bit 0) or R (bit 1).
inline SteerResult steer_one(const SteeringKit& kit, int bit, RngStream& rng) {
  detail::require(bit == 0 || bit == 1, "steer_one: bit must be 0 or 1");
  const auto branches = steering_branches(kit.phi_ab, kit.measurement_for(bit));
  const auto k = sample_index(branches.probability, rng);
  return {static_cast<int>(k), *branches.bob_state[k]};
}

/// Probability a single measurement leaves Bob in the intended psi state.
inline double p_steer(int m) { return 1.0 / (1.0 + std::sin(pbr::theta(m))); }

/// p_steer(m)^n, in log domain.
inline double p_global_steer(long long n, int m) {
  detail::require(n >= 1, "p_global_steer: n must be at least 1");
  return std::exp(static_cast<double>(n) * std::log(p_steer(m)));
}

/// (1 + 2^{(m-2)/m} - 2^{(m-1)/m})^n, the same quantity written without trig.
inline double p_global_steer_closed_form(long long n, int m) {
  detail::require(n >= 1 && m >= 1, "p_global_steer_closed_form: need n, m >= 1");
  const double base = 1.0 + std::exp2(static_cast<double>(m - 2) / m) - std::exp2(static_cast<double>(m - 1) / m);
  return std::exp(static_cast<double>(n) * std::log(base));
}

/// Probability every one of k sets sees at least one failed steer.
inline double p_abort(long long n, int m, long long k) {
  detail::require(k >= 1, "p_abort: k must be at least 1");
  const double fail = -std::expm1(static_cast<double>(n) * std::log(p_steer(m)));
  return std::pow(fail, static_cast<double>(k));
}

/// 1 - 4^{-1/alpha}: per-set failure bound for m = alpha n.
inline double set_failure_bound(double alpha) {
  detail::require(alpha > 0.0 && alpha <= 1.0, "set_failure_bound: alpha must lie in (0, 1]");
  return -std::expm1(-std::log(4.0) / alpha);
}

/// Smallest k with (1 - 4^{-1/alpha})^k <= delta. Does not depend on n.
inline long long choose_k(double alpha, double delta) {
  detail::require(alpha > 0.0 && alpha <= 1.0, "choose_k: alpha must lie in (0, 1]");
  detail::require(delta > 0.0 && delta < 1.0, "choose_k: delta must lie in (0, 1)");
  const double fail = set_failure_bound(alpha);
  auto k = static_cast<long long>(std::ceil(std::log(delta) / std::log(fail)));
  k = std::max(k, 1LL);
  // Guard the ceiling against rounding on either side.
  while (k > 1 && std::pow(fail, static_cast<double>(k - 1)) <= delta) --k;
  while (std::pow(fail, static_cast<double>(k)) > delta) ++k;
  return k;
}

struct EAProtocolParameters {
  int n = 1;
  int m = 1;
  long long k = 1;
  double delta = 0.05;

  void validate() const {
    detail::require(n >= 1 && m >= 1 && m <= n, "EAProtocolParameters: need 1 <= m <= n");
    detail::require(k >= 1, "EAProtocolParameters: k must be at least 1");
    detail::require(delta > 0.0 && delta < 1.0, "EAProtocolParameters: delta must lie in (0, 1)");
  }

  /// k from choose_k with alpha = m / n.
  static EAProtocolParameters with_chosen_k(int n, int m, double delta) {
    detail::require(n >= 1 && m >= 1 && m <= n, "EAProtocolParameters: need 1 <= m <= n");
    EAProtocolParameters p{n, m, choose_k(static_cast<double>(m) / n, delta), delta};
    p.validate();
    return p;
  }
};

/// Message length when Alice names one of k sets.
inline double message_bits(long long k) { return std::log2(static_cast<double>(k)); }
inline int message_bits_integral(long long k) { return static_cast<int>(std::ceil(std::log2(static_cast<double>(k)))); }
/// Length when the alphabet also carries an abort symbol.
inline int message_bits_with_abort(long long k) {
  return static_cast<int>(std::ceil(std::log2(static_cast<double>(k + 1))));
}

struct SteeringRound {
  std::optional<long long> set_index;  ///< empty on abort
  std::vector<StateVector> bob_states; ///< Bob's n qubits from the chosen set
  long long measurements = 0;

  [[nodiscard]] bool aborted() const { return !set_index.has_value(); }
};

/// Alice steers k sets of n pairs with S/R chosen by x_i and reports the first
/// set whose measurements all gave outcome 0. Set j draws from rng.split(j).
inline SteeringRound run_steering_round(const EAProtocolParameters& params, const SteeringKit& kit, const BitString& x,
                                        const RngStream& rng) {
  params.validate();
  detail::require(x.size() == params.n, "run_steering_round: |x| must equal n");
  detail::require(kit.m == params.m, "run_steering_round: kit built for a different m");
  SteeringRound round;
  for (long long set = 0; set < params.k; ++set) {
    auto stream = rng.split(static_cast<std::uint64_t>(set));
    std::vector<StateVector> states;
    states.reserve(static_cast<std::size_t>(params.n));
    bool all_zero = true;
    for (int i = 1; i <= params.n; ++i) {
      auto result = steer_one(kit, x.at(i), stream);
      ++round.measurements;
      if (result.outcome != 0) {
        all_zero = false;
        break;  // this set is already unusable
      }
      states.push_back(std::move(result.bob_state));
    }
    if (all_zero) {
      round.set_index = set;
      round.bob_states = std::move(states);
      return round;
    }
  }
  return round;
}

inline SteeringRound run_steering_round(const EAProtocolParameters& params, const BitString& x, const RngStream& rng) {
  return run_steering_round(params, build_kit(params.m), x, rng);
}

}  // namespace exclab::steering
