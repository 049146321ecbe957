#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "exclab/bitstring.hpp"
#include "exclab/config.hpp"
#include "exclab/qcore.hpp"
#include "exclab/rng.hpp"

namespace exclab::pbr {

/// Critical preparation angle 2 arctan(2^{1/m} - 1) for exclusion on m systems.
inline double theta(int m) {
  detail::require(m >= 1, "theta: m must be at least 1");
  return 2.0 * std::atan(std::expm1(std::numbers::ln2 / m));
}

/// cos(t/2)|0> + (-1)^bit sin(t/2)|1>.
inline StateVector psi(int bit, double angle) {
  detail::require(bit == 0 || bit == 1, "psi: bit must be 0 or 1");
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  return StateVector({c, bit == 0 ? s : -s});
}

inline StateVector psi_product(const BitString& x, double angle, int max_qubits = kMaxQubits) {
  detail::require(!x.empty(), "psi_product: empty string");
  detail::require_resource(x.size() <= max_qubits,
                           "psi_product: " + std::to_string(x.size()) + " qubits exceeds cap of " +
                               std::to_string(max_qubits));
  // Product amplitudes are c^{#0 in s} s^{#1 in s} with sign (-1)^{#positions where s_i = x_i = 1}.
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  const int q = x.size();
  const auto xi = x.to_index();
  std::vector<Complex> amps(std::size_t{1} << q);
  for (std::uint64_t idx = 0; idx < amps.size(); ++idx) {
    const int ones = std::popcount(idx);
    const double magnitude = std::pow(c, q - ones) * std::pow(s, ones);
    amps[idx] = (std::popcount(idx & xi) & 1) ? -magnitude : magnitude;
  }
  return StateVector(std::move(amps));
}

/// PBR exclusion vector for outcome z: 2^{-m/2} (|0..0> - sum_{s != 0} (-1)^{z.s} |s>).
inline StateVector zeta(const BitString& z) {
  detail::require(!z.empty(), "zeta: empty string");
  detail::require_resource(z.size() <= kMaxQubits, "zeta: string longer than qubit cap");
  const int m = z.size();
  const auto zi = z.to_index();
  const double scale = 1.0 / std::sqrt(static_cast<double>(std::uint64_t{1} << m));
  std::vector<Complex> amps(std::size_t{1} << m);
  amps[0] = scale;
  for (std::uint64_t s = 1; s < amps.size(); ++s) amps[s] = (std::popcount(zi & s) & 1) ? scale : -scale;
  return StateVector(std::move(amps));
}

namespace detail {

inline std::unique_ptr<RankOneMeasurement> build_exclusion_measurement(int m) {
  std::vector<StateVector> vectors;
  std::vector<BitString> labels;
  const std::uint64_t count = std::uint64_t{1} << m;
  vectors.reserve(count);
  labels.reserve(count);
  for (std::uint64_t z = 0; z < count; ++z) {
    labels.push_back(BitString::from_index(z, m));
    vectors.push_back(zeta(labels.back()));
  }
  return std::make_unique<RankOneMeasurement>(std::move(vectors), std::move(labels));
}

}  // namespace detail

/// The 2^m-outcome PBR measurement {|zeta_z>}, built once per m and shared.
inline const RankOneMeasurement& exclusion_measurement(int m) {
  exclab::detail::require(m >= 1, "exclusion_measurement: m must be at least 1");
  exclab::detail::require_resource(m <= kMaxMaterializedQubits,
                                   "exclusion_measurement: materializing m = " + std::to_string(m) +
                                       " exceeds cap of " + std::to_string(kMaxMaterializedQubits));
  static std::array<std::once_flag, kMaxMaterializedQubits + 1> once;
  static std::array<std::unique_ptr<RankOneMeasurement>, kMaxMaterializedQubits + 1> cache;
  const auto slot = static_cast<std::size_t>(m);
  std::call_once(once[slot], [&] { cache[slot] = detail::build_exclusion_measurement(m); });
  return *cache[slot];
}

/// Born probabilities of every exclusion outcome, without materializing the measurement.
///
/// <zeta_z|state> = 2^{-m/2} (2 state[0] - W[z]) with W the Walsh-Hadamard
/// transform of the amplitudes, so all 2^m probabilities cost O(m 2^m).
inline std::vector<double> exclusion_probabilities(const StateVector& state) {
  const int m = state.qubit_count();
  exclab::detail::require(m >= 1, "exclusion_probabilities: need at least one qubit");
  std::vector<Complex> w = state.amplitudes();
  for (std::size_t half = 1; half < w.size(); half <<= 1U) {
    for (std::size_t i = 0; i < w.size(); i += half << 1U) {
      for (std::size_t j = i; j < i + half; ++j) {
        const Complex a = w[j];
        const Complex b = w[j + half];
        w[j] = a + b;
        w[j + half] = a - b;
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(w.size());
  const Complex twice_origin = 2.0 * state[0];
  std::vector<double> probs(w.size());
  for (std::size_t z = 0; z < w.size(); ++z) {
    const double p = std::norm(twice_origin - w[z]) * scale;
    probs[z] = p < kZeroProbability ? 0.0 : p;
  }
  return probs;
}

/// Bob's exclusion step: measure the m received systems and name a string
/// the preparation was not.
inline BitString bob_exclude(const StateVector& state, RngStream& rng) {
  const auto probs = exclusion_probabilities(state);
  const auto z = sample_index(probs, rng);
  return BitString::from_index(z, state.qubit_count());
}

/// max over w of |<zeta_w|Psi_w(angle)>| for m-qubit products.
inline double max_self_overlap(int m, double angle) {
  double worst = 0.0;
  const std::uint64_t count = std::uint64_t{1} << m;
  for (std::uint64_t w = 0; w < count; ++w) {
    const auto label = BitString::from_index(w, m);
    worst = std::max(worst, std::abs(inner_product(zeta(label), psi_product(label, angle))));
  }
  return worst;
}

}  // namespace exclab::pbr
