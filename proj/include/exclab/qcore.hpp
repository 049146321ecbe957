#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "exclab/bitstring.hpp"
#include "exclab/config.hpp"
#include "exclab/rng.hpp"

namespace exclab {

using Complex = std::complex<double>;

/// Normalized pure state on q qubits. Amplitude index i is the basis string
/// whose first qubit is the most significant bit of i.
class StateVector {
 public:
  explicit StateVector(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
    const auto size = amplitudes_.size();
    detail::require(size >= 1 && (size & (size - 1)) == 0, "StateVector: length must be a power of two");
    qubits_ = std::countr_zero(size);
    detail::require(std::abs(norm() - 1.0) <= kVectorTolerance, "StateVector: amplitudes are not normalized");
  }

  /// Rescales to unit norm; for post-measurement states.
  static StateVector normalized(std::vector<Complex> amplitudes) {
    double total = 0.0;
    for (const auto& a : amplitudes) total += std::norm(a);
    detail::require(total > 0.0, "StateVector::normalized: zero vector");
    const double scale = 1.0 / std::sqrt(total);
    for (auto& a : amplitudes) a *= scale;
    return StateVector(std::move(amplitudes));
  }

  static StateVector basis(std::uint64_t index, int qubits) {
    std::vector<Complex> amps(std::size_t{1} << qubits);
    detail::require(index < amps.size(), "StateVector::basis: index out of range");
    amps[index] = 1.0;
    return StateVector(std::move(amps));
  }

  [[nodiscard]] int qubit_count() const { return qubits_; }
  [[nodiscard]] std::size_t dimension() const { return amplitudes_.size(); }
  [[nodiscard]] const std::vector<Complex>& amplitudes() const { return amplitudes_; }
  [[nodiscard]] const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

  [[nodiscard]] double norm() const {
    double total = 0.0;
    for (const auto& a : amplitudes_) total += std::norm(a);
    return std::sqrt(total);
  }

 private:
  std::vector<Complex> amplitudes_;
  int qubits_ = 0;
};

inline const StateVector& ket_plus() {
  static const StateVector s({M_SQRT1_2, M_SQRT1_2});
  return s;
}

inline const StateVector& ket_minus() {
  static const StateVector s({M_SQRT1_2, -M_SQRT1_2});
  return s;
}

inline StateVector tensor_product(const StateVector& a, const StateVector& b) {
  std::vector<Complex> out(a.dimension() * b.dimension());
  for (std::size_t i = 0; i < a.dimension(); ++i)
    for (std::size_t j = 0; j < b.dimension(); ++j) out[i * b.dimension() + j] = a[i] * b[j];
  return StateVector(std::move(out));
}

/// <a|b>, conjugate-linear in a.
inline Complex inner_product(const StateVector& a, const StateVector& b) {
  detail::require(a.dimension() == b.dimension(), "inner_product: dimension mismatch");
  Complex sum = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) sum += std::conj(a[i]) * b[i];
  return sum;
}

inline double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner_product(a, b)); }

/// Complete rank-one projective measurement {|v><v|}.
class RankOneMeasurement {
 public:
  RankOneMeasurement(std::vector<StateVector> outcomes, std::vector<BitString> labels)
      : outcomes_(std::move(outcomes)), labels_(std::move(labels)) {
    detail::require(!outcomes_.empty(), "RankOneMeasurement: no outcomes");
    detail::require(outcomes_.size() == labels_.size(), "RankOneMeasurement: one label per outcome required");
    const auto dim = outcomes_.front().dimension();
    for (const auto& v : outcomes_) detail::require(v.dimension() == dim, "RankOneMeasurement: mixed dimensions");
    residual_ = compute_completeness_residual();
    detail::require(residual_ <= kMatrixTolerance, "RankOneMeasurement: projectors do not sum to the identity");
  }

  [[nodiscard]] std::size_t size() const { return outcomes_.size(); }
  [[nodiscard]] std::size_t dimension() const { return outcomes_.front().dimension(); }
  [[nodiscard]] const StateVector& outcome(std::size_t i) const { return outcomes_[i]; }
  [[nodiscard]] const BitString& label(std::size_t i) const { return labels_[i]; }
  [[nodiscard]] const std::vector<StateVector>& outcomes() const { return outcomes_; }

  /// max entrywise |sum_v |v><v| - I|, measured at construction.
  [[nodiscard]] double completeness_residual() const { return residual_; }

 private:
  [[nodiscard]] double compute_completeness_residual() const {
    const auto dim = outcomes_.front().dimension();
    std::vector<Complex> sum(dim * dim);
    for (const auto& v : outcomes_) {
      const auto& a = v.amplitudes();
      for (std::size_t r = 0; r < dim; ++r) {
        const Complex ar = a[r];
        if (ar == 0.0) continue;
        Complex* row = &sum[r * dim];
        for (std::size_t c = 0; c < dim; ++c) row[c] += ar * std::conj(a[c]);
      }
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c)
        worst = std::max(worst, std::abs(sum[r * dim + c] - Complex(r == c ? 1.0 : 0.0)));
    return worst;
  }

  std::vector<StateVector> outcomes_;
  std::vector<BitString> labels_;
  double residual_ = 0.0;
};

inline std::vector<double> born_probabilities(const StateVector& state, const RankOneMeasurement& meas) {
  detail::require(state.dimension() == meas.dimension(), "born_probabilities: dimension mismatch");
  std::vector<double> probs;
  probs.reserve(meas.size());
  for (const auto& v : meas.outcomes()) {
    const double p = std::norm(inner_product(v, state));
    probs.push_back(p < kZeroProbability ? 0.0 : p);
  }
  return probs;
}

/// Draws an index from unnormalized weights. Zero-weight entries are never returned.
inline std::size_t sample_index(std::span<const double> weights, RngStream& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  detail::require(total > 0.0, "sample_index: all weights are zero");
  const double target = rng.uniform() * total;
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    running += weights[i];
    last_positive = i;
    if (target < running) return i;
  }
  return last_positive;
}

struct MeasurementResult {
  std::size_t index;
  BitString label;
  StateVector post_state;
};

inline MeasurementResult born_measure(const StateVector& state, const RankOneMeasurement& meas, RngStream& rng) {
  const auto probs = born_probabilities(state, meas);
  const auto i = sample_index(probs, rng);
  return {i, meas.label(i), meas.outcome(i)};
}

// ---------------------------------------------------------------------------
// Entropies (bits, 0 log 0 = 0)

inline double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

inline double binary_entropy(double p) {
  detail::require(p >= 0.0 && p <= 1.0, "binary_entropy: p outside [0, 1]");
  // Take the smaller probability as `small` and use log1p for the other term;
  // log2(1 - small) loses most of its digits once small is tiny.
  const double small = p <= 0.5 ? p : 1.0 - p;
  if (small == 0.0) return 0.0;
  return -xlog2x(small) - (1.0 - small) * std::log1p(-small) / std::numbers::ln2;
}

class ProbabilityDistribution {
 public:
  explicit ProbabilityDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
    double total = 0.0;
    for (double w : weights_) {
      detail::require(w >= 0.0 && w <= 1.0, "ProbabilityDistribution: weight outside [0, 1]");
      total += w;
    }
    detail::require(std::abs(total - 1.0) <= kVectorTolerance, "ProbabilityDistribution: weights do not sum to 1");
  }

  static ProbabilityDistribution uniform(std::size_t outcomes) {
    return ProbabilityDistribution(std::vector<double>(outcomes, 1.0 / static_cast<double>(outcomes)));
  }

  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] std::size_t size() const { return weights_.size(); }

 private:
  std::vector<double> weights_;
};

inline double shannon_entropy(std::span<const double> weights) {
  double h = 0.0;
  for (double w : weights) h -= xlog2x(w);
  return h;
}

inline double shannon_entropy(const ProbabilityDistribution& d) { return shannon_entropy(d.weights()); }

/// Sparse joint distribution of a pair (X, M). Duplicate cells are merged.
class JointDistribution {
 public:
  struct Cell {
    std::uint64_t x;
    std::uint64_t m;
    double p;
  };

  explicit JointDistribution(const std::vector<Cell>& cells) {
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> merged;
    for (const auto& c : cells) {
      detail::require(c.p >= 0.0 && c.p <= 1.0, "JointDistribution: weight outside [0, 1]");
      merged[{c.m, c.x}] += c.p;
    }
    double total = 0.0;
    cells_.reserve(merged.size());
    for (const auto& [key, p] : merged) {
      cells_.push_back({key.second, key.first, p});
      total += p;
    }
    detail::require(std::abs(total - 1.0) <= kVectorTolerance, "JointDistribution: weights do not sum to 1");
  }

  /// Empirical distribution from integer counts, keyed by (x, m).
  static JointDistribution from_counts(const std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t>& counts) {
    std::uint64_t total = 0;
    for (const auto& kv : counts) total += kv.second;
    detail::require(total > 0, "JointDistribution::from_counts: no samples");
    std::vector<Cell> cells;
    cells.reserve(counts.size());
    for (const auto& [key, count] : counts)
      cells.push_back({key.first, key.second, static_cast<double>(count) / static_cast<double>(total)});
    return JointDistribution(cells);
  }

  /// Cells ordered by (m, x).
  [[nodiscard]] const std::vector<Cell>& cells() const { return cells_; }

  [[nodiscard]] std::vector<double> marginal_m() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (i == 0 || cells_[i].m != cells_[i - 1].m) out.push_back(0.0);
      out.back() += cells_[i].p;
    }
    return out;
  }

  [[nodiscard]] std::vector<double> marginal_x() const {
    std::map<std::uint64_t, double> acc;
    for (const auto& c : cells_) acc[c.x] += c.p;
    std::vector<double> out;
    out.reserve(acc.size());
    for (const auto& kv : acc) out.push_back(kv.second);
    return out;
  }

 private:
  std::vector<Cell> cells_;
};

inline double joint_entropy(const JointDistribution& joint) {
  double h = 0.0;
  for (const auto& c : joint.cells()) h -= xlog2x(c.p);
  return h;
}

/// H(X|M) = sum_m p(m) H(X | M = m).
inline double conditional_entropy(const JointDistribution& joint) {
  const auto& cells = joint.cells();
  double h = 0.0;
  std::size_t begin = 0;
  while (begin < cells.size()) {
    std::size_t end = begin;
    double pm = 0.0;
    while (end < cells.size() && cells[end].m == cells[begin].m) pm += cells[end++].p;
    if (pm > 0.0) {
      double hm = 0.0;
      for (std::size_t i = begin; i < end; ++i) hm -= xlog2x(cells[i].p / pm);
      h += pm * hm;
    }
    begin = end;
  }
  return h;
}

/// H(X|M) by the chain rule, H(X,M) - H(M). Independent of conditional_entropy().
inline double conditional_entropy_chain_rule(const JointDistribution& joint) {
  return joint_entropy(joint) - shannon_entropy(joint.marginal_m());
}

// ---------------------------------------------------------------------------
// One-qubit density matrices

struct DensityMatrix2 {
  Complex a00, a01, a10, a11;

  [[nodiscard]] std::pair<double, double> eigenvalues() const {
    const double trace = a00.real() + a11.real();
    const double diff = a00.real() - a11.real();
    const double gap = std::sqrt(diff * diff + 4.0 * std::norm(a01));
    return {(trace + gap) / 2.0, (trace - gap) / 2.0};
  }
};

/// sum_i w_i |s_i><s_i| for one-qubit states.
inline DensityMatrix2 mixture(std::span<const StateVector> states, std::span<const double> weights) {
  detail::require(states.size() == weights.size(), "mixture: one weight per state required");
  DensityMatrix2 rho{};
  for (std::size_t i = 0; i < states.size(); ++i) {
    detail::require(states[i].qubit_count() == 1, "mixture: one-qubit states only");
    const auto& s = states[i];
    rho.a00 += weights[i] * s[0] * std::conj(s[0]);
    rho.a01 += weights[i] * s[0] * std::conj(s[1]);
    rho.a10 += weights[i] * s[1] * std::conj(s[0]);
    rho.a11 += weights[i] * s[1] * std::conj(s[1]);
  }
  return rho;
}

inline double von_neumann_entropy(const DensityMatrix2& rho) {
  const auto [l0, l1] = rho.eigenvalues();
  return -xlog2x(std::clamp(l0, 0.0, 1.0)) - xlog2x(std::clamp(l1, 0.0, 1.0));
}

}  // namespace exclab
