#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "exclab/bitstring.hpp"
#include "exclab/classical.hpp"
#include "exclab/config.hpp"
#include "exclab/pbr.hpp"
#include "exclab/qcore.hpp"
#include "exclab/rng.hpp"
#include "exclab/steering.hpp"

namespace exclab::game {

enum class Strategy { quantum, classical_cover, entanglement_assisted };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::quantum: return "quantum";
    case Strategy::classical_cover: return "classical_cover";
    case Strategy::entanglement_assisted: return "entanglement_assisted";
  }
  return "?";
}

inline Strategy parse_strategy(const std::string& text) {
  if (text == "quantum") return Strategy::quantum;
  if (text == "classical_cover" || text == "classical") return Strategy::classical_cover;
  if (text == "entanglement_assisted" || text == "ea") return Strategy::entanglement_assisted;
  throw UsageError("unknown strategy '" + text + "' (expected quantum, classical_cover or entanglement_assisted)");
}

struct GameConfig {
  int n = 1;
  int m = 1;
  Strategy strategy = Strategy::quantum;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::optional<double> delta;  ///< entanglement_assisted only
  std::optional<long long> k;   ///< entanglement_assisted only; defaults to choose_k(m / n, delta)

  void validate() const {
    detail::require(n >= 1, "GameConfig: n must be at least 1");
    detail::require(m >= 1 && m <= n, "GameConfig: need 1 <= m <= n");
    detail::require(trials >= 1, "GameConfig: trials must be at least 1");
    switch (strategy) {
      case Strategy::quantum:
        detail::require_resource(m <= kMaxQubits, "GameConfig: quantum strategy needs m <= " + std::to_string(kMaxQubits));
        break;
      case Strategy::classical_cover:
        detail::require_resource(n <= classical::kMaxCoverN, "GameConfig: classical_cover strategy needs n <= 16");
        break;
      case Strategy::entanglement_assisted:
        detail::require_resource(m <= kMaxQubits, "GameConfig: entanglement_assisted needs m <= " + std::to_string(kMaxQubits));
        detail::require(delta.has_value(), "GameConfig: entanglement_assisted requires delta");
        detail::require(*delta > 0.0 && *delta < 1.0, "GameConfig: delta must lie in (0, 1)");
        detail::require(!k || *k >= 1, "GameConfig: k must be at least 1");
        break;
    }
    if (strategy != Strategy::entanglement_assisted)
      detail::require(!delta && !k, "GameConfig: delta and k apply only to entanglement_assisted");
  }

  [[nodiscard]] long long resolved_k() const {
    if (k) return *k;
    return steering::choose_k(static_cast<double>(m) / n, delta.value());
  }
};

/// Alice's message in one round.
struct Message {
  Strategy kind = Strategy::quantum;
  // quantum: Psi_x(theta) on n qubits, described rather than stored
  double theta = 0.0;
  int qubits = 0;
  // classical_cover
  std::optional<BitString> cover_string;
  std::uint32_t cover_index = 0;
  // entanglement_assisted; empty set_index means the abort symbol
  std::optional<long long> set_index;
};

struct Transcript {
  BitString x;
  SubsetY y;
  Message message;
  std::optional<BitString> answer;
  bool aborted = false;
  std::optional<bool> won;
};

struct RunStatistics {
  Strategy strategy = Strategy::quantum;
  int n = 0;
  int m = 0;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t wins = 0;
  std::uint64_t losses = 0;
  std::uint64_t aborts = 0;
  std::optional<long long> k;
  std::optional<double> delta;
  double message_bits = 0.0;          ///< qubits (quantum), bits n (cover) or log2 k (entanglement_assisted)
  std::string message_unit = "qubits";
  std::optional<int> message_bits_integral;    ///< ceil(log2 k)
  std::optional<int> message_bits_with_abort;  ///< ceil(log2(k + 1))
  std::optional<double> empirical_conditional_entropy;
  std::optional<double> exact_conditional_entropy;

  [[nodiscard]] double win_rate() const {
    const auto played = trials - aborts;
    return played == 0 ? 0.0 : static_cast<double>(wins) / static_cast<double>(played);
  }
  [[nodiscard]] double abort_rate() const { return static_cast<double>(aborts) / static_cast<double>(trials); }
  [[nodiscard]] bool zero_error() const { return losses == 0; }

  /// delta + 3 sqrt(delta (1 - delta) / trials).
  [[nodiscard]] std::optional<double> abort_rate_threshold() const {
    if (!delta) return std::nullopt;
    return *delta + 3.0 * std::sqrt(*delta * (1.0 - *delta) / static_cast<double>(trials));
  }
};

/// x uniform on {0,1}^n and, independently, y uniform over size-m subsets.
inline std::pair<BitString, SubsetY> referee_draw(int n, int m, RngStream& rng) {
  detail::require(n >= 1 && m >= 1 && m <= n, "referee_draw: need 1 <= m <= n");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
  std::uint64_t word = 0;
  for (int i = 0; i < n; ++i) {
    if (i % 64 == 0) word = rng();
    bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((word >> (i % 64)) & 1U);
  }
  // Selection sampling: keep position i with probability needed / remaining.
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(m));
  for (int i = 1; i <= n && static_cast<int>(chosen.size()) < m; ++i) {
    const auto remaining = static_cast<std::uint64_t>(n - i + 1);
    const auto needed = static_cast<std::uint64_t>(m) - chosen.size();
    if (rng.below(remaining) < needed) chosen.push_back(i);
  }
  return {BitString(std::move(bits)), SubsetY(std::move(chosen), n)};
}

/// Validated configuration plus the per-run resources every trial shares.
class Harness {
 public:
  explicit Harness(GameConfig config) : config_(std::move(config)) {
    config_.validate();
    switch (config_.strategy) {
      case Strategy::quantum:
        theta_ = pbr::theta(config_.m);
        break;
      case Strategy::classical_cover:
        cover_ = classical::build_cover_strategy(config_.n, config_.m);
        break;
      case Strategy::entanglement_assisted:
        theta_ = pbr::theta(config_.m);
        kit_ = steering::build_kit(config_.m);
        ea_ = steering::EAProtocolParameters{config_.n, config_.m, config_.resolved_k(), *config_.delta};
        ea_->validate();
        break;
    }
  }

  [[nodiscard]] const GameConfig& config() const { return config_; }
  [[nodiscard]] const std::optional<classical::CoverStrategy>& cover() const { return cover_; }
  [[nodiscard]] std::optional<long long> k() const {
    return ea_ ? std::optional<long long>(ea_->k) : std::nullopt;
  }

  /// Trial number t of the run; depends only on (seed, t).
  [[nodiscard]] Transcript trial(std::uint64_t t) const { return run_trial(RngStream(config_.seed).split(t)); }

  [[nodiscard]] Transcript run_trial(const RngStream& stream) const {
    auto referee_rng = stream.split(0);
    const auto alice_rng = stream.split(1);
    auto bob_rng = stream.split(2);
    auto [x, y] = referee_draw(config_.n, config_.m, referee_rng);
    Transcript tr{std::move(x), std::move(y), {}, std::nullopt, false, std::nullopt};
    tr.message.kind = config_.strategy;
    const auto truth = restrict(tr.x, tr.y);

    switch (config_.strategy) {
      case Strategy::quantum: {
        tr.message.theta = theta_;
        tr.message.qubits = config_.n;
        // Only the y-indexed factors of the product state reach the measurement.
        tr.answer = pbr::bob_exclude(pbr::psi_product(truth, theta_), bob_rng);
        break;
      }
      case Strategy::classical_cover: {
        const auto index = cover_->assignment[tr.x.to_index()];
        tr.message.cover_index = index;
        tr.message.cover_string = cover_->messages[index];
        tr.answer = restrict(*tr.message.cover_string, tr.y);
        break;
      }
      case Strategy::entanglement_assisted: {
        tr.message.theta = theta_;
        auto round = steering::run_steering_round(*ea_, *kit_, tr.x, alice_rng);
        tr.message.set_index = round.set_index;
        if (round.aborted()) {
          tr.aborted = true;
          return tr;
        }
        const auto& picked = tr.y.indices();
        StateVector state = round.bob_states[static_cast<std::size_t>(picked.front() - 1)];
        for (std::size_t i = 1; i < picked.size(); ++i)
          state = tensor_product(state, round.bob_states[static_cast<std::size_t>(picked[i] - 1)]);
        tr.answer = pbr::bob_exclude(state, bob_rng);
        break;
      }
    }
    tr.won = *tr.answer != truth;
    return tr;
  }

 private:
  GameConfig config_;
  double theta_ = 0.0;
  std::optional<classical::CoverStrategy> cover_;
  std::optional<steering::SteeringKit> kit_;
  std::optional<steering::EAProtocolParameters> ea_;
};

inline Transcript run_trial(const GameConfig& config, const RngStream& rng) { return Harness(config).run_trial(rng); }

struct MonteCarloResult {
  RunStatistics stats;
  std::vector<Transcript> transcripts;  ///< in trial order; empty unless requested
};

namespace detail {

struct Tally {
  std::uint64_t wins = 0;
  std::uint64_t losses = 0;
  std::uint64_t aborts = 0;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> pair_counts;  // (x, message index)
  std::vector<Transcript> transcripts;

  void add(const Transcript& tr, bool track_pairs, bool keep) {
    if (tr.aborted) {
      ++aborts;
    } else if (*tr.won) {
      ++wins;
    } else {
      ++losses;
    }
    if (track_pairs) ++pair_counts[{tr.x.to_index(), tr.message.cover_index}];
    if (keep) transcripts.push_back(tr);
  }

  void merge(Tally&& other) {
    wins += other.wins;
    losses += other.losses;
    aborts += other.aborts;
    for (const auto& [key, c] : other.pair_counts) pair_counts[key] += c;
    for (auto& tr : other.transcripts) transcripts.push_back(std::move(tr));
  }
};

}  // namespace detail

/// Runs config.trials independent trials. Trial t uses RngStream(seed).split(t)
/// and tallies merge in trial order, so the result is the same for any thread count.
inline MonteCarloResult monte_carlo(const GameConfig& config, unsigned threads = 1, bool keep_transcripts = false) {
  const Harness harness(config);
  const bool track_pairs = config.strategy == Strategy::classical_cover;
  threads = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, config.trials)));

  std::vector<detail::Tally> tallies(threads);
  auto work = [&](unsigned w) {
    const std::uint64_t begin = config.trials * w / threads;
    const std::uint64_t end = config.trials * (w + 1) / threads;
    for (std::uint64_t t = begin; t < end; ++t) tallies[w].add(harness.trial(t), track_pairs, keep_transcripts);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  detail::Tally total;
  for (auto& t : tallies) total.merge(std::move(t));

  RunStatistics stats;
  stats.strategy = config.strategy;
  stats.n = config.n;
  stats.m = config.m;
  stats.seed = config.seed;
  stats.trials = config.trials;
  stats.wins = total.wins;
  stats.losses = total.losses;
  stats.aborts = total.aborts;
  switch (config.strategy) {
    case Strategy::quantum:
      stats.message_bits = config.n;
      stats.message_unit = "qubits";
      break;
    case Strategy::classical_cover:
      stats.message_bits = config.n;
      stats.message_unit = "bits";
      stats.empirical_conditional_entropy = conditional_entropy(JointDistribution::from_counts(total.pair_counts));
      stats.exact_conditional_entropy = config.n - classical::exact_information_cost(*harness.cover());
      break;
    case Strategy::entanglement_assisted: {
      const long long k = *harness.k();
      stats.k = k;
      stats.delta = config.delta;
      stats.message_bits = steering::message_bits(k);
      stats.message_unit = "bits";
      stats.message_bits_integral = steering::message_bits_integral(k);
      stats.message_bits_with_abort = steering::message_bits_with_abort(k);
      break;
    }
  }
  return {std::move(stats), std::move(total.transcripts)};
}

}  // namespace exclab::game
