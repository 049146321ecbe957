#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "exclab/game.hpp"

using namespace exclab;
using namespace exclab::game;

namespace {

GameConfig config(int n, int m, Strategy s, std::uint64_t trials, std::uint64_t seed) {
  GameConfig c;
  c.n = n;
  c.m = m;
  c.strategy = s;
  c.trials = trials;
  c.seed = seed;
  return c;
}

GameConfig ea_config(int n, int m, std::uint64_t trials, std::uint64_t seed, double delta) {
  auto c = config(n, m, Strategy::entanglement_assisted, trials, seed);
  c.delta = delta;
  return c;
}

bool same(const Transcript& a, const Transcript& b) {
  return a.x == b.x && a.y.indices() == b.y.indices() && a.answer == b.answer && a.aborted == b.aborted &&
         a.won == b.won && a.message.set_index == b.message.set_index && a.message.cover_index == b.message.cover_index;
}

}  // namespace

TEST(Strategy, Names) {
  EXPECT_EQ(parse_strategy("quantum"), Strategy::quantum);
  EXPECT_EQ(parse_strategy("classical"), Strategy::classical_cover);
  EXPECT_EQ(parse_strategy("entanglement_assisted"), Strategy::entanglement_assisted);
  EXPECT_EQ(to_string(Strategy::classical_cover), "classical_cover");
  EXPECT_THROW(parse_strategy("psychic"), UsageError);
}

TEST(GameConfig, Validation) {
  EXPECT_NO_THROW(config(8, 4, Strategy::quantum, 1, 0).validate());
  EXPECT_THROW(config(8, 9, Strategy::quantum, 1, 0).validate(), UsageError);
  EXPECT_THROW(config(8, 4, Strategy::quantum, 0, 0).validate(), UsageError);
  EXPECT_THROW(config(20, 15, Strategy::quantum, 1, 0).validate(), ResourceError);
  EXPECT_THROW(config(17, 2, Strategy::classical_cover, 1, 0).validate(), ResourceError);
  EXPECT_THROW(config(8, 8, Strategy::entanglement_assisted, 1, 0).validate(), UsageError);
  auto q = config(8, 4, Strategy::quantum, 1, 0);
  q.delta = 0.1;
  EXPECT_THROW(q.validate(), UsageError);
  EXPECT_EQ(ea_config(8, 8, 1, 0, 0.05).resolved_k(), 11);
  EXPECT_THROW(ea_config(8, 8, 1, 0, 1.5).validate(), UsageError);
}

TEST(RefereeDraw, SingleBit) {
  RngStream rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(referee_draw(1, 1, rng).second.indices(), std::vector<int>{1});
}

TEST(RefereeDraw, UniformSubsetsAndBits) {
  RngStream rng(2);
  const int trials = 100000;
  std::map<std::vector<int>, int> subsets;
  int ones[3] = {};
  for (int i = 0; i < trials; ++i) {
    const auto [x, y] = referee_draw(3, 2, rng);
    ++subsets[y.indices()];
    for (int j = 1; j <= 3; ++j) ones[j - 1] += x.at(j);
  }
  ASSERT_EQ(subsets.size(), 3U);
  const double p = 1.0 / 3;
  for (const auto& [y, c] : subsets) EXPECT_NEAR(static_cast<double>(c) / trials, p, 3 * std::sqrt(p * (1 - p) / trials));
  for (int c : ones) EXPECT_NEAR(static_cast<double>(c) / trials, 0.5, 3 * std::sqrt(0.25 / trials));
}

TEST(RefereeDraw, AllSubsetsReachableForLargerN) {
  RngStream rng(3);
  std::set<std::vector<int>> seen;
  for (int i = 0; i < 5000; ++i) seen.insert(referee_draw(6, 3, rng).second.indices());
  EXPECT_EQ(seen.size(), 20U);
}

TEST(RunTrial, QuantumAnswersAvoidTruth) {
  // With x = 001 and y = {1,3}, restrict(x, y) = 01, so Bob must say 00, 10 or 11.
  const auto state = pbr::psi_product(restrict(BitString::parse("001"), SubsetY({1, 3}, 3)), pbr::theta(2));
  RngStream rng(6);
  std::set<std::string> answers;
  for (int i = 0; i < 2000; ++i) answers.insert(pbr::bob_exclude(state, rng).str());
  EXPECT_EQ(answers, (std::set<std::string>{"00", "10", "11"}));

  const Harness h(config(3, 2, Strategy::quantum, 1, 0));
  for (std::uint64_t t = 0; t < 500; ++t) {
    const auto tr = h.trial(t);
    EXPECT_EQ(tr.message.qubits, 3);
    EXPECT_FALSE(tr.aborted);
    EXPECT_TRUE(*tr.won);
    EXPECT_NE(*tr.answer, restrict(tr.x, tr.y));
  }
}

TEST(RunTrial, ClassicalCoverAlwaysWins) {
  const Harness h(config(6, 3, Strategy::classical_cover, 1, 0));
  for (std::uint64_t t = 0; t < 500; ++t) {
    const auto tr = h.trial(t);
    EXPECT_TRUE(*tr.won);
    EXPECT_EQ(*tr.message.cover_string, h.cover()->message_for(tr.x));
    EXPECT_EQ(*tr.answer, restrict(*tr.message.cover_string, tr.y));
  }
  const auto tr = run_trial(config(4, 2, Strategy::classical_cover, 1, 0), RngStream(5));
  EXPECT_TRUE(*tr.won);
}

TEST(RunTrial, EntanglementAssistedNonAbortedAlwaysWin) {
  const Harness h(ea_config(8, 8, 1, 3, 0.05));
  int aborted = 0;
  for (std::uint64_t t = 0; t < 2000; ++t) {
    const auto tr = h.trial(t);
    if (tr.aborted) {
      ++aborted;
      EXPECT_FALSE(tr.answer.has_value());
      EXPECT_FALSE(tr.won.has_value());
      EXPECT_FALSE(tr.message.set_index.has_value());
    } else {
      EXPECT_TRUE(*tr.won);
      EXPECT_LT(*tr.message.set_index, 11);
    }
  }
  EXPECT_LT(aborted, 200);
}

TEST(MonteCarlo, QuantumZeroError) {
  const auto r = monte_carlo(config(8, 4, Strategy::quantum, 10000, 42));
  EXPECT_EQ(r.stats.wins, 10000U);
  EXPECT_EQ(r.stats.aborts, 0U);
  EXPECT_EQ(r.stats.losses, 0U);
  EXPECT_DOUBLE_EQ(r.stats.win_rate(), 1.0);
  EXPECT_DOUBLE_EQ(r.stats.message_bits, 8.0);
  EXPECT_EQ(r.stats.message_unit, "qubits");
}

TEST(MonteCarlo, EntanglementAssistedAbortRateAndCost) {
  for (int n : {4, 8}) {
    const auto r = monte_carlo(ea_config(n, n, 10000, 7, 0.05));
    EXPECT_EQ(*r.stats.k, 11);
    EXPECT_LE(r.stats.abort_rate(), *r.stats.abort_rate_threshold());
    EXPECT_EQ(r.stats.losses, 0U);
    EXPECT_DOUBLE_EQ(r.stats.win_rate(), 1.0);
    EXPECT_NEAR(r.stats.message_bits, 3.4594316186372973, 1e-15);
    EXPECT_EQ(*r.stats.message_bits_integral, 4);
    EXPECT_EQ(*r.stats.message_bits_with_abort, 4);
    EXPECT_EQ(r.stats.wins + r.stats.aborts, r.stats.trials);
  }
}

TEST(MonteCarlo, ClassicalMessageCost) {
  const auto r = monte_carlo(config(5, 3, Strategy::classical_cover, 2000, 1));
  EXPECT_EQ(r.stats.message_unit, "bits");
  EXPECT_DOUBLE_EQ(r.stats.message_bits, 5.0);
  EXPECT_EQ(r.stats.wins, 2000U);
}

TEST(MonteCarlo, SingleTrialStatisticsMatchTranscript) {
  for (auto s : {Strategy::quantum, Strategy::classical_cover}) {
    const auto r = monte_carlo(config(4, 2, s, 1, 11), 1, true);
    ASSERT_EQ(r.transcripts.size(), 1U);
    const auto& tr = r.transcripts[0];
    EXPECT_EQ(r.stats.trials, 1U);
    EXPECT_EQ(r.stats.wins, *tr.won ? 1U : 0U);
    EXPECT_EQ(r.stats.aborts, 0U);
    EXPECT_TRUE(same(tr, Harness(config(4, 2, s, 1, 11)).trial(0)));
  }
  const auto r = monte_carlo(ea_config(1, 1, 1, 0, 0.6), 1, true);
  EXPECT_EQ(r.stats.aborts + r.stats.wins, 1U);
  EXPECT_EQ(r.stats.aborts == 1, r.transcripts[0].aborted);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
  for (const auto& c : {config(6, 3, Strategy::quantum, 3001, 5), config(6, 3, Strategy::classical_cover, 3001, 5),
                        ea_config(6, 3, 3001, 5, 0.1)}) {
    const auto one = monte_carlo(c, 1, true);
    const auto four = monte_carlo(c, 4, true);
    EXPECT_EQ(one.stats.wins, four.stats.wins);
    EXPECT_EQ(one.stats.aborts, four.stats.aborts);
    ASSERT_EQ(one.transcripts.size(), four.transcripts.size());
    for (std::size_t i = 0; i < one.transcripts.size(); ++i) ASSERT_TRUE(same(one.transcripts[i], four.transcripts[i])) << i;
    if (one.stats.empirical_conditional_entropy) {
      EXPECT_DOUBLE_EQ(*one.stats.empirical_conditional_entropy, *four.stats.empirical_conditional_entropy);
    }
  }
}

TEST(MonteCarlo, SeedDeterminism) {
  const auto a = monte_carlo(config(5, 2, Strategy::quantum, 500, 99), 1, true);
  const auto b = monte_carlo(config(5, 2, Strategy::quantum, 500, 99), 1, true);
  const auto c = monte_carlo(config(5, 2, Strategy::quantum, 500, 100), 1, true);
  bool differs = false;
  for (std::size_t i = 0; i < a.transcripts.size(); ++i) {
    EXPECT_TRUE(same(a.transcripts[i], b.transcripts[i]));
    differs = differs || !same(a.transcripts[i], c.transcripts[i]);
  }
  EXPECT_TRUE(differs);
}

TEST(MonteCarlo, EmpiricalConditionalEntropyTracksExact) {
  for (auto [n, m] : {std::pair{4, 2}, std::pair{6, 3}, std::pair{8, 4}, std::pair{8, 6}}) {
    const auto r = monte_carlo(config(n, m, Strategy::classical_cover, 100000, 2024), 2);
    ASSERT_TRUE(r.stats.empirical_conditional_entropy && r.stats.exact_conditional_entropy);
    EXPECT_NEAR(*r.stats.empirical_conditional_entropy, *r.stats.exact_conditional_entropy, 0.05) << n << "," << m;
    EXPECT_NEAR(*r.stats.exact_conditional_entropy, n - classical::exact_information_cost(classical::build_cover_strategy(n, m)), 1e-12);
  }
}
