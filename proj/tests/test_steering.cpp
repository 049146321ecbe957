#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "exclab/steering.hpp"

using namespace exclab;
using namespace exclab::steering;

namespace {

/// A non-aborted round, retrying on fresh substreams if a set search aborts.
SteeringRound steered_round(const EAProtocolParameters& p, const SteeringKit& kit, const BitString& x, RngStream& rng) {
  for (;;) {
    auto round = run_steering_round(p, kit, x, rng.split(rng()));
    if (!round.aborted()) return round;
  }
}

}  // namespace

TEST(SteeringKit, Invariants) {
  for (int m = 1; m <= 64; ++m) {
    const auto kit = build_kit(m);
    const double t = pbr::theta(m);
    const double ratio = std::cos(t) / (1 + std::sin(t));
    EXPECT_NEAR(kit.phi_ab.norm(), 1.0, 1e-12);
    EXPECT_NEAR(kit.phi_ab[0].real(), std::sqrt(0.5 * (1 + ratio)), 1e-12);
    EXPECT_NEAR(kit.phi_ab[3].real(), std::sqrt(0.5 * (1 - ratio)), 1e-12);
    EXPECT_EQ(kit.phi_ab[1], Complex(0));
    EXPECT_EQ(kit.phi_ab[2], Complex(0));
    for (const auto* meas : {&kit.meas_S, &kit.meas_R}) {
      EXPECT_LT(std::abs(inner_product(meas->outcome(0), meas->outcome(1))), 1e-12);
      EXPECT_LT(meas->completeness_residual(), 1e-10);
    }
  }
  EXPECT_THROW(build_kit(0), UsageError);
}

TEST(SteeringKit, CoefficientAtTwo) {
  // 2 atan(sqrt2 - 1) = pi/4; sqrt((1 + cos/(1 + sin)) / 2) = 0.84089641525...
  EXPECT_NEAR(build_kit(2).phi_ab[0].real(), 0.8408964152537145, 1e-12);
}

TEST(SteeringKit, ProofIdentities) {
  for (int m = 1; m <= 64; ++m) {
    const double t = pbr::theta(m);
    EXPECT_NEAR(std::sqrt(1 + std::sin(t)) * 0.5 * (1 + std::cos(t) / (1 + std::sin(t))), std::cos(t / 2), 1e-12) << m;
    const auto [a, b] = pair_coefficients(t);
    // The s_1 branch leaves Bob with (b a, -a b): equal magnitudes, i.e. |->.
    const auto bob = StateVector::normalized({b * a, -a * b});
    EXPECT_NEAR(std::abs(bob[0]), std::numbers::sqrt2 / 2, 1e-12);
    EXPECT_NEAR(std::abs(bob[1]), std::numbers::sqrt2 / 2, 1e-12);
  }
}

TEST(SteeringBranches, ExactProbabilitiesAndFidelities) {
  for (int m = 1; m <= 32; ++m) {
    const auto kit = build_kit(m);
    const double s = std::sin(kit.theta);
    for (int bit = 0; bit < 2; ++bit) {
      const auto br = steering_branches(kit.phi_ab, kit.measurement_for(bit));
      EXPECT_NEAR(br.probability[0], 1 / (1 + s), 1e-12) << m;
      EXPECT_NEAR(br.probability[1], s / (1 + s), 1e-12) << m;
      for (int outcome = 0; outcome < 2; ++outcome)
        EXPECT_NEAR(fidelity(*br.bob_state[static_cast<std::size_t>(outcome)], kit.target(bit, outcome)), 1.0, 1e-12)
            << "m=" << m << " bit=" << bit << " outcome=" << outcome;
    }
  }
}

TEST(SteerOne, Examples) {
  const auto kit = build_kit(3);
  RngStream rng(10);
  bool saw[2][2] = {};
  for (int i = 0; i < 2000; ++i) {
    for (int bit = 0; bit < 2; ++bit) {
      const auto r = steer_one(kit, bit, rng);
      saw[bit][r.outcome] = true;
      EXPECT_NEAR(fidelity(r.bob_state, kit.target(bit, r.outcome)), 1.0, 1e-12);
    }
  }
  EXPECT_TRUE(saw[0][0] && saw[0][1] && saw[1][0] && saw[1][1]);
  EXPECT_THROW(steer_one(kit, 2, rng), UsageError);
}

TEST(SteerOne, OutcomeFrequency) {
  for (int m : {1, 2, 5}) {
    const auto kit = build_kit(m);
    const double p = p_steer(m);
    RngStream rng(100 + m);
    const int trials = 100000;
    int zeros = 0;
    for (int i = 0; i < trials; ++i) zeros += steer_one(kit, i % 2, rng).outcome == 0;
    EXPECT_NEAR(static_cast<double>(zeros) / trials, p, 3 * std::sqrt(p * (1 - p) / trials)) << m;
  }
}

TEST(SteerProbabilities, Examples) {
  EXPECT_NEAR(p_steer(1), 0.5, 1e-15);
  EXPECT_NEAR(p_steer(2), 0.5857864376269050, 1e-15);
  for (int m = 1; m < 100; ++m) EXPECT_LT(p_steer(m), p_steer(m + 1));
  EXPECT_GT(p_steer(100000), 0.9999);
  EXPECT_NEAR(p_global_steer(1, 1), 0.5, 1e-15);
}

TEST(SteerProbabilities, ClosedFormAgrees) {
  for (int m = 1; m <= 200; m += 7)
    for (long long n : {1LL, 2LL, 10LL, 1000LL, 100000LL}) {
      const double a = p_global_steer(n, m);
      const double b = p_global_steer_closed_form(n, m);
      EXPECT_LE(std::abs(a - b), 1e-12 * std::max(a, 1e-300) + 1e-300) << n << "," << m;
    }
}

TEST(SteerProbabilities, AlphaOneApproachesQuarter) {
  double prev = 1.0;
  for (long long n : {10LL, 100LL, 1000LL, 10000LL}) {
    const double p = p_global_steer(n, static_cast<int>(n));
    EXPECT_GE(p, 0.25);
    EXPECT_LT(p, prev);
    prev = p;
  }
  EXPECT_NEAR(prev, 0.25, 1e-3);
  for (long long n : {10LL, 100LL, 1000LL}) EXPECT_GE(p_global_steer(n, static_cast<int>(n / 2)), 0.0625);
}

TEST(SteerProbabilities, BoundWhenAlphaNIsIntegral) {
  for (int inv : {1, 2, 4}) {
    const double bound = std::pow(4.0, -inv);
    double prev = 1.0;
    for (long long m = 1; m * inv <= 100000; m += (m < 1000 ? 1 : 97)) {
      const double p = p_global_steer(m * inv, static_cast<int>(m));
      EXPECT_GE(p, bound - 1e-12) << "alpha=1/" << inv << " m=" << m;
      EXPECT_LE(p, prev + 1e-15);
      prev = p;
    }
  }
}

TEST(SteerProbabilities, EffectiveAlphaBound) {
  // For any n and m, p_steer(m)^m >= 1/4, so p_global_steer(n, m) >= 4^{-n/m}.
  for (long long n = 1; n <= 3000; n += 13)
    for (long long m = 1; m <= n; m += 1 + m / 5)
      EXPECT_GE(p_global_steer(n, static_cast<int>(m)), std::pow(4.0, -static_cast<double>(n) / m) * (1 - 1e-12));
}

TEST(Abort, Examples) {
  EXPECT_NEAR(p_abort(1, 1, 1), 0.5, 1e-15);
  EXPECT_LE(p_abort(100, 100, 11), 0.04223513603210449);
  EXPECT_NEAR(std::pow(set_failure_bound(1.0), 11), 0.04223513603210449, 1e-15);
  for (long long k = 1; k < 40; ++k) EXPECT_LT(p_abort(20, 5, k + 1), p_abort(20, 5, k));
  EXPECT_THROW(p_abort(1, 1, 0), UsageError);
}

TEST(ChooseK, Examples) {
  EXPECT_EQ(choose_k(1.0, 0.05), 11);
  EXPECT_EQ(choose_k(1.0, 0.75), 1);
  EXPECT_EQ(choose_k(0.5, 0.5), 11);
  EXPECT_GT(std::pow(0.75, 10), 0.05);
  EXPECT_THROW(choose_k(0.0, 0.5), UsageError);
  EXPECT_THROW(choose_k(0.5, 1.0), UsageError);
}

TEST(ChooseK, MinimalAndMeetsBudget) {
  RngStream rng(44);
  for (int trial = 0; trial < 500; ++trial) {
    const double alpha = 0.05 + 0.95 * rng.uniform();
    const double delta = 1e-6 + (1 - 2e-6) * rng.uniform();
    const auto k = choose_k(alpha, delta);
    const double fail = set_failure_bound(alpha);
    EXPECT_LE(std::pow(fail, static_cast<double>(k)), delta);
    if (k > 1) {
      EXPECT_GT(std::pow(fail, static_cast<double>(k - 1)), delta);
    }
  }
}

TEST(ChooseK, AbortBudgetIndependentOfN) {
  for (int inv : {1, 2, 4})
    for (double delta : {0.01, 0.05, 0.3}) {
      const auto k = choose_k(1.0 / inv, delta);
      for (long long m = 1; m <= 20000; m += 1 + m / 3) EXPECT_LE(p_abort(m * inv, static_cast<int>(m), k), delta);
    }
}

TEST(MessageAccounting, Bits) {
  EXPECT_NEAR(message_bits(11), 3.4594316186372973, 1e-15);
  EXPECT_EQ(message_bits_integral(11), 4);
  EXPECT_EQ(message_bits_with_abort(11), 4);
  EXPECT_EQ(message_bits_integral(1), 0);
  EXPECT_EQ(message_bits_with_abort(1), 1);
  EXPECT_EQ(message_bits_with_abort(15), 4);
  EXPECT_EQ(message_bits_with_abort(16), 5);
  EXPECT_EQ(EAProtocolParameters::with_chosen_k(8, 8, 0.05).k, 11);
  EXPECT_EQ(EAProtocolParameters::with_chosen_k(4, 4, 0.05).k, 11);
}

TEST(SteeringRound, NonAbortedStatesMatchTargets) {
  const EAProtocolParameters p{6, 3, 20, 0.05};
  const auto kit = build_kit(3);
  RngStream rng(77);
  int rounds = 0;
  for (int i = 0; i < 500; ++i) {
    const auto x = BitString::from_index(rng.below(64), 6);
    const auto round = run_steering_round(p, kit, x, rng.split(static_cast<std::uint64_t>(i)));
    if (round.aborted()) continue;
    ++rounds;
    ASSERT_EQ(round.bob_states.size(), 6U);
    for (int j = 1; j <= 6; ++j)
      EXPECT_NEAR(fidelity(round.bob_states[static_cast<std::size_t>(j - 1)], pbr::psi(x.at(j), kit.theta)), 1.0, 1e-12);
  }
  EXPECT_GT(rounds, 400);
}

TEST(SteeringRound, SingleSetAbortsHalfTheTime) {
  const EAProtocolParameters p{1, 1, 1, 0.5};
  const auto kit = build_kit(1);
  RngStream rng(9);
  const int trials = 10000;
  int aborts = 0;
  for (int i = 0; i < trials; ++i)
    aborts += run_steering_round(p, kit, BitString::from_index(rng.below(2), 1), rng.split(static_cast<std::uint64_t>(i))).aborted();
  EXPECT_NEAR(static_cast<double>(aborts) / trials, 0.5, 3 * std::sqrt(0.25 / trials));
}

TEST(SteeringRound, AbortFrequencyWithinBudget) {
  const auto p = EAProtocolParameters::with_chosen_k(8, 8, 0.05);
  const auto kit = build_kit(8);
  RngStream rng(31);
  const int trials = 10000;
  int aborts = 0;
  for (int i = 0; i < trials; ++i)
    aborts += run_steering_round(p, kit, BitString::from_index(rng.below(256), 8), rng.split(static_cast<std::uint64_t>(i))).aborted();
  EXPECT_LE(static_cast<double>(aborts) / trials, 0.05 + 3 * std::sqrt(0.05 * 0.95 / trials));
}

TEST(SteeringRound, Validation) {
  const auto kit = build_kit(2);
  const RngStream rng(1);
  EXPECT_THROW(run_steering_round({3, 2, 0, 0.1}, kit, BitString::zeros(3), rng), UsageError);
  EXPECT_THROW(run_steering_round({3, 2, 2, 0.1}, kit, BitString::zeros(4), rng), UsageError);
  EXPECT_THROW(run_steering_round({3, 3, 2, 0.1}, kit, BitString::zeros(3), rng), UsageError);
}

TEST(EndToEnd, ExclusionOnSteeredStatesIsZeroErrorExhaustive) {
  RngStream rng(2025);
  for (int n = 1; n <= 6; ++n)
    for (int m = 1; m <= std::min(n, 4); ++m) {
      const EAProtocolParameters p{n, m, 64, 0.05};
      const auto kit = build_kit(m);
      const auto subsets = all_subsets(n, m);
      for (std::uint64_t xv = 0; xv < (std::uint64_t{1} << n); ++xv) {
        const auto x = BitString::from_index(xv, n);
        for (const auto& y : subsets) {
          const auto round = steered_round(p, kit, x, rng);
          StateVector state = round.bob_states[static_cast<std::size_t>(y.indices()[0] - 1)];
          for (std::size_t i = 1; i < y.indices().size(); ++i)
            state = tensor_product(state, round.bob_states[static_cast<std::size_t>(y.indices()[i] - 1)]);
          EXPECT_LT(pbr::exclusion_probabilities(state)[restrict(x, y).to_index()], 1e-20);
          for (int rep = 0; rep < 4; ++rep) ASSERT_NE(pbr::bob_exclude(state, rng), restrict(x, y));
        }
      }
    }
}

TEST(EndToEnd, RandomTrialsAtTen) {
  const int n = 10;
  RngStream rng(4242);
  const auto kits = [] {
    std::vector<SteeringKit> v;
    for (int m = 1; m <= 10; ++m) v.push_back(build_kit(m));
    return v;
  }();
  for (int trial = 0; trial < 10000; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(10));
    const auto& kit = kits[static_cast<std::size_t>(m - 1)];
    const auto p = EAProtocolParameters{n, m, 200, 0.05};
    const auto x = BitString::from_index(rng.below(1024), n);
    const auto round = steered_round(p, kit, x, rng);
    std::vector<int> chosen;
    for (int i = 1; i <= n; ++i)
      if (static_cast<int>(chosen.size()) < m && rng.below(static_cast<std::uint64_t>(n - i + 1)) < static_cast<std::uint64_t>(m) - chosen.size())
        chosen.push_back(i);
    const SubsetY y(chosen, n);
    StateVector state = round.bob_states[static_cast<std::size_t>(chosen[0] - 1)];
    for (std::size_t i = 1; i < chosen.size(); ++i) state = tensor_product(state, round.bob_states[static_cast<std::size_t>(chosen[i] - 1)]);
    ASSERT_NE(pbr::bob_exclude(state, rng), restrict(x, y)) << "trial " << trial;
  }
}
