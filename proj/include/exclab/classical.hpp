#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "exclab/bitstring.hpp"
#include "exclab/config.hpp"
#include "exclab/qcore.hpp"

namespace exclab::classical {

inline constexpr int kMaxExcludedCountN = 20;
inline constexpr int kMaxOracleN = 16;
inline constexpr int kMaxCoverN = 16;
inline constexpr std::uint64_t kOracleBudget = 10'000'000;

/// Bitmask over the 2^n candidate strings, indexed by BitString::to_index().
class StringSet {
 public:
  explicit StringSet(int n) : words_(((std::size_t{1} << n) + 63) / 64) {}

  void insert(std::uint64_t x) { words_[x >> 6U] |= std::uint64_t{1} << (x & 63U); }
  [[nodiscard]] bool contains(std::uint64_t x) const { return (words_[x >> 6U] >> (x & 63U)) & 1U; }

  StringSet& operator|=(const StringSet& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
  }

  [[nodiscard]] std::uint64_t count() const {
    std::uint64_t c = 0;
    for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
  }

  /// |this OR other| without materializing the union.
  [[nodiscard]] std::uint64_t union_count(const StringSet& other) const {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += static_cast<std::uint64_t>(std::popcount(words_[i] | other.words_[i]));
    return c;
  }

 private:
  std::vector<std::uint64_t> words_;
};

/// Every x in {0,1}^n with restrict(x, y) = z.
inline StringSet strings_matching(const SubsetY& y, const BitString& z) {
  detail::require(z.size() == y.size(), "strings_matching: answer length must equal |y|");
  const int n = y.universe();
  std::uint64_t fixed_mask = 0;
  std::uint64_t base = 0;
  for (int i = 0; i < y.size(); ++i) {
    const int position = y.indices()[static_cast<std::size_t>(i)];
    const std::uint64_t bit = std::uint64_t{1} << (n - position);
    fixed_mask |= bit;
    if (z[static_cast<std::size_t>(i)]) base |= bit;
  }
  const std::uint64_t free_mask = ((n == 64 ? 0 : (std::uint64_t{1} << n)) - 1) & ~fixed_mask;
  StringSet out(n);
  std::uint64_t sub = 0;
  do {
    out.insert(base | sub);
    sub = (sub - free_mask) & free_mask;
  } while (sub != 0);
  return out;
}

/// Bob's answer for every size-m subset, in all_subsets(n, m) order.
class AnswerSet {
 public:
  AnswerSet(int n, int m, std::vector<BitString> answers) : n_(n), m_(m), answers_(std::move(answers)) {
    detail::require(m_ >= 1 && m_ <= n_, "AnswerSet: need 1 <= m <= n");
    detail::require(answers_.size() == binomial(n_, m_), "AnswerSet: one answer per subset required");
    for (const auto& z : answers_) detail::require(z.size() == m_, "AnswerSet: answers must have length m");
  }

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int m() const { return m_; }
  [[nodiscard]] const std::vector<BitString>& answers() const { return answers_; }
  [[nodiscard]] const BitString& answer(const SubsetY& y) const {
    detail::require(y.universe() == n_ && y.size() == m_, "AnswerSet::answer: subset shape mismatch");
    return answers_[subset_rank(y)];
  }

  friend bool operator==(const AnswerSet&, const AnswerSet&) = default;

 private:
  int n_;
  int m_;
  std::vector<BitString> answers_;
};

inline StringSet excluded_strings(const AnswerSet& a_set) {
  detail::require_resource(a_set.n() <= kMaxExcludedCountN, "excluded_count: n above enumeration cap of 20");
  StringSet excluded(a_set.n());
  std::size_t j = 0;
  for_each_subset(a_set.n(), a_set.m(), [&](const SubsetY& y) { excluded |= strings_matching(y, a_set.answers()[j++]); });
  return excluded;
}

/// Number of strings x that some answer rules out, i.e. restrict(x, y) = z_y for some y.
inline std::uint64_t excluded_count(const AnswerSet& a_set) { return excluded_strings(a_set).count(); }

inline AnswerSet consistent_answer_set(const BitString& a, int m) {
  std::vector<BitString> answers;
  for_each_subset(a.size(), m, [&](const SubsetY& y) { answers.push_back(restrict(a, y)); });
  return AnswerSet(a.size(), m, std::move(answers));
}

/// The string a with answers[y] = restrict(a, y) for all y, if one exists.
inline std::optional<BitString> consistent_generator(const AnswerSet& a_set) {
  std::vector<int> value(static_cast<std::size_t>(a_set.n()), -1);
  std::size_t j = 0;
  bool ok = true;
  for_each_subset(a_set.n(), a_set.m(), [&](const SubsetY& y) {
    const auto& z = a_set.answers()[j++];
    for (int i = 0; i < y.size(); ++i) {
      auto& v = value[static_cast<std::size_t>(y.indices()[static_cast<std::size_t>(i)] - 1)];
      const int bit = z[static_cast<std::size_t>(i)];
      if (v >= 0 && v != bit) ok = false;
      v = bit;
    }
  });
  if (!ok) return std::nullopt;
  std::vector<std::uint8_t> bits;
  for (int v : value) bits.push_back(static_cast<std::uint8_t>(v));
  return BitString(std::move(bits));
}

/// (2^m)^{C(n,m)}, saturating at UINT64_MAX.
inline std::uint64_t oracle_enumeration_size(int n, int m) {
  const auto subsets = binomial(n, m);
  unsigned __int128 size = 1;
  for (std::uint64_t i = 0; i < subsets; ++i) {
    size <<= static_cast<unsigned>(m);
    if (size > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(size);
}

struct OracleResult {
  std::uint64_t min_count;
  AnswerSet witness;
  std::uint64_t enumeration_size;
  std::uint64_t leaves_visited;  ///< complete answer sets scored
  std::uint64_t subtrees_pruned;
};

namespace detail {

struct OracleSearch {
  const std::vector<std::vector<StringSet>>& masks;  // [subset][answer]
  std::vector<StringSet> partial;                    // running union per depth
  std::vector<std::uint32_t> choice;
  std::vector<std::uint32_t> best_choice;
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t leaves = 0;
  std::uint64_t pruned = 0;

  void descend(std::size_t depth) {
    const auto options = static_cast<std::uint32_t>(masks[depth].size());
    for (std::uint32_t z = 0; z < options; ++z) {
      partial[depth + 1] = partial[depth];
      partial[depth + 1] |= masks[depth][z];
      choice[depth] = z;
      const auto c = partial[depth + 1].count();
      if (depth + 1 == masks.size()) {
        ++leaves;
        if (c < best) {
          best = c;
          best_choice = choice;
        }
      } else if (c >= best) {
        ++pruned;  // unions only grow, so no completion can do strictly better
      } else {
        descend(depth + 1);
      }
    }
  }
};

}  // namespace detail

/// Exhaustive minimum of excluded_count over all answer sets for (n, m).
///
/// The witness is the lexicographically first minimizer (answers ordered by
/// subset, each answer read as an integer). Work is split on the first
/// subset's answer; per-branch minima merge by (count, branch), so the result
/// does not depend on the thread count.
inline OracleResult brute_force_min_exclusion(int n, int m, unsigned threads = 1) {
  exclab::detail::require(m >= 1 && m <= n, "brute_force_min_exclusion: need 1 <= m <= n");
  const auto size = oracle_enumeration_size(n, m);
  if (n > kMaxOracleN || size > kOracleBudget) {
    const std::string size_text = "(2^" + std::to_string(m) + ")^" + std::to_string(binomial(n, m)) +
                                  (size == std::numeric_limits<std::uint64_t>::max() ? std::string(" > 2^64")
                                                                                     : " = " + std::to_string(size));
    throw ResourceError("oracle enumeration size " + size_text + " exceeds budget of " +
                        std::to_string(kOracleBudget) + " answer sets (n <= " + std::to_string(kMaxOracleN) + ")");
  }

  const auto subsets = all_subsets(n, m);
  std::vector<std::vector<StringSet>> masks;
  masks.reserve(subsets.size());
  for (const auto& y : subsets) {
    std::vector<StringSet> row;
    for (std::uint64_t z = 0; z < (std::uint64_t{1} << m); ++z) row.push_back(strings_matching(y, BitString::from_index(z, m)));
    masks.push_back(std::move(row));
  }

  const auto branches = static_cast<std::uint32_t>(masks.front().size());
  std::vector<detail::OracleSearch> searches;
  searches.reserve(branches);
  for (std::uint32_t b = 0; b < branches; ++b) {
    detail::OracleSearch s{masks, std::vector<StringSet>(masks.size() + 1, StringSet(n)),
                           std::vector<std::uint32_t>(masks.size()), {}};
    s.partial[1] = masks[0][b];
    s.choice[0] = b;
    searches.push_back(std::move(s));
  }
  auto run_branch = [&](std::uint32_t b) {
    auto& s = searches[b];
    if (masks.size() == 1) {
      s.leaves = 1;
      s.best = s.partial[1].count();
      s.best_choice = s.choice;
    } else {
      s.descend(1);
    }
  };

  threads = std::max(1U, std::min(threads, branches));
  if (threads == 1) {
    for (std::uint32_t b = 0; b < branches; ++b) run_branch(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::uint32_t b = t; b < branches; b += threads) run_branch(b);
      });
    for (auto& th : pool) th.join();
  }

  std::uint32_t winner = 0;
  std::uint64_t leaves = 0;
  std::uint64_t pruned = 0;
  for (std::uint32_t b = 0; b < branches; ++b) {
    leaves += searches[b].leaves;
    pruned += searches[b].pruned;
    if (searches[b].best < searches[winner].best) winner = b;
  }
  std::vector<BitString> answers;
  for (auto z : searches[winner].best_choice) answers.push_back(BitString::from_index(z, m));
  return {searches[winner].best, AnswerSet(n, m, std::move(answers)), size, leaves, pruned};
}

/// True iff a and x agree on at most m - 1 positions, so every size-m subset sees a disagreement.
inline bool is_valid_message(const BitString& a, const BitString& x, int m) {
  return hamming_distance(a, x) >= x.size() - m + 1;
}

/// Deterministic zero-error protocol: x is sent as messages[assignment[x]], Bob answers restrict(message, y).
struct CoverStrategy {
  int n = 0;
  int m = 0;
  std::vector<BitString> messages;
  std::vector<std::uint32_t> assignment;  ///< indexed by x.to_index()

  [[nodiscard]] const BitString& message_for(const BitString& x) const { return messages[assignment[x.to_index()]]; }

  void validate() const {
    exclab::detail::require(assignment.size() == (std::size_t{1} << n), "CoverStrategy: assignment must be total");
    for (std::uint64_t x = 0; x < assignment.size(); ++x) {
      exclab::detail::require(assignment[x] < messages.size(), "CoverStrategy: message index out of range");
      exclab::detail::require(is_valid_message(messages[assignment[x]], BitString::from_index(x, n), m),
                              "CoverStrategy: invalid message for x = " + BitString::from_index(x, n).str());
    }
  }
};

/// Greedy set cover over candidate messages a, each covering the strings x it is valid for.
/// Ties go to the smallest a; each x is assigned the first chosen message covering it.
inline CoverStrategy build_cover_strategy(int n, int m) {
  exclab::detail::require(m >= 1 && m <= n, "build_cover_strategy: need 1 <= m <= n");
  exclab::detail::require_resource(n <= kMaxCoverN, "build_cover_strategy: n above cap of 16");
  const std::uint64_t total = std::uint64_t{1} << n;
  const int min_distance = n - m + 1;

  std::vector<std::uint64_t> ball;  // flip patterns e with a ^ e valid
  for (std::uint64_t e = 0; e < total; ++e)
    if (std::popcount(e) >= min_distance) ball.push_back(e);

  std::vector<std::int64_t> gain(total, static_cast<std::int64_t>(ball.size()));
  std::vector<bool> covered(total, false);
  std::priority_queue<std::pair<std::int64_t, std::int64_t>> heap;  // (gain, -a)
  for (std::uint64_t a = 0; a < total; ++a) heap.emplace(gain[a], -static_cast<std::int64_t>(a));

  CoverStrategy strategy{n, m, {}, std::vector<std::uint32_t>(total, 0)};
  std::uint64_t uncovered = total;
  while (uncovered > 0) {
    const auto [stored, neg_a] = heap.top();
    heap.pop();
    const auto a = static_cast<std::uint64_t>(-neg_a);
    if (stored != gain[a]) {
      if (gain[a] > 0) heap.emplace(gain[a], neg_a);
      continue;
    }
    const auto index = static_cast<std::uint32_t>(strategy.messages.size());
    strategy.messages.push_back(BitString::from_index(a, n));
    for (auto e : ball) {
      const auto x = a ^ e;
      if (covered[x]) continue;
      covered[x] = true;
      strategy.assignment[x] = index;
      --uncovered;
      for (auto f : ball) --gain[x ^ f];
    }
  }
  return strategy;
}

/// n - H(X | M) with X uniform on {0,1}^n and M the assigned message.
inline double exact_information_cost(const CoverStrategy& strategy) {
  const std::uint64_t total = std::uint64_t{1} << strategy.n;
  const double p = 1.0 / static_cast<double>(total);
  std::vector<JointDistribution::Cell> cells;
  cells.reserve(total);
  for (std::uint64_t x = 0; x < total; ++x) cells.push_back({x, strategy.assignment[x], p});
  return static_cast<double>(strategy.n) - conditional_entropy(JointDistribution(cells));
}

}  // namespace exclab::classical
