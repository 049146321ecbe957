#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "exclab/config.hpp"

namespace exclab {

/// An n-bit string. Position 1 is the leftmost bit and, when the string is
/// read as a basis index, the most significant one.
class BitString {
 public:
  BitString() = default;

  explicit BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) detail::require(b <= 1, "BitString: bits must be 0 or 1");
  }

  /// Parses "0110"-style text.
  static BitString parse(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
      detail::require(c == '0' || c == '1', "BitString: invalid character in '" + std::string(text) + "'");
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return BitString(std::move(bits));
  }

  static BitString zeros(int n) { return BitString(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0)); }

  /// Inverse of to_index() for a length-n string.
  static BitString from_index(std::uint64_t index, int n) {
    detail::require(n >= 0 && n <= 64, "BitString::from_index: length must be in [0, 64]");
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) bits[static_cast<std::size_t>(i)] = (index >> (n - 1 - i)) & 1U;
    return BitString(std::move(bits));
  }

  [[nodiscard]] int size() const { return static_cast<int>(bits_.size()); }
  [[nodiscard]] bool empty() const { return bits_.empty(); }

  /// 1-indexed access.
  [[nodiscard]] int at(int position) const {
    detail::require(position >= 1 && position <= size(), "BitString::at: position out of range");
    return bits_[static_cast<std::size_t>(position - 1)];
  }

  /// 0-indexed access, unchecked.
  [[nodiscard]] int operator[](std::size_t i) const { return bits_[i]; }

  [[nodiscard]] std::uint64_t to_index() const {
    detail::require(size() <= 64, "BitString::to_index: string longer than 64 bits");
    std::uint64_t value = 0;
    for (auto b : bits_) value = (value << 1U) | b;
    return value;
  }

  [[nodiscard]] BitString complement() const {
    auto flipped = bits_;
    for (auto& b : flipped) b ^= 1U;
    return BitString(std::move(flipped));
  }

  [[nodiscard]] std::string str() const {
    std::string out;
    out.reserve(bits_.size());
    for (auto b : bits_) out.push_back(static_cast<char>('0' + b));
    return out;
  }

  [[nodiscard]] const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const BitString&, const BitString&) = default;
  friend auto operator<=>(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

inline int hamming_distance(const BitString& a, const BitString& b) {
  detail::require(a.size() == b.size(), "hamming_distance: length mismatch");
  int d = 0;
  for (std::size_t i = 0; i < a.bits().size(); ++i) d += a[i] != b[i];
  return d;
}

/// A nonempty, strictly increasing set of 1-based indices into an n-bit string.
class SubsetY {
 public:
  SubsetY(std::vector<int> indices, int n) : indices_(std::move(indices)), n_(n) {
    detail::require(!indices_.empty(), "SubsetY: subset must be nonempty");
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      detail::require(indices_[i] >= 1 && indices_[i] <= n_, "SubsetY: index out of range [1, n]");
      detail::require(i == 0 || indices_[i - 1] < indices_[i], "SubsetY: indices must be strictly increasing");
    }
  }

  [[nodiscard]] int size() const { return static_cast<int>(indices_.size()); }
  [[nodiscard]] int universe() const { return n_; }
  [[nodiscard]] const std::vector<int>& indices() const { return indices_; }

  [[nodiscard]] std::string str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(indices_[i]);
    }
    return out + "}";
  }

  friend bool operator==(const SubsetY&, const SubsetY&) = default;

 private:
  std::vector<int> indices_;
  int n_ = 0;
};

/// The bits of x at the positions in y, in ascending position order.
inline BitString restrict(const BitString& x, const SubsetY& y) {
  detail::require(y.universe() == x.size(), "restrict: subset universe does not match string length");
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(y.size()));
  for (int i : y.indices()) out.push_back(static_cast<std::uint8_t>(x.at(i)));
  return BitString(std::move(out));
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  return static_cast<std::uint64_t>(r);
}

/// Visits every size-m subset of [n] in lexicographic order.
inline void for_each_subset(int n, int m, const std::function<void(const SubsetY&)>& visit) {
  detail::require(m >= 1 && m <= n, "for_each_subset: need 1 <= m <= n");
  std::vector<int> idx(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i + 1;
  while (true) {
    visit(SubsetY(idx, n));
    int i = m - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - m + i + 1) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

inline std::vector<SubsetY> all_subsets(int n, int m) {
  std::vector<SubsetY> out;
  out.reserve(binomial(n, m));
  for_each_subset(n, m, [&](const SubsetY& y) { out.push_back(y); });
  return out;
}

/// Position of y in the lexicographic order produced by all_subsets().
inline std::uint64_t subset_rank(const SubsetY& y) {
  const int n = y.universe();
  const int m = y.size();
  std::uint64_t rank = 0;
  int previous = 0;
  for (int i = 0; i < m; ++i) {
    const int current = y.indices()[static_cast<std::size_t>(i)];
    for (int v = previous + 1; v < current; ++v) rank += binomial(n - v, m - i - 1);
    previous = current;
  }
  return rank;
}

}  // namespace exclab
