// Edge indexing for the complete graph K_n, sign columns, and the
// pairwise-product map Z(y) = (y_i y_j)_{i<j}.
//
// Conventions shared by every module:
//   * vertices are 1-based, edges {i,j} with i < j are ranked
//     lexicographically: (1,2),(1,3),...,(1,n),(2,3),...,(n-1,n);
//   * a column y in {+1,-1}^n is a bit pattern, bit k set <=> y_{k+1} = +1;
//   * a vector in {+1,-1}^d is an EdgeBits, bit e set <=> coordinate e = +1.
#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace phad {

/// Largest row count supported by the column encoding and image enumeration.
inline constexpr int kMaxRows = 24;

using ColumnBits = std::uint64_t;

constexpr int edge_count(int n) noexcept { return n * (n - 1) / 2; }

struct Dimensions {
  int n = 0;
  int d = 0;

  static Dimensions of(int n) {
    if (n < 1) throw std::invalid_argument("row count must be >= 1");
    return {n, edge_count(n)};
  }
};

/// Rank of the pair (i,j), 1 <= i < j <= n, in lexicographic order.
inline int edge_index(int i, int j, int n) {
  if (i < 1 || j > n || i >= j)
    throw std::invalid_argument("edge_index: need 1 <= i < j <= n, got (" +
                                std::to_string(i) + "," + std::to_string(j) +
                                ") with n=" + std::to_string(n));
  // Pairs starting at a < i contribute (n - a) each.
  return (i - 1) * n - (i - 1) * i / 2 + (j - i - 1);
}

/// Inverse of edge_index.
inline std::pair<int, int> edge_endpoints(int e, int n) {
  if (e < 0 || e >= edge_count(n))
    throw std::invalid_argument("edge_endpoints: edge out of range");
  int i = 1;
  int row = n - 1;
  while (e >= row) {
    e -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + e};
}

/// All edges of K_n in index order, as 1-based endpoint pairs.
inline std::vector<std::pair<int, int>> edge_list(int n) {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(edge_count(n)));
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) out.emplace_back(i, j);
  return out;
}

/// Sign of y_k (k is 1-based).
constexpr int column_sign(ColumnBits y, int k) noexcept {
  return ((y >> (k - 1)) & 1U) ? 1 : -1;
}

/// Global sign flip y -> -y.
constexpr ColumnBits negate_column(ColumnBits y, int n) noexcept {
  const ColumnBits mask = n >= 64 ? ~ColumnBits{0} : ((ColumnBits{1} << n) - 1);
  return ~y & mask;
}

inline constexpr int kMaxEdgeWords = (edge_count(kMaxRows) + 63) / 64;

/// Bit vector over the d <= edge_count(kMaxRows) edges of K_n, stored inline.
class EdgeBits {
 public:
  EdgeBits() = default;
  explicit EdgeBits(int d) : d_(d) {
    if (d < 0 || d > 64 * kMaxEdgeWords) throw std::invalid_argument("EdgeBits: width out of range");
  }

  int size() const noexcept { return d_; }

  bool test(int e) const { return (words_[static_cast<std::size_t>(e) / 64] >> (e % 64)) & 1U; }

  void set(int e, bool v = true) {
    auto& w = words_[static_cast<std::size_t>(e) / 64];
    const std::uint64_t m = std::uint64_t{1} << (e % 64);
    w = v ? (w | m) : (w & ~m);
  }

  /// +1 if the bit is set, -1 otherwise.
  int sign(int e) const { return test(e) ? 1 : -1; }

  int popcount() const noexcept {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  EdgeBits& operator^=(const EdgeBits& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] ^= o.words_[k];
    return *this;
  }

  std::span<const std::uint64_t> words() const noexcept {
    return std::span<const std::uint64_t>(words_).first(static_cast<std::size_t>((d_ + 63) / 64));
  }

  /// Big-endian hex of the bit pattern, "0x" prefixed; bit 0 is the last digit.
  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    const int digits = d_ == 0 ? 1 : (d_ + 3) / 4;
    for (int k = digits - 1; k >= 0; --k) {
      unsigned nib = 0;
      for (int b = 0; b < 4; ++b) {
        const int e = 4 * k + b;
        if (e < d_ && test(e)) nib |= 1U << b;
      }
      s.push_back(kDigits[nib]);
    }
    return "0x" + s;
  }

  static EdgeBits from_hex(const std::string& hex, int d) {
    std::string body = hex;
    if (body.rfind("0x", 0) == 0 || body.rfind("0X", 0) == 0) body = body.substr(2);
    EdgeBits out(d);
    const int len = static_cast<int>(body.size());
    for (int k = 0; k < len; ++k) {
      const char c = body[static_cast<std::size_t>(len - 1 - k)];
      unsigned nib = 0;
      if (c >= '0' && c <= '9') nib = static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') nib = static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') nib = static_cast<unsigned>(c - 'A' + 10);
      else throw std::invalid_argument("from_hex: bad digit in " + hex);
      for (int b = 0; b < 4; ++b) {
        if (!((nib >> b) & 1U)) continue;
        const int e = 4 * k + b;
        if (e >= d) throw std::invalid_argument("from_hex: value wider than d bits");
        out.set(e);
      }
    }
    return out;
  }

  friend bool operator==(const EdgeBits&, const EdgeBits&) = default;
  friend auto operator<=>(const EdgeBits&, const EdgeBits&) = default;

 private:
  int d_ = 0;
  std::array<std::uint64_t, kMaxEdgeWords> words_{};
};

using PairProductVector = EdgeBits;

/// Z(y): coordinate e(i,j) is y_i y_j, i.e. set iff bits i and j agree.
inline PairProductVector pair_product(ColumnBits y, int n) {
  if (n < 1 || n > kMaxRows) throw std::invalid_argument("pair_product: n out of range");
  PairProductVector z(edge_count(n));
  int e = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++e)
      if ((((y >> i) ^ (y >> j)) & 1U) == 0) z.set(e);
  return z;
}

/// The columns with y_1 = +1; one representative of each {y, -y} pair.
inline ColumnBits canonical_column(std::uint64_t m) noexcept { return (m << 1) | 1U; }

/// Distinct images of Z with their multiplicities (always 2 each: y and -y).
inline std::vector<std::pair<PairProductVector, int>> all_pair_product_images(int n) {
  if (n < 1 || n > kMaxRows)
    throw std::invalid_argument("all_pair_product_images: n must be in [1," +
                                std::to_string(kMaxRows) + "]");
  std::vector<std::pair<PairProductVector, int>> out;
  const std::uint64_t half = std::uint64_t{1} << (n - 1);
  out.reserve(half);
  for (std::uint64_t m = 0; m < half; ++m) out.emplace_back(pair_product(canonical_column(m), n), 2);
  return out;
}

/// Images as signed coordinate vectors (+1/-1), in the same order.
inline std::vector<std::vector<std::int8_t>> pair_product_sign_vectors(int n) {
  const int d = edge_count(n);
  std::vector<std::vector<std::int8_t>> out;
  for (const auto& [z, mult] : all_pair_product_images(n)) {
    (void)mult;
    std::vector<std::int8_t> v(static_cast<std::size_t>(d));
    for (int e = 0; e < d; ++e) v[static_cast<std::size_t>(e)] = static_cast<std::int8_t>(z.sign(e));
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace phad
