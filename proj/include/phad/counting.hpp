// Exact counts N_{n,s} of n x s partial Hadamard matrices and the
// asymptotic scale they are compared against.
//
// A matrix with columns y^(1..s) has pairwise orthogonal rows iff
// Z(y^(1)) + ... + Z(y^(s)) = 0, so N_{n,s} = 2^{ns} P(S_s = 0) for the walk
// whose steps are Z of uniform sign columns.
#pragma once

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "phad/cumulants.hpp"
#include "phad/indexing.hpp"
#include "phad/parallel.hpp"

namespace phad {

using BigCount = boost::multiprecision::cpp_int;

inline std::string to_decimal(const BigCount& c) { return c.str(); }
inline BigCount from_decimal(const std::string& s) { return BigCount(s); }

/// Natural log of a nonnegative count; -inf for 0. Uses the leading 64 bits.
inline double log_e(const BigCount& c) {
  if (c <= 0) return -std::numeric_limits<double>::infinity();
  const std::size_t bits = boost::multiprecision::msb(c) + 1;
  if (bits <= 64) return std::log(static_cast<double>(c.convert_to<std::uint64_t>()));
  const std::size_t shift = bits - 64;
  const BigCount top = c >> shift;
  return std::log(static_cast<double>(top.convert_to<std::uint64_t>())) +
         static_cast<double>(shift) * std::numbers::ln2;
}

inline double log2_count(const BigCount& c) { return log_e(c) / std::numbers::ln2; }

inline BigCount pow2(unsigned k) { return BigCount(1) << k; }

/// Refusal thresholds. Defaults can be raised through the environment:
/// PHAD_BRUTE_CAP (max n*s), PHAD_DP_STATE_BUDGET (max walk states).
struct CountLimits {
  int brute_cap = 26;
  std::uint64_t dp_state_budget = std::uint64_t{1} << 22;

  static CountLimits from_env() {
    CountLimits l;
    if (const char* v = std::getenv("PHAD_BRUTE_CAP")) l.brute_cap = std::atoi(v);
    if (const char* v = std::getenv("PHAD_DP_STATE_BUDGET")) l.dp_state_budget = std::strtoull(v, nullptr, 10);
    return l;
  }
};

inline void require_counting_args(int n, int s, const char* who) {
  if (n < 1 || n > kMaxRows)
    throw std::invalid_argument(std::string(who) + ": n must be in [1," + std::to_string(kMaxRows) + "]");
  if (s < 0) throw std::invalid_argument(std::string(who) + ": s must be >= 0");
}

/// Visits all 2^{ns} sign matrices (row i is the s-bit word at bits i*s) and
/// counts those whose rows are pairwise orthogonal.
inline BigCount count_bruteforce(int n, int s, unsigned jobs = 1, const CountLimits& lim = CountLimits::from_env()) {
  require_counting_args(n, s, "count_bruteforce");
  if (n * s > lim.brute_cap)
    throw CapExceeded("count_bruteforce: n*s=" + std::to_string(n * s) + " exceeds cap " +
                          std::to_string(lim.brute_cap),
                      "brute_cap");
  if (n * s > 62) throw CapExceeded("count_bruteforce: index space exceeds 64 bits", "brute_cap");
  const int bits = n * s;
  const std::uint64_t total = std::uint64_t{1} << bits;
  const std::uint64_t row_mask = s == 0 ? 0 : (s >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << s) - 1);
  auto body = [&](std::uint64_t b, std::uint64_t e) {
    std::uint64_t hits = 0;
    std::uint64_t rows[kMaxRows];
    for (std::uint64_t m = b; m < e; ++m) {
      for (int i = 0; i < n; ++i) rows[i] = (m >> (i * s)) & row_mask;
      bool ok = true;
      for (int i = 0; i < n && ok; ++i)
        for (int j = i + 1; j < n; ++j)
          if (2 * std::popcount(rows[i] ^ rows[j]) != s) {
            ok = false;
            break;
          }
      hits += ok;
    }
    return hits;
  };
  const std::uint64_t hits = chunked_reduce<std::uint64_t>(
      total, jobs, body, [](std::uint64_t& acc, std::uint64_t p) { acc += p; }, std::uint64_t{1} << 16);
  return BigCount(hits);
}

/// Distribution of S_k: sum-vectors in Z^d with exact path counts. Keys are
/// little-endian int16 coordinates packed into a byte string.
class WalkStateTable {
 public:
  using Map = std::unordered_map<std::string, BigCount>;

  WalkStateTable(int n, int steps, Map table) : n_(n), steps_(steps), table_(std::move(table)) {}

  int n() const noexcept { return n_; }
  int d() const noexcept { return edge_count(n_); }
  int steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return table_.size(); }
  const Map& entries() const noexcept { return table_; }

  static std::string encode(const std::vector<int>& v) {
    std::string key(2 * v.size(), '\0');
    for (std::size_t e = 0; e < v.size(); ++e) {
      const auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(v[e]));
      key[2 * e] = static_cast<char>(u & 0xFF);
      key[2 * e + 1] = static_cast<char>(u >> 8);
    }
    return key;
  }

  static std::vector<int> decode(std::string_view key) {
    std::vector<int> v(key.size() / 2);
    for (std::size_t e = 0; e < v.size(); ++e) {
      const auto u = static_cast<std::uint16_t>(static_cast<unsigned char>(key[2 * e]) |
                                                (static_cast<unsigned char>(key[2 * e + 1]) << 8));
      v[e] = static_cast<std::int16_t>(u);
    }
    return v;
  }

  BigCount count_at(const std::vector<int>& v) const {
    const auto it = table_.find(encode(v));
    return it == table_.end() ? BigCount(0) : it->second;
  }

  BigCount total_mass() const {
    BigCount t = 0;
    for (const auto& [k, c] : table_) t += c;
    return t;
  }

  /// count(v) = count(-v) for every key. Holds for n <= 2 only: for n >= 3 a
  /// step image has coordinate product +1 on every triangle, its negation -1.
  bool is_symmetric() const {
    for (const auto& [k, c] : table_) {
      auto v = decode(k);
      for (auto& x : v) x = -x;
      if (count_at(v) != c) return false;
    }
    return true;
  }

  /// |v_e| <= k and v_e = k (mod 2) for every key.
  bool keys_in_range() const {
    for (const auto& [k, c] : table_)
      for (int x : decode(k))
        if (std::abs(x) > steps_ || ((x - steps_) % 2) != 0) return false;
    return true;
  }

 private:
  int n_;
  int steps_;
  Map table_;
};

namespace detail {

inline std::vector<std::vector<std::int16_t>> step_images(int n) {
  std::vector<std::vector<std::int16_t>> out;
  for (const auto& v : pair_product_sign_vectors(n)) out.emplace_back(v.begin(), v.end());
  return out;
}

inline void add_image(std::string& key, const std::vector<std::int16_t>& z) {
  for (std::size_t e = 0; e < z.size(); ++e) {
    std::uint16_t u;
    std::memcpy(&u, key.data() + 2 * e, 2);  // keys are little-endian by construction
    u = static_cast<std::uint16_t>(static_cast<std::int16_t>(u) + z[e]);
    std::memcpy(key.data() + 2 * e, &u, 2);
  }
}

/// True iff -v is Z(y) for some y: y_1 = +1 and y_j = -v_{1j} fix y, then every
/// coordinate must match.
inline bool negation_is_image(const std::vector<int>& v, int n) {
  if (n == 1) return true;
  std::vector<int> y(static_cast<std::size_t>(n));
  y[0] = 1;
  for (int j = 1; j < n; ++j) {
    const int z = -v[static_cast<std::size_t>(j - 1)];
    if (z != 1 && z != -1) return false;
    y[static_cast<std::size_t>(j)] = z;
  }
  int e = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++e)
      if (-v[static_cast<std::size_t>(e)] != y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)])
        return false;
  return true;
}

}  // namespace detail

/// Table of S_k for k = steps, built by k convolutions with the step law
/// (2^{n-1} images, multiplicity 2). Workers each convolve a slice of the
/// current table; partial tables are summed exactly, so the result does not
/// depend on `jobs`.
inline WalkStateTable walk_table(int n, int steps, unsigned jobs = 1,
                                 const CountLimits& lim = CountLimits::from_env()) {
  require_counting_args(n, steps, "walk_table");
  if (steps > 32767) throw CapExceeded("walk_table: steps exceed int16 key range", "dp_key_range");
  const int d = edge_count(n);
  if (steps > 0 && (std::uint64_t{1} << (n - 1)) > lim.dp_state_budget)
    throw CapExceeded("walk_table: 2^" + std::to_string(n - 1) + " step images exceed state budget " +
                          std::to_string(lim.dp_state_budget),
                      "dp_state_budget");
  const auto images = steps > 0 ? detail::step_images(n) : std::vector<std::vector<std::int16_t>>{};
  WalkStateTable::Map cur;
  cur.emplace(std::string(static_cast<std::size_t>(2 * d), '\0'), BigCount(1));
  for (int k = 0; k < steps; ++k) {
    // Each input state spawns at most |images| outputs; check before growing.
    const double projected = static_cast<double>(cur.size()) * static_cast<double>(images.size());
    std::vector<std::pair<std::string, BigCount>> items(cur.begin(), cur.end());
    cur.clear();
    const std::uint64_t chunk = std::max<std::uint64_t>(1, items.size() / resolve_jobs(jobs) + 1);
    auto body = [&](std::uint64_t b, std::uint64_t e) {
      WalkStateTable::Map part;
      for (std::uint64_t i = b; i < e; ++i) {
        const BigCount twice = items[i].second * 2;
        for (const auto& z : images) {
          std::string key = items[i].first;
          detail::add_image(key, z);
          part[key] += twice;
        }
        if (part.size() > lim.dp_state_budget)
          throw CapExceeded("walk_table: state budget " + std::to_string(lim.dp_state_budget) + " exceeded",
                            "dp_state_budget");
      }
      return part;
    };
    cur = chunked_reduce<WalkStateTable::Map>(
        items.size(), jobs, body,
        [](WalkStateTable::Map& acc, WalkStateTable::Map& p) {
          if (acc.empty()) {
            acc = std::move(p);
            return;
          }
          for (auto& [key, c] : p) acc[key] += c;
        },
        chunk);
    if (cur.size() > lim.dp_state_budget)
      throw CapExceeded("walk_table: state budget " + std::to_string(lim.dp_state_budget) + " exceeded (" +
                            std::to_string(static_cast<std::uint64_t>(projected)) + " projected)",
                        "dp_state_budget");
  }
  return WalkStateTable(n, steps, std::move(cur));
}

/// N_{n,s} by s-fold convolution. The last step is not materialized: each
/// state v of S_{s-1} contributes 2 count(v) when -v is a step image.
inline BigCount count_dp(int n, int s, unsigned jobs = 1, const CountLimits& lim = CountLimits::from_env()) {
  require_counting_args(n, s, "count_dp");
  if (s == 0) return BigCount(1);
  const WalkStateTable table = walk_table(n, s - 1, jobs, lim);
  BigCount total = 0;
  for (const auto& [key, c] : table.entries())
    if (detail::negation_is_image(WalkStateTable::decode(key), n)) total += c * 2;
  return total;
}

/// N_{n,s} for even s as sum_v count_{s/2}(v) count_{s/2}(-v): a first half
/// ending at v is completed by any second half ending at -v.
inline BigCount count_meet_middle(int n, int s, unsigned jobs = 1,
                                  const CountLimits& lim = CountLimits::from_env()) {
  require_counting_args(n, s, "count_meet_middle");
  if (s % 2) throw std::invalid_argument("count_meet_middle: s must be even");
  const WalkStateTable half = walk_table(n, s / 2, jobs, lim);
  BigCount total = 0;
  for (const auto& [key, c] : half.entries()) {
    auto v = WalkStateTable::decode(key);
    for (auto& x : v) x = -x;
    const auto it = half.entries().find(WalkStateTable::encode(v));
    if (it != half.entries().end()) total += c * it->second;
  }
  return total;
}

inline BigCount binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  BigCount r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// c* = 1 - (1/2) log 2.
inline const double kCoreMassExponent = 1.0 - 0.5 * std::numbers::ln2;

struct CoreMass {
  double F = 0.0;
  double G_core = 0.0;
  double ratio_to_F = 0.0;    // P[chi^2_d <= 4d]
  double lower_bound = 0.0;   // 1 - e^{-c* d}
  bool holds = true;
};

/// F(d,t) = (pi/(2t))^{d/2}.
inline double gaussian_mass_F(int d, double t) { return std::pow(std::numbers::pi / (2.0 * t), 0.5 * d); }

/// G_core = int over s(mu) <= d/t of e^{-2t s(mu)} = F(d,t) P[chi^2_d <= 4d].
inline CoreMass core_gaussian_mass(int d, double t) {
  if (d < 1 || t < 1) throw std::invalid_argument("core_gaussian_mass: need d, t >= 1");
  CoreMass m;
  m.F = gaussian_mass_F(d, t);
  m.ratio_to_F = boost::math::gamma_p(0.5 * d, 2.0 * d);
  m.G_core = m.F * m.ratio_to_F;
  m.lower_bound = 1.0 - std::exp(-kCoreMassExponent * d);
  m.holds = m.ratio_to_F >= m.lower_bound - 1e-12;
  return m;
}

struct RadialMoment {
  double exact = 0.0;        // int s(mu)^m e^{-2t s(mu)} d mu
  double bound_ratio = 0.0;  // exact / ((d/t)^m F)
  double C_m = 0.0;          // (2m-1)!!/4^m, the sup of bound_ratio over d >= 1
  bool holds = true;
};

inline RadialMoment gaussian_radial_moment(int d, double t, int m) {
  if (d < 1 || t <= 0) throw std::invalid_argument("gaussian_radial_moment: need d >= 1, t > 0");
  if (m < 0 || m > 8) throw std::invalid_argument("gaussian_radial_moment: m must be in [0,8]");
  RadialMoment r;
  double prod = 1.0;
  double odd = 1.0;
  for (int j = 0; j < m; ++j) {
    prod *= d + 2.0 * j;
    odd *= 2.0 * j + 1.0;
  }
  const double F = gaussian_mass_F(d, t);
  r.exact = F * prod * std::pow(4.0 * t, -m);
  r.bound_ratio = prod / (std::pow(4.0, m) * std::pow(static_cast<double>(d), m));
  r.C_m = odd / std::pow(4.0, m);
  r.holds = r.bound_ratio <= r.C_m * (1.0 + 1e-12);
  return r;
}

/// Scales at s = 4t. Logs are natural.
struct AsymptoticReport {
  int n = 0;
  int d = 0;
  std::uint64_t t = 0;
  double log_A = 0.0;      // log A_{n,4t}
  double log_A_hat = 0.0;  // log A_{n,4t} - 4nt log 2
  double log_K = 0.0;      // log K_n, K_n = 2^{2d-n+1} (2 pi)^{-d}
  double F = 0.0;
  double G_core = 0.0;
  double correction = 0.0;  // C(n,3)/(8t)
  double predicted_ratio = 0.0;
  double term_n2_t = 0.0;
  double term_n52_t32 = 0.0;
  double term_n6_t2 = 0.0;
  bool core_scale_holds = true;  // K_n F <= A_hat (1 + e^{-c* d})

  double A() const { return std::exp(log_A); }
};

/// log A_{n,s} = (ns + 2d - n + 1) log 2 - (d/2) log(2 pi s).
inline double log_asymptotic_scale(int n, double s) {
  const int d = edge_count(n);
  return (n * s + 2.0 * d - n + 1.0) * std::numbers::ln2 - 0.5 * d * std::log(2.0 * std::numbers::pi * s);
}

inline AsymptoticReport asymptotic_scale(int n, std::uint64_t t) {
  if (n < 1) throw std::invalid_argument("asymptotic_scale: n must be >= 1");
  if (t < 1) throw std::invalid_argument("asymptotic_scale: t must be >= 1");
  AsymptoticReport r;
  r.n = n;
  r.d = edge_count(n);
  r.t = t;
  const double td = static_cast<double>(t);
  const double nd = static_cast<double>(n);
  r.log_A = log_asymptotic_scale(n, 4.0 * td);
  r.log_A_hat = r.log_A - 4.0 * nd * td * std::numbers::ln2;
  r.log_K = (2.0 * r.d - n + 1.0) * std::numbers::ln2 - r.d * std::log(2.0 * std::numbers::pi);
  r.F = gaussian_mass_F(r.d, td);
  r.G_core = r.d >= 1 ? r.F * boost::math::gamma_p(0.5 * r.d, 2.0 * r.d) : r.F;
  const double triangles = nd * (nd - 1) * (nd - 2) / 6.0;
  r.correction = triangles / (8.0 * td);
  r.predicted_ratio = 1.0 - r.correction;
  r.term_n2_t = nd * nd / td;
  r.term_n52_t32 = std::pow(nd, 2.5) / std::pow(td, 1.5);
  r.term_n6_t2 = std::pow(nd, 6) / (td * td);
  const double lhs = r.log_K + std::log(r.F);
  const double rhs = r.log_A_hat + std::log1p(std::exp(-kCoreMassExponent * r.d));
  r.core_scale_holds = lhs <= rhs + 1e-12;
  return r;
}

}  // namespace phad
