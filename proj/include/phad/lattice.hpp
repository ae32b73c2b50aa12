// The superlattice Lambda0 = {0, +-pi/2, pi}^d, the lattice
// Lambda = {lambda : |psi(lambda)| = 1} inside it, and the tiling of the
// torus by quarter-boxes B_{pi/4}(lambda), lambda in Lambda0.
//
// A point of Lambda0 is stored as lambda = lambda1 + lambda2 with
// lambda1 in {0,pi}^d and lambda2 in {0,pi/2}^d. Per coordinate the code
// c = 2*b1 + b2 equals k mod 4 where the coordinate is k*pi/2, so the group
// law on Lambda0 is coordinate-wise addition of codes mod 4. lambda lies in
// Lambda iff the graph of lambda2 has only even degrees.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "phad/charfn.hpp"
#include "phad/indexing.hpp"
#include "phad/parallel.hpp"
#include "phad/rng.hpp"
#include "phad/torus_point.hpp"

namespace phad {

/// Rows for which Lambda0 (4^d points) is scanned exhaustively.
inline constexpr int kExhaustiveLatticeCap = 5;

class LatticePoint {
 public:
  LatticePoint() = default;
  explicit LatticePoint(int n) : n_(n), lambda1_(edge_count(n)), lambda2_(edge_count(n)) {}
  LatticePoint(int n, EdgeBits lambda1, EdgeBits lambda2)
      : n_(n), lambda1_(std::move(lambda1)), lambda2_(std::move(lambda2)) {
    if (lambda1_.size() != edge_count(n) || lambda2_.size() != edge_count(n))
      throw std::invalid_argument("LatticePoint: bit widths must equal d");
  }

  int n() const noexcept { return n_; }
  int d() const noexcept { return lambda1_.size(); }
  const EdgeBits& lambda1() const noexcept { return lambda1_; }
  const EdgeBits& lambda2() const noexcept { return lambda2_; }

  /// Per-coordinate code in {0,1,2,3}: coordinate = code * pi/2 (mod 2pi).
  int code(int e) const { return 2 * static_cast<int>(lambda1_.test(e)) + static_cast<int>(lambda2_.test(e)); }

  void set_code(int e, int c) {
    lambda1_.set(e, (c >> 1) & 1);
    lambda2_.set(e, c & 1);
  }

  /// Coordinates in {0, pi/2, pi, -pi/2}.
  TorusPoint coordinates() const {
    static constexpr std::array<double, 4> kValue = {0.0, std::numbers::pi / 2, std::numbers::pi,
                                                     -std::numbers::pi / 2};
    TorusPoint out(n_);
    for (int e = 0; e < d(); ++e) out[e] = kValue[static_cast<std::size_t>(code(e))];
    return out;
  }

  /// Degrees of the graph G_{lambda2} on vertices 1..n (index k-1).
  std::vector<int> lambda2_degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(n_), 0);
    int e = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j, ++e)
        if (lambda2_.test(e)) {
          ++deg[static_cast<std::size_t>(i)];
          ++deg[static_cast<std::size_t>(j)];
        }
    return deg;
  }

  /// Membership in Lambda: every vertex of G_{lambda2} has even degree.
  bool is_even() const {
    for (int deg : lambda2_degrees())
      if (deg % 2) return false;
    return true;
  }

  LatticePoint operator+(const LatticePoint& o) const {
    if (o.n_ != n_) throw std::invalid_argument("LatticePoint: row counts differ");
    LatticePoint out(n_);
    for (int e = 0; e < d(); ++e) out.set_code(e, (code(e) + o.code(e)) & 3);
    return out;
  }

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;

 private:
  int n_ = 0;
  EdgeBits lambda1_;
  EdgeBits lambda2_;
};

struct CellDecomposition {
  int n = 0;
  std::uint64_t even_count = 0;
  std::uint64_t odd_count = 0;
  std::vector<LatticePoint> even_cells;
  std::vector<LatticePoint> odd_cells;  // empty unless requested
};

inline std::uint64_t expected_lattice_size(int n) {
  const int d = edge_count(n);
  return std::uint64_t{1} << (2 * d - n + 1);
}

/// Scans all 4^d points of Lambda0 (n <= kExhaustiveLatticeCap) and splits
/// them by parity; asserts |Lambda| = 2^{2d-n+1}.
inline CellDecomposition enumerate_lattice(int n, bool keep_odd = true) {
  if (n < 1) throw std::invalid_argument("enumerate_lattice: n must be >= 1");
  if (n > kExhaustiveLatticeCap)
    throw CapExceeded("enumerate_lattice: n=" + std::to_string(n) + " exceeds exhaustive cap " +
                          std::to_string(kExhaustiveLatticeCap) + "; use for_each_lattice_point",
                      "lattice_cap");
  const int d = edge_count(n);
  CellDecomposition out;
  out.n = n;
  const std::uint64_t side = std::uint64_t{1} << d;
  for (std::uint64_t m1 = 0; m1 < side; ++m1)
    for (std::uint64_t m2 = 0; m2 < side; ++m2) {
      LatticePoint p(n);
      for (int e = 0; e < d; ++e) p.set_code(e, static_cast<int>((((m1 >> e) & 1U) << 1) | ((m2 >> e) & 1U)));
      if (p.is_even()) {
        ++out.even_count;
        out.even_cells.push_back(std::move(p));
      } else {
        ++out.odd_count;
        if (keep_odd) out.odd_cells.push_back(std::move(p));
      }
    }
  if (n >= 2 && out.even_count != expected_lattice_size(n))
    throw std::logic_error("enumerate_lattice: |Lambda| disagrees with 2^{2d-n+1}");
  return out;
}

/// Basis of the cycle space of K_n: triangles {1, i, j}, 2 <= i < j <= n
/// (fundamental cycles of the star at vertex 1). Dimension d - n + 1.
inline std::vector<EdgeBits> cycle_space_basis(int n) {
  std::vector<EdgeBits> basis;
  const int d = edge_count(n);
  for (int i = 2; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      EdgeBits b(d);
      b.set(edge_index(1, i, n));
      b.set(edge_index(1, j, n));
      b.set(edge_index(i, j, n));
      basis.push_back(b);
    }
  return basis;
}

/// Visits every point of Lambda as {0,pi}^d (+) (pi/2) * cycle space, without
/// scanning Lambda0. Visit count is 2^{2d-n+1}; refuses when that exceeds 2^40.
inline void for_each_lattice_point(int n, const std::function<void(const LatticePoint&)>& visit) {
  if (n < 1 || n > kMaxRows) throw std::invalid_argument("for_each_lattice_point: n out of range");
  const int d = edge_count(n);
  const int cyc = d - n + 1;
  if (d + cyc > 40) throw CapExceeded("for_each_lattice_point: 2^" + std::to_string(d + cyc) + " points", "lattice_cap");
  const auto basis = cycle_space_basis(n);
  EdgeBits lambda2(d);
  const std::uint64_t ncyc = std::uint64_t{1} << cyc;
  const std::uint64_t nflip = std::uint64_t{1} << d;
  for (std::uint64_t g = 0; g < ncyc; ++g) {
    if (g > 0) lambda2 ^= basis[static_cast<std::size_t>(std::countr_zero(g))];  // Gray code step
    for (std::uint64_t m1 = 0; m1 < nflip; ++m1) {
      EdgeBits lambda1(d);
      for (int e = 0; e < d; ++e)
        if ((m1 >> e) & 1U) lambda1.set(e);
      visit(LatticePoint(n, lambda1, lambda2));
    }
  }
}

/// Tally of psi over Lambda by nearest fourth root of unity.
struct LatticePsiSummary {
  int n = 0;
  std::uint64_t lattice_size = 0;
  std::array<std::uint64_t, 4> root_counts{};  // 1, i, -1, -i
  std::uint64_t unmatched = 0;                 // farther than the tolerance from every root
  double max_root_distance = 0.0;
  std::uint64_t expected_each = 0;  // 2^{2d-n-1}; 0 when fractional
  bool degenerate = false;          // n = 2: the multiplicity formula is not an integer
  bool consistent() const noexcept {
    if (unmatched) return false;
    if (degenerate) return true;
    for (auto c : root_counts)
      if (c != expected_each) return false;
    return true;
  }
};

inline LatticePsiSummary psi_on_lattice(int n, double tol = 1e-12) {
  LatticePsiSummary s;
  s.n = n;
  const int d = edge_count(n);
  s.degenerate = 2 * d - n - 1 < 0;
  s.expected_each = s.degenerate ? 0 : std::uint64_t{1} << (2 * d - n - 1);
  static const std::array<std::complex<double>, 4> kRoots = {
      std::complex<double>{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for_each_lattice_point(n, [&](const LatticePoint& p) {
    ++s.lattice_size;
    const auto v = psi(p.coordinates()).value;
    int best = 0;
    double dist = std::abs(v - kRoots[0]);
    for (int r = 1; r < 4; ++r) {
      const double dr = std::abs(v - kRoots[static_cast<std::size_t>(r)]);
      if (dr < dist) {
        dist = dr;
        best = r;
      }
    }
    s.max_root_distance = std::max(s.max_root_distance, dist);
    if (dist <= tol)
      ++s.root_counts[static_cast<std::size_t>(best)];
    else
      ++s.unmatched;
  });
  return s;
}

struct CellAssignment {
  LatticePoint center;
  TorusPoint offset;  // in B_{pi/4}
  bool even = true;
};

/// Locates the quarter-box containing gamma: each coordinate rounds to the
/// nearest multiple of pi/2; exact ties (|offset| = pi/4) go to the smaller code.
inline CellAssignment cell_of(const TorusPoint& gamma) {
  const int n = gamma.n();
  CellAssignment out{LatticePoint(n), TorusPoint(n), true};
  constexpr double half_pi = std::numbers::pi / 2;
  for (int e = 0; e < gamma.d(); ++e) {
    const double g = reduce_angle(gamma[e]);
    const double q = g / half_pi;
    const double lo = std::floor(q);
    const double frac = q - lo;
    long k = static_cast<long>(lo);
    if (frac > 0.5) {
      k += 1;
    } else if (frac == 0.5) {
      const long a = ((k % 4) + 4) % 4;
      const long b = (((k + 1) % 4) + 4) % 4;
      if (b < a) k += 1;
    }
    out.center.set_code(e, static_cast<int>(((k % 4) + 4) % 4));
    out.offset[e] = g - static_cast<double>(k) * half_pi;
  }
  out.even = out.center.is_even();
  return out;
}

/// Maximum of |psi|^2 over `samples` points gamma = center + mu with a random
/// odd center and mu uniform in B_{pi/4}.
struct OddCellSweep {
  double max_psi_sq = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;  // |psi|^2 > 1/2 + slack
};

inline OddCellSweep verify_odd_cell_bound(int n, std::uint64_t samples, std::uint64_t seed, unsigned jobs = 1) {
  if (n < 2) throw std::invalid_argument("verify_odd_cell_bound: no odd cells for n < 2");
  require_enumerable(n, kPsiCap, "verify_odd_cell_bound");
  const int d = edge_count(n);
  auto body = [&](std::uint64_t b, std::uint64_t e) {
    OddCellSweep part;
    for (std::uint64_t i = b; i < e; ++i) {
      Philox4x32 rng(seed, i);
      LatticePoint center(n);
      do {
        for (int k = 0; k < d; ++k) center.set_code(k, static_cast<int>(rng.below(4)));
      } while (center.is_even());
      TorusPoint gamma = center.coordinates();
      for (int k = 0; k < d; ++k) gamma[k] += rng.uniform(-kQuarterPi, kQuarterPi);
      const double m = psi(gamma).modulus();
      const double sq = m * m;
      ++part.samples;
      part.max_psi_sq = std::max(part.max_psi_sq, sq);
      if (sq > 0.5 + kBoundSlack) ++part.violations;
    }
    return part;
  };
  return chunked_reduce<OddCellSweep>(samples, jobs, body, [](OddCellSweep& acc, const OddCellSweep& p) {
    acc.samples += p.samples;
    acc.violations += p.violations;
    acc.max_psi_sq = std::max(acc.max_psi_sq, p.max_psi_sq);
  });
}

}  // namespace phad
