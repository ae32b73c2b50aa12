// Characteristic function of one walk step, psi(lambda) = E exp(i lambda.Z(xi)),
// its Gaussian counterpart psi_G, row influences, and the pointwise bounds
// used to control psi^{4t} away from the lattice.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phad/cumulants.hpp"
#include "phad/indexing.hpp"
#include "phad/parallel.hpp"
#include "phad/torus_point.hpp"

namespace phad {

/// Rows accepted by psi (cost 2^{n-1} d per evaluation).
inline constexpr int kPsiCap = 20;

/// Slack used by every pointwise inequality check.
inline constexpr double kBoundSlack = 1e-12;

/// A complex value with its log-modulus and principal argument.
struct CharValue {
  std::complex<double> value{1.0, 0.0};
  double log_mag = 0.0;  // -inf when value == 0
  double arg = 0.0;      // in (-pi, pi]

  static CharValue from_complex(std::complex<double> z) {
    CharValue v;
    v.value = z;
    const double mag = std::abs(z);
    v.log_mag = mag > 0.0 ? std::log(mag) : -std::numeric_limits<double>::infinity();
    v.arg = mag > 0.0 ? std::arg(z) : 0.0;
    if (v.arg <= -std::numbers::pi) v.arg = std::numbers::pi;
    return v;
  }

  /// Builds from (log-modulus, unreduced argument).
  static CharValue from_polar_log(double log_mag, double arg) {
    CharValue v;
    v.log_mag = log_mag;
    v.arg = reduce_angle(arg);
    if (log_mag == -std::numeric_limits<double>::infinity()) {
      v.value = {0.0, 0.0};
      v.arg = 0.0;
    } else {
      v.value = std::polar(std::exp(log_mag), v.arg);
    }
    return v;
  }

  double modulus() const noexcept { return std::abs(value); }
};

/// psi(lambda) = 2^{-(n-1)} sum over columns with y_1 = +1 of exp(i lambda.Z(y)).
inline CharValue psi(const TorusPoint& lambda, int cap = kPsiCap) {
  const int n = lambda.n();
  require_enumerable(n, cap, "psi");
  if (n < 2) return CharValue::from_complex({1.0, 0.0});
  const std::uint64_t half = std::uint64_t{1} << (n - 1);
  const auto coords = lambda.coords();
  std::vector<double> y(static_cast<std::size_t>(n));
  CompensatedSum re, im;
  for (std::uint64_t mask = 0; mask < half; ++mask) {
    const ColumnBits col = canonical_column(mask);
    for (int k = 0; k < n; ++k) y[static_cast<std::size_t>(k)] = ((col >> k) & 1U) ? 1.0 : -1.0;
    double x = 0.0;
    int e = 0;
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = i + 1; j < n; ++j, ++e) row += coords[static_cast<std::size_t>(e)] * y[static_cast<std::size_t>(j)];
      x += row * y[static_cast<std::size_t>(i)];
    }
    re.add(std::cos(x));
    im.add(std::sin(x));
  }
  const double inv = 1.0 / static_cast<double>(half);
  return CharValue::from_complex({re.value() * inv, im.value() * inv});
}

/// psi^p in (log-modulus, argument) form; safe for large p.
inline CharValue psi_power(const CharValue& v, std::uint64_t p) {
  if (p == 0) return CharValue::from_complex({1.0, 0.0});
  const double pp = static_cast<double>(p);
  if (v.log_mag == -std::numeric_limits<double>::infinity()) return CharValue::from_polar_log(v.log_mag, 0.0);
  return CharValue::from_polar_log(pp * v.log_mag, pp * v.arg);
}

/// psi_G(lambda) = E exp(i g^T M g / 2) = det(I - iM)^{-1/2}, with the branch
/// continuous from lambda = 0: prod_k (1 - i mu_k)^{-1/2} over eigenvalues
/// mu_k of M.
inline CharValue psi_gaussian(const TorusPoint& lambda) {
  if (lambda.n() < 2) return CharValue::from_complex({1.0, 0.0});
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lambda.symmetric_matrix(),
                                                           Eigen::EigenvaluesOnly);
  double log_mag = 0.0;
  double arg = 0.0;
  for (double mu : eig.eigenvalues()) {
    log_mag -= 0.25 * std::log1p(mu * mu);
    arg += 0.5 * std::atan(mu);
  }
  return CharValue::from_polar_log(log_mag, arg);
}

/// |psi_G(lambda)| = det(I + M^2)^{-1/4}.
inline double psi_gaussian_modulus(const TorusPoint& lambda) {
  const Eigen::MatrixXd m = lambda.symmetric_matrix();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m.rows(), m.cols()) + m * m;
  return std::pow(a.determinant(), -0.25);
}

/// det(I - iM) by complex LU with partial pivoting.
inline std::complex<double> det_identity_minus_i_m(const TorusPoint& lambda) {
  const Eigen::MatrixXd m = lambda.symmetric_matrix();
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(m.rows(), m.cols()) -
                             std::complex<double>(0.0, 1.0) * m.cast<std::complex<double>>();
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(a).determinant();
}

struct InfluenceProfile {
  std::vector<double> I;  // I_k, k = 1..n stored at k-1
  double I_max = 0.0;
  double J = 0.0;  // sum_k I_k^{3/2}
};

inline InfluenceProfile influences(const TorusPoint& lambda) {
  const int n = lambda.n();
  InfluenceProfile p;
  p.I.assign(static_cast<std::size_t>(n), 0.0);
  int e = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++e) {
      const double sq = lambda[e] * lambda[e];
      p.I[static_cast<std::size_t>(i)] += sq;
      p.I[static_cast<std::size_t>(j)] += sq;
    }
  for (double ik : p.I) {
    p.I_max = std::max(p.I_max, ik);
    p.J += ik * std::sqrt(ik);
  }
  return p;
}

/// Outcome of one pointwise inequality lhs <= rhs (or interval membership).
struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;

  double margin() const noexcept { return rhs - lhs; }
};

/// |psi|^2 <= 1/2 + 1/2 prod_{i != k} cos(2 lambda_{ik}); k is 1-based.
inline BoundCheck check_cosine_bound(const TorusPoint& lambda, int k, int cap = kPsiCap) {
  const int n = lambda.n();
  if (k < 1 || k > n) throw std::invalid_argument("check_cosine_bound: vertex out of range");
  for (double x : lambda.coords())
    if (std::abs(x) > std::numbers::pi) throw std::invalid_argument("check_cosine_bound: coordinate outside [-pi, pi]");
  double prod = 1.0;
  for (int i = 1; i <= n; ++i)
    if (i != k) prod *= std::cos(2.0 * lambda.at(i, k));
  const double mag = psi(lambda, cap).modulus();
  BoundCheck b{mag * mag, 0.5 + 0.5 * prod, false};
  b.holds = b.lhs <= b.rhs + kBoundSlack;
  return b;
}

/// |psi - psi_G| <= 3/2 J.
inline BoundCheck check_lindeberg(const TorusPoint& lambda, int cap = kPsiCap) {
  const auto gap = std::abs(psi(lambda, cap).value - psi_gaussian(lambda).value);
  BoundCheck b{gap, 1.5 * influences(lambda).J, false};
  b.holds = b.lhs <= b.rhs + kBoundSlack;
  return b;
}

/// |psi|^{4t} <= exp(-3 t s / 2) on s <= r0^2.
inline BoundCheck check_small_ball(const TorusPoint& lambda, std::uint64_t t, double r0 = 0.25,
                                   int cap = kPsiCap) {
  const double s = lambda.norm_sq();
  if (s > r0 * r0) throw std::domain_error("check_small_ball: s(lambda) exceeds r0^2");
  const CharValue p = psi_power(psi(lambda, cap), 4 * t);
  BoundCheck b{std::exp(p.log_mag), std::exp(-1.5 * static_cast<double>(t) * s), false};
  b.holds = b.lhs <= b.rhs + kBoundSlack;
  return b;
}

/// Re psi in [3/4, 1] on s <= 1/2. lhs = Re psi, rhs = 3/4.
inline BoundCheck check_real_part(const TorusPoint& lambda, int cap = kPsiCap) {
  if (lambda.norm_sq() > 0.5) throw std::domain_error("check_real_part: s(lambda) exceeds 1/2");
  const double re = psi(lambda, cap).value.real();
  BoundCheck b{re, 0.75, false};
  b.holds = re >= 0.75 - kBoundSlack && re <= 1.0 + kBoundSlack;
  return b;
}

/// |psi_G| <= (1 + 2 s)^{-1/4}.
inline BoundCheck check_gaussian_contraction(const TorusPoint& lambda) {
  BoundCheck b{psi_gaussian(lambda).modulus(), std::pow(1.0 + 2.0 * lambda.norm_sq(), -0.25), false};
  b.holds = b.lhs <= b.rhs + kBoundSlack;
  return b;
}

// ---------------------------------------------------------------------------
// Regions of an even cell B_{pi/4}.

enum class RegionLabel { core, local_annulus, near_shell, far_small_j, far_big_i, far_mid, odd_cell };

inline const char* to_string(RegionLabel l) {
  switch (l) {
    case RegionLabel::core: return "core";
    case RegionLabel::local_annulus: return "local-annulus";
    case RegionLabel::near_shell: return "near-shell";
    case RegionLabel::far_small_j: return "far-small-J";
    case RegionLabel::far_big_i: return "far-big-I";
    case RegionLabel::far_mid: return "far-mid";
    case RegionLabel::odd_cell: return "odd-cell";
  }
  return "?";
}

inline bool is_far(RegionLabel l) {
  return l == RegionLabel::far_small_j || l == RegionLabel::far_big_i || l == RegionLabel::far_mid;
}

inline constexpr double kQuarterPi = std::numbers::pi / 4.0;

/// Primary box half-width: sqrt(2d/t), clamped to 0.9 pi/4 when it leaves the cell.
struct DeltaChoice {
  double delta = 0.0;
  bool clamped = false;
};

inline DeltaChoice default_delta(int d, std::uint64_t t) {
  if (t == 0) return {0.9 * kQuarterPi, true};
  const double raw = std::sqrt(2.0 * d / static_cast<double>(t));
  if (raw >= kQuarterPi || d == 0) return {0.9 * kQuarterPi, true};
  return {raw, false};
}

struct FarShellConstants {
  double r = 0.0;
  double q_gauss = 0.0;  // (1 + 2r^2)^{-1/4}
  double eta = 0.0;      // (1 - q_gauss) / 3
  double q_small = 0.0;  // (1 + q_gauss) / 2
  double q_big = 0.0;    // ((1 + e^{-8/pi^2}) / 2)^{1/2}
  double a_r = 0.0;      // (4/pi^2) eta^{2/3}
};

inline FarShellConstants far_shell_constants(double r) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  FarShellConstants c;
  c.r = r;
  c.q_gauss = std::pow(1.0 + 2.0 * r * r, -0.25);
  c.eta = (1.0 - c.q_gauss) / 3.0;
  c.q_small = (1.0 + c.q_gauss) / 2.0;
  c.q_big = std::sqrt((1.0 + std::exp(-8.0 / pi2)) / 2.0);
  c.a_r = (4.0 / pi2) * std::pow(c.eta, 2.0 / 3.0);
  return c;
}

/// Label of a point of the even cell B_{pi/4} (centered at a lattice point).
/// Tests are applied in order: core, local annulus, near shell, then the far
/// shell split by J <= eta_r and I_max >= 1.
inline RegionLabel classify_region(const TorusPoint& lambda, std::uint64_t t, double r, double delta) {
  if (t == 0) throw std::invalid_argument("classify_region: t must be >= 1");
  if (!(delta > 0.0 && delta <= kQuarterPi)) throw std::invalid_argument("classify_region: delta outside (0, pi/4]");
  if (!(r > 0.0 && r < kQuarterPi)) throw std::invalid_argument("classify_region: r outside (0, pi/4)");
  if (lambda.max_abs() > kQuarterPi) throw std::invalid_argument("classify_region: point outside B_{pi/4}");

  const double s = lambda.norm_sq();
  const double core_radius_sq = static_cast<double>(lambda.d()) / static_cast<double>(t);
  if (s <= core_radius_sq) return RegionLabel::core;
  const bool in_box = lambda.max_abs() <= delta;
  if (s <= r * r) return in_box ? RegionLabel::local_annulus : RegionLabel::near_shell;

  const InfluenceProfile inf = influences(lambda);
  if (inf.J <= far_shell_constants(r).eta) return RegionLabel::far_small_j;
  if (inf.I_max >= 1.0) return RegionLabel::far_big_i;
  return RegionLabel::far_mid;
}

struct FarShellCertificate {
  RegionLabel label = RegionLabel::far_mid;
  double bound = 1.0;          // pointwise bound on |psi|^{4t}
  double psi_power_abs = 0.0;  // exact |psi|^{4t}
  bool holds = true;
};

/// Pointwise contraction certificate on the far shell B_{pi/4} \ D_r.
inline FarShellCertificate far_shell_certificate(const TorusPoint& lambda, std::uint64_t t, double r,
                                                 int cap = kPsiCap) {
  if (lambda.max_abs() > kQuarterPi) throw std::invalid_argument("far_shell_certificate: point outside B_{pi/4}");
  if (lambda.norm_sq() <= r * r) throw std::invalid_argument("far_shell_certificate: point inside D_r");
  const FarShellConstants c = far_shell_constants(r);
  const InfluenceProfile inf = influences(lambda);
  const double p = 4.0 * static_cast<double>(t);

  FarShellCertificate cert;
  if (inf.J <= c.eta) {
    cert.label = RegionLabel::far_small_j;
    cert.bound = std::pow(c.q_small, p);
  } else if (inf.I_max >= 1.0) {
    cert.label = RegionLabel::far_big_i;
    cert.bound = std::pow(c.q_big, p);
  } else {
    cert.label = RegionLabel::far_mid;
    cert.bound = std::exp(-c.a_r * static_cast<double>(t) * std::pow(static_cast<double>(lambda.n()), -2.0 / 3.0));
  }
  cert.psi_power_abs = std::exp(psi_power(psi(lambda, cap), 4 * t).log_mag);
  cert.holds = cert.psi_power_abs <= cert.bound + kBoundSlack;
  return cert;
}

}  // namespace phad
