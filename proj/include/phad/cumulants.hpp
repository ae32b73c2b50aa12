// Cumulants of X_lambda = lambda . Z(xi) for a uniform sign vector xi, and
// the structured forms that express them:
//
//   kappa_2 = s(lambda),   kappa_3 / 6 = T (triangle form),
//   kappa_4 / 24 = Q = -1/12 sum_e lambda_e^4 + 1/8 C4 (ordered 4-cycles),
//   kappa_5 / 120 = P,
//
// plus the vertex-peeling decomposition of Q and the remainder E6 of the
// fifth-order expansion of Log psi.
//
// Moments are obtained by exact enumeration of the 2^{n-1} columns with
// y_1 = +1 (X is invariant under xi -> -xi); the closed forms above are
// evaluated independently and serve as cross-checks.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "phad/indexing.hpp"
#include "phad/torus_point.hpp"

namespace phad {

/// Rows accepted by the 2^{n-1} enumeration routines.
inline constexpr int kEnumerationCap = kMaxRows;

class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(std::string what, std::string reason)
      : std::runtime_error(std::move(what)), reason_(std::move(reason)) {}
  /// Short machine-readable tag, e.g. "psi_cap".
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

inline void require_enumerable(int n, int cap, const char* who) {
  if (n > cap)
    throw CapExceeded(std::string(who) + ": n=" + std::to_string(n) + " exceeds enumeration cap " +
                          std::to_string(cap),
                      "enumeration_cap");
}

struct CumulantSet {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  double kappa4 = 0.0;
  double kappa5 = 0.0;

  double T() const noexcept { return kappa3 / 6.0; }
  double Q() const noexcept { return kappa4 / 24.0; }
  double P() const noexcept { return kappa5 / 120.0; }
};

/// T(lambda) = sum over triangles i<j<k of lambda_ij lambda_ik lambda_jk.
inline double triangle_form(const TorusPoint& lambda) {
  const int n = lambda.n();
  double t = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const double lij = lambda.at(i, j);
      for (int k = j + 1; k <= n; ++k) t += lij * lambda.at(i, k) * lambda.at(j, k);
    }
  return t;
}

/// Sum over ordered 4-tuples of distinct vertices of the 4-cycle monomial.
inline double cycle_form_c4(const TorusPoint& lambda) {
  const int n = lambda.n();
  if (n < 4) return 0.0;
  const Eigen::MatrixXd a = lambda.symmetric_matrix();
  double c = 0.0;
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      if (i2 == i1) continue;
      const double a12 = a(i1, i2);
      for (int i3 = 0; i3 < n; ++i3) {
        if (i3 == i1 || i3 == i2) continue;
        const double a123 = a12 * a(i2, i3);
        for (int i4 = 0; i4 < n; ++i4) {
          if (i4 == i1 || i4 == i2 || i4 == i3) continue;
          c += a123 * a(i3, i4) * a(i4, i1);
        }
      }
    }
  return c;
}

/// Q(lambda) = -1/12 sum_e lambda_e^4 + 1/8 C4(lambda).
inline double quartic_form(const TorusPoint& lambda) {
  double diag = 0.0;
  for (double x : lambda.coords()) diag += x * x * x * x;
  return -diag / 12.0 + cycle_form_c4(lambda) / 8.0;
}

/// Converts raw moments m_1..m_5 to cumulants (closed forms up to order 5).
inline CumulantSet cumulants_from_moments(const std::array<long double, 6>& m) {
  const long double m1 = m[1], m2 = m[2], m3 = m[3], m4 = m[4], m5 = m[5];
  const long double m1_2 = m1 * m1;
  CumulantSet c;
  c.kappa1 = static_cast<double>(m1);
  c.kappa2 = static_cast<double>(m2 - m1_2);
  c.kappa3 = static_cast<double>(m3 - 3 * m2 * m1 + 2 * m1_2 * m1);
  c.kappa4 = static_cast<double>(m4 - 4 * m3 * m1 - 3 * m2 * m2 + 12 * m2 * m1_2 - 6 * m1_2 * m1_2);
  c.kappa5 = static_cast<double>(m5 - 5 * m4 * m1 - 10 * m3 * m2 + 20 * m3 * m1_2 + 30 * m2 * m2 * m1 -
                                 60 * m2 * m1_2 * m1 + 24 * m1_2 * m1_2 * m1);
  return c;
}

/// Raw moments E[X_lambda^r], r = 0..5, by enumeration. E[X] = 0 identically
/// (each coordinate of Z(xi) is centered), so m_1 is stored as exactly 0.
inline std::array<long double, 6> exact_moments(const TorusPoint& lambda, int cap = kEnumerationCap) {
  const int n = lambda.n();
  require_enumerable(n, cap, "exact_moments");
  std::array<long double, 6> m{};
  m[0] = 1;
  if (n < 2) return m;
  const std::uint64_t half = std::uint64_t{1} << (n - 1);
  const auto coords = lambda.coords();
  std::vector<int> y(static_cast<std::size_t>(n));
  long double s2 = 0, s3 = 0, s4 = 0, s5 = 0;
  for (std::uint64_t mask = 0; mask < half; ++mask) {
    const ColumnBits col = canonical_column(mask);
    for (int k = 0; k < n; ++k) y[static_cast<std::size_t>(k)] = ((col >> k) & 1U) ? 1 : -1;
    long double x = 0;
    int e = 0;
    for (int i = 0; i < n; ++i) {
      long double row = 0;
      for (int j = i + 1; j < n; ++j, ++e) row += coords[static_cast<std::size_t>(e)] * y[static_cast<std::size_t>(j)];
      x += row * y[static_cast<std::size_t>(i)];
    }
    const long double x2 = x * x;
    s2 += x2;
    s3 += x2 * x;
    s4 += x2 * x2;
    s5 += x2 * x2 * x;
  }
  const long double inv = 1.0L / static_cast<long double>(half);
  m[2] = s2 * inv;
  m[3] = s3 * inv;
  m[4] = s4 * inv;
  m[5] = s5 * inv;
  return m;
}

inline CumulantSet exact_cumulants(const TorusPoint& lambda, int cap = kEnumerationCap) {
  return cumulants_from_moments(exact_moments(lambda, cap));
}

/// P(lambda) = kappa_5 / 120.
inline double quintic_form(const TorusPoint& lambda, int cap = kEnumerationCap) {
  return exact_cumulants(lambda, cap).P();
}

/// The four terms of Q_n(A) = Q_{n-1}(B) + 1/2 x^T M(B) x - 1/12 sum_a x_a^4,
/// where B drops the last vertex, x is its column and M(B) = B^2 - diag(B^2).
/// Each term is evaluated on its own.
struct PeelStep {
  double q_full = 0.0;
  double q_sub = 0.0;
  double quadratic = 0.0;     // 1/2 x^T M(B) x
  double quartic_tail = 0.0;  // -1/12 sum_a x_a^4

  double identity_gap() const noexcept { return q_full - (q_sub + quadratic + quartic_tail); }
};

inline PeelStep peel_step(const TorusPoint& lambda) {
  const int n = lambda.n();
  if (n < 2) throw std::invalid_argument("peel_step: need n >= 2");
  const Eigen::MatrixXd a = lambda.symmetric_matrix();
  const Eigen::MatrixXd b = a.topLeftCorner(n - 1, n - 1);
  const Eigen::VectorXd x = a.col(n - 1).head(n - 1);

  Eigen::MatrixXd m = b * b;
  m.diagonal().setZero();

  PeelStep out;
  out.q_full = quartic_form(lambda);
  out.q_sub = quartic_form(TorusPoint::from_symmetric_matrix(b));
  out.quadratic = 0.5 * x.dot(m * x);
  out.quartic_tail = -x.array().pow(4).sum() / 12.0;
  return out;
}

/// E6 = Log psi + s/2 + iT - Q - iP (principal logarithm).
inline std::complex<double> log_expansion_remainder(const TorusPoint& lambda, std::complex<double> psi_value,
                                                    int cap = kEnumerationCap) {
  if (!(psi_value.real() > 0.0))
    throw std::domain_error("log_expansion_remainder: Re psi must be positive");
  const double s = lambda.norm_sq();
  const double t = triangle_form(lambda);
  const double q = quartic_form(lambda);
  const double p = quintic_form(lambda, cap);
  return std::log(psi_value) + std::complex<double>(s / 2.0 - q, t - p);
}

}  // namespace phad
