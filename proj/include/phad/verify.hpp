// Seeded sweeps that test the pointwise bounds and identities on random
// points. Each sweep reports its worst margin and violation count; sample i
// of a sweep draws from Philox stream (seed, i), so results do not depend on
// the worker count.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "phad/charfn.hpp"
#include "phad/counting.hpp"
#include "phad/cumulants.hpp"
#include "phad/lattice.hpp"
#include "phad/parallel.hpp"
#include "phad/rng.hpp"

namespace phad {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  // min over samples of rhs - lhs
  std::map<std::string, double> measured;                         // empirical constants, reported only
};

namespace detail {

struct SweepPartial {
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  double measured_max = 0.0;
};

inline void merge_sweep(SweepPartial& a, const SweepPartial& b) {
  a.samples += b.samples;
  a.violations += b.violations;
  a.worst = std::min(a.worst, b.worst);
  a.measured_max = std::max(a.measured_max, b.measured_max);
}

inline CheckResult finish(std::string name, const SweepPartial& p) {
  CheckResult r;
  r.name = std::move(name);
  r.samples = p.samples;
  r.violations = p.violations;
  r.worst_margin = p.worst;
  r.passed = p.violations == 0;
  return r;
}

/// Uniform point of the cube [-h, h]^d.
inline void fill_uniform(TorusPoint& x, Philox4x32& rng, double h) {
  for (int k = 0; k < x.d(); ++k) x[k] = rng.uniform(-h, h);
}

/// Uniform direction with s(lambda) = radius_sq.
inline void fill_sphere(TorusPoint& x, Philox4x32& rng, double radius_sq) {
  double norm = 0.0;
  do {
    for (int k = 0; k < x.d(); ++k) x[k] = rng.normal();
    norm = x.norm_sq();
  } while (norm == 0.0);
  const double c = std::sqrt(radius_sq / norm);
  for (int k = 0; k < x.d(); ++k) x[k] *= c;
}

/// Runs `sample(rng, partial)` for i in [0, samples) with stream (seed, i).
template <class Sample>
SweepPartial sweep(std::uint64_t samples, std::uint64_t seed, unsigned jobs, Sample sample) {
  return chunked_reduce<SweepPartial>(
      samples, jobs,
      [&](std::uint64_t b, std::uint64_t e) {
        SweepPartial p;
        for (std::uint64_t i = b; i < e; ++i) {
          Philox4x32 rng(seed, i);
          sample(rng, p);
          ++p.samples;
        }
        return p;
      },
      merge_sweep);
}

inline void record(SweepPartial& p, const BoundCheck& b) {
  p.worst = std::min(p.worst, b.margin());
  if (!b.holds) ++p.violations;
}

/// Relative agreement, measured against max(|a|, |b|, scale).
inline double relative_gap(double a, double b, double scale) {
  const double den = std::max({std::abs(a), std::abs(b), scale});
  return den > 0 ? std::abs(a - b) / den : 0.0;
}

}  // namespace detail

/// |psi|^2 <= 1/2 + 1/2 prod cos(2 lambda_ik) for every k, lambda uniform in [-pi, pi]^d.
inline CheckResult verify_cosine_bound(int n, std::uint64_t samples, std::uint64_t seed, unsigned jobs = 1) {
  const auto p = detail::sweep(samples, seed, jobs, [&](Philox4x32& rng, detail::SweepPartial& part) {
    TorusPoint x(n);
    detail::fill_uniform(x, rng, std::numbers::pi);
    for (int k = 1; k <= n; ++k) detail::record(part, check_cosine_bound(x, k));
  });
  return detail::finish("cosine_product", p);
}

/// |psi - psi_G| <= 1.5 J, with s(lambda) uniform in [0, 4].
inline CheckResult verify_lindeberg(int n, std::uint64_t samples, std::uint64_t seed, unsigned jobs = 1) {
  const auto p = detail::sweep(samples, seed, jobs, [&](Philox4x32& rng, detail::SweepPartial& part) {
    TorusPoint x(n);
    detail::fill_sphere(x, rng, 4.0 * rng.uniform());
    detail::record(part, check_lindeberg(x));
  });
  return detail::finish("lindeberg", p);
}

/// Re psi in [3/4, 1] with s(lambda) uniform in [0, 1/2].
inline CheckResult verify_real_part(int n, std::uint64_t samples, std::uint64_t seed, unsigned jobs = 1) {
  const auto p = detail::sweep(samples, seed, jobs, [&](Philox4x32& rng, detail::SweepPartial& part) {
    TorusPoint x(n);
    detail::fill_sphere(x, rng, 0.5 * rng.uniform());
    const BoundCheck b = check_real_part(x);
    part.worst = std::min(part.worst, b.lhs - b.rhs);
    if (!b.holds) ++part.violations;
  });
  return detail::finish("real_part", p);
}

/// |psi|^{4t} <= e^{-1.5 t s} with s uniform in [0, r0^2], t uniform in 1..64.
inline CheckResult verify_small_ball(int n, std::uint64_t samples, std::uint64_t seed, double r0 = 0.25,
                                     unsigned jobs = 1) {
  const auto p = detail::sweep(samples, seed, jobs, [&](Philox4x32& rng, detail::SweepPartial& part) {
    TorusPoint x(n);
    const std::uint64_t t = 1 + rng.below(64);
    detail::fill_sphere(x, rng, r0 * r0 * rng.uniform());
    detail::record(part, check_small_ball(x, t, r0));
  });
  return detail::finish("small_ball", p);
}

inline CheckResult verify_odd_cells(int n, std::uint64_t samples, std::uint64_t seed, unsigned jobs = 1) {
  const OddCellSweep s = verify_odd_cell_bound(n, samples, seed, jobs);
  CheckResult r;
  r.name = "odd_cell";
  r.samples = s.samples;
  r.violations = s.violations;
  r.worst_margin = 0.5 - s.max_psi_sq;
  r.passed = s.violations == 0;
  r.measured["max_psi_sq"] = s.max_psi_sq;
  return r;
}

/// Far-shell certificates on points of B_{pi/4} outside D_r, t uniform in 1..16.
inline CheckResult verify_far_shell(int n, std::uint64_t samples, std::uint64_t seed, double r = 0.25,
                                    unsigned jobs = 1) {
  if (n < 2) throw std::invalid_argument("verify_far_shell: need n >= 2");
  const auto p = detail::sweep(samples, seed, jobs, [&](Philox4x32& rng, detail::SweepPartial& part) {
    TorusPoint x(n);
    const std::uint64_t t = 1 + rng.below(16);
    do detail::fill_uniform(x, rng, kQuarterPi);
    while (x.norm_sq() <= r * r);
    const FarShellCertificate c = far_shell_certificate(x, t, r);
    part.worst = std::min(part.worst, c.bound - c.psi_power_abs);
    if (!c.holds) ++part.violations;
  });
  CheckResult res = detail::finish("far_shell", p);
  const FarShellConstants c = far_shell_constants(r);
  res.measured["q_gauss"] = c.q_gauss;
  res.measured["eta"] = c.eta;
  res.measured["q_small"] = c.q_small;
  res.measured["q_big"] = c.q_big;
  res.measured["a_r"] = c.a_r;
  return res;
}

/// |psi_G| <= (1 + 2 s)^{-1/4} with s uniform in [0, 4].
inline CheckResult verify_gaussian_contraction(int n, std::uint64_t samples, std::uint64_t seed, unsigned jobs = 1) {
  const auto p = detail::sweep(samples, seed, jobs, [&](Philox4x32& rng, detail::SweepPartial& part) {
    TorusPoint x(n);
    detail::fill_sphere(x, rng, 4.0 * rng.uniform());
    detail::record(part, check_gaussian_contraction(x));
  });
  return detail::finish("gaussian_contraction", p);
}

/// ||H||_4 <= 3^{q/2} ||H||_2 for random Rademacher polynomials of degree
/// <= q (q in 1..3) on m <= 12 variables, both norms by enumeration.
inline CheckResult verify_hypercontractivity(std::uint64_t samples, std::uint64_t seed, unsigned jobs = 1) {
  auto p = detail::sweep(samples, seed, jobs, [&](Philox4x32& rng, detail::SweepPartial& part) {
    const int m = 2 + static_cast<int>(rng.below(11));
    const int q = 1 + static_cast<int>(rng.below(3));
    std::vector<std::uint32_t> monomials;
    std::vector<double> coeffs;
    const std::uint32_t full = std::uint32_t{1} << m;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
      if (std::popcount(mask) > q) continue;
      if (rng.uniform() < 0.5) {
        monomials.push_back(mask);
        coeffs.push_back(rng.normal());
      }
    }
    if (monomials.empty()) return;
    CompensatedSum l2, l4;
    for (std::uint32_t x = 0; x < full; ++x) {
      double h = 0.0;
      for (std::size_t k = 0; k < monomials.size(); ++k)
        h += (std::popcount(monomials[k] & x) % 2 ? -1.0 : 1.0) * coeffs[k];
      const double h2 = h * h;
      l2.add(h2);
      l4.add(h2 * h2);
    }
    const double n2 = std::sqrt(l2.value() / full);
    const double n4 = std::pow(l4.value() / full, 0.25);
    const double rhs = std::pow(3.0, q / 2.0) * n2;
    part.worst = std::min(part.worst, (rhs - n4) / rhs);
    part.measured_max = std::max(part.measured_max, n4 / n2);
    if (n4 > rhs * (1.0 + 1e-12)) ++part.violations;
  });
  CheckResult r = detail::finish("hypercontractivity", p);
  r.measured["max_l4_over_l2"] = p.measured_max;
  return r;
}

/// Peeling identity gap <= 1e-12 with lambda uniform in [-1, 1]^d.
inline CheckResult verify_peeling(int n, std::uint64_t samples, std::uint64_t seed, unsigned jobs = 1) {
  const auto p = detail::sweep(samples, seed, jobs, [&](Philox4x32& rng, detail::SweepPartial& part) {
    TorusPoint x(n);
    detail::fill_uniform(x, rng, 1.0);
    const double gap = std::abs(peel_step(x).identity_gap());
    part.worst = std::min(part.worst, 1e-12 - gap);
    part.measured_max = std::max(part.measured_max, gap);
    if (gap > 1e-12) ++part.violations;
  });
  CheckResult r = detail::finish("peeling", p);
  r.measured["max_gap"] = p.measured_max;
  return r;
}

/// kappa2 = s, kappa3/6 = T, kappa4/24 = Q to 1e-10 relative, lambda
/// uniform in [-1, 1]^d. The relative scale of kappa_r is max(|a|, |b|, s^{r/2}).
inline CheckResult verify_cumulants(int n, std::uint64_t samples, std::uint64_t seed, unsigned jobs = 1,
                                    double tol = 1e-10) {
  const auto p = detail::sweep(samples, seed, jobs, [&](Philox4x32& rng, detail::SweepPartial& part) {
    TorusPoint x(n);
    detail::fill_uniform(x, rng, 1.0);
    const CumulantSet c = exact_cumulants(x);
    const double s = x.norm_sq();
    const double g2 = detail::relative_gap(c.kappa2, s, 0.0);
    const double g3 = detail::relative_gap(c.T(), triangle_form(x), std::pow(s, 1.5) / 6.0);
    const double g4 = detail::relative_gap(c.Q(), quartic_form(x), s * s / 24.0);
    const double g = std::max({g2, g3, g4});
    part.worst = std::min(part.worst, tol - g);
    part.measured_max = std::max(part.measured_max, g);
    if (g > tol) ++part.violations;
  });
  CheckResult r = detail::finish("cumulant_identities", p);
  r.measured["max_relative_gap"] = p.measured_max;
  return r;
}

/// Measured C2 = max |E6| / s^3 over s(lambda) uniform in [0.05, 0.25].
/// Fails only when Log psi is undefined (Re psi <= 0) or nonfinite.
inline CheckResult verify_log_expansion(int n, std::uint64_t samples, std::uint64_t seed, unsigned jobs = 1) {
  const auto p = detail::sweep(samples, seed, jobs, [&](Philox4x32& rng, detail::SweepPartial& part) {
    TorusPoint x(n);
    const double s = 0.05 + 0.2 * rng.uniform();
    detail::fill_sphere(x, rng, s);
    const auto v = psi(x).value;
    if (!(v.real() > 0.0)) {
      ++part.violations;
      return;
    }
    const double ratio = std::abs(log_expansion_remainder(x, v)) / (s * s * s);
    if (!std::isfinite(ratio)) ++part.violations;
    part.measured_max = std::max(part.measured_max, ratio);
  });
  CheckResult r = detail::finish("log_expansion", p);
  r.worst_margin = 0.0;
  r.measured["C2_measured"] = p.measured_max;
  return r;
}

/// Radial moment ratio <= (2m-1)!!/4^m for d in 1..64, m in 0..8.
inline CheckResult verify_radial_moments() {
  CheckResult r;
  r.name = "radial_moments";
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (int m = 0; m <= 8; ++m) {
    double worst_ratio = 0.0;
    for (int d = 1; d <= 64; ++d) {
      const RadialMoment rm = gaussian_radial_moment(d, 1.0, m);
      ++r.samples;
      worst_ratio = std::max(worst_ratio, rm.bound_ratio);
      r.worst_margin = std::min(r.worst_margin, rm.C_m - rm.bound_ratio);
      if (!rm.holds) ++r.violations;
    }
    r.measured["C_" + std::to_string(m)] = worst_ratio;
  }
  r.passed = r.violations == 0;
  return r;
}

/// psi(lambda + mu) = psi(lambda) psi(mu) for lambda in Lambda, mu uniform in B_{pi/4}.
inline CheckResult verify_multiplicativity(int n, std::uint64_t per_point, std::uint64_t seed) {
  CheckResult r;
  r.name = "multiplicativity";
  r.worst_margin = std::numeric_limits<double>::infinity();
  std::uint64_t idx = 0;
  double worst_gap = 0.0;
  for_each_lattice_point(n, [&](const LatticePoint& lp) {
    const TorusPoint lam = lp.coordinates();
    const auto pl = psi(lam).value;
    for (std::uint64_t k = 0; k < per_point; ++k, ++idx) {
      Philox4x32 rng(seed, idx);
      TorusPoint mu(n);
      detail::fill_uniform(mu, rng, kQuarterPi);
      const double gap = std::abs(psi(lam + mu).value - pl * psi(mu).value);
      worst_gap = std::max(worst_gap, gap);
      r.worst_margin = std::min(r.worst_margin, 1e-12 - gap);
      ++r.samples;
      if (gap > 1e-12) ++r.violations;
    }
  });
  r.passed = r.violations == 0;
  r.measured["max_gap"] = worst_gap;
  return r;
}

struct VerifyConfig {
  int n_min = 2;
  int n_max = 6;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  double r0 = 0.25;
  double r = 0.25;
  unsigned jobs = 1;
};

/// All sweeps for n in [n_min, n_max]; names carry the row count as "name[n=k]".
inline std::vector<CheckResult> run_all_checks(const VerifyConfig& cfg) {
  std::vector<CheckResult> out;
  auto tag = [](CheckResult r, int n) {
    r.name += "[n=" + std::to_string(n) + "]";
    return r;
  };
  std::uint64_t stream = cfg.seed;
  auto next_seed = [&] { return stream++ * 0x100000001b3ULL + 0x9e37ULL; };
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    out.push_back(tag(verify_cosine_bound(n, cfg.samples, next_seed(), cfg.jobs), n));
    out.push_back(tag(verify_lindeberg(n, cfg.samples, next_seed(), cfg.jobs), n));
    out.push_back(tag(verify_real_part(n, cfg.samples, next_seed(), cfg.jobs), n));
    out.push_back(tag(verify_small_ball(n, cfg.samples, next_seed(), cfg.r0, cfg.jobs), n));
    out.push_back(tag(verify_odd_cells(n, cfg.samples, next_seed(), cfg.jobs), n));
    out.push_back(tag(verify_far_shell(n, cfg.samples, next_seed(), cfg.r, cfg.jobs), n));
    out.push_back(tag(verify_gaussian_contraction(n, cfg.samples, next_seed(), cfg.jobs), n));
    out.push_back(tag(verify_cumulants(n, cfg.samples, next_seed(), cfg.jobs), n));
    out.push_back(tag(verify_log_expansion(n, cfg.samples, next_seed(), cfg.jobs), n));
    if (n >= 3) out.push_back(tag(verify_peeling(n, cfg.samples, next_seed(), cfg.jobs), n));
  }
  out.push_back(verify_hypercontractivity(std::min<std::uint64_t>(cfg.samples, 2000), next_seed(), cfg.jobs));
  out.push_back(verify_radial_moments());
  out.push_back(tag(verify_multiplicativity(3, 100, next_seed()), 3));
  return out;
}

}  // namespace phad
