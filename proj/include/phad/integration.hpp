// Monte Carlo estimates of P(S_{4t} = 0) = (2 pi)^{-d} int_{T^d} psi^{4t},
// the decomposed estimator (primary boxes + bounded residual), the cubic
// phase probe on the Gaussian core, and exact-vs-asymptotic ratio tables.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phad/charfn.hpp"
#include "phad/counting.hpp"
#include "phad/cumulants.hpp"
#include "phad/lattice.hpp"
#include "phad/parallel.hpp"
#include "phad/rng.hpp"

namespace phad {

struct EstimateWithError {
  std::string method;
  int n = 0;
  std::uint64_t t = 0;
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double imag_mean = 0.0;
  double imag_std_error = 0.0;
  double acceptance_rate = 1.0;

  /// |imag_mean| <= 3 imag_std_error (P(S = 0) is real).
  bool imag_consistent() const noexcept { return std::abs(imag_mean) <= 3.0 * imag_std_error + 1e-15; }
};

namespace detail {

struct ComplexStats {
  SampleStats re;
  SampleStats im;
  std::uint64_t proposals = 0;
};

inline void merge_stats(ComplexStats& acc, const ComplexStats& p) {
  acc.re.merge(p.re);
  acc.im.merge(p.im);
  acc.proposals += p.proposals;
}

inline void fill_estimate(EstimateWithError& out, const ComplexStats& st, double scale) {
  out.value = scale * st.re.mean();
  out.std_error = scale * st.re.std_error();
  out.imag_mean = scale * st.im.mean();
  out.imag_std_error = scale * st.im.std_error();
  out.acceptance_rate =
      st.proposals ? static_cast<double>(st.re.count()) / static_cast<double>(st.proposals) : 1.0;
}

}  // namespace detail

/// Average of psi(lambda)^{4t} over uniform lambda in (-pi, pi]^d.
inline EstimateWithError integral_uniform_mc(int n, std::uint64_t t, std::uint64_t samples, std::uint64_t seed,
                                             unsigned jobs = 1, int cap = kPsiCap) {
  require_enumerable(n, cap, "integral_uniform_mc");
  EstimateWithError out{"uniform_mc", n, t, 1.0, 0.0, samples, seed};
  if (t == 0) return out;
  if (samples == 0) throw std::invalid_argument("integral_uniform_mc: samples must be positive");
  const int d = edge_count(n);
  auto body = [&](std::uint64_t b, std::uint64_t e) {
    detail::ComplexStats st;
    TorusPoint lambda(n);
    for (std::uint64_t i = b; i < e; ++i) {
      Philox4x32 rng(seed, i);
      for (int k = 0; k < d; ++k) lambda[k] = rng.uniform(-std::numbers::pi, std::numbers::pi);
      const auto v = psi_power(psi(lambda, cap), 4 * t).value;
      st.re.add(v.real());
      st.im.add(v.imag());
      ++st.proposals;
    }
    return st;
  };
  const auto st = chunked_reduce<detail::ComplexStats>(samples, jobs, body, detail::merge_stats);
  detail::fill_estimate(out, st, 1.0);
  return out;
}

enum class ResidualMode { bound_only, sampled };

struct DecompositionBudget {
  std::uint64_t core_samples = 100000;  // Gaussian-core draws for the cubic diagnostic
  std::uint64_t box_samples = 100000;   // importance samples in B_delta
  ResidualMode residual_mode = ResidualMode::bound_only;
  std::uint64_t residual_samples = 100000;
};

/// Pieces of the bound on |P(S_{4t}=0) - primary|, all in probability units.
struct ResidualBound {
  double odd_cells = 0.0;   // 2^{-2t}
  double near_shell = 0.0;  // K_n e^{-t delta^2/2} (pi/t)^{d/2}, 0 when delta >= r
  double far_shell = 0.0;   // 2^{1-n} E_r(n,t)
  double total() const noexcept { return odd_cells + near_shell + far_shell; }
};

struct DecomposedEstimate {
  EstimateWithError primary;
  ResidualBound residual;
  std::optional<EstimateWithError> residual_sampled;
  double delta = 0.0;
  bool delta_clamped = false;
  double r = 0.0;
  FarShellConstants constants;
  /// Constants of the asymptotic residual estimate are existence-only.
  bool asymptotic_constants_verifiable = false;

  double residual_bound() const noexcept { return residual.total(); }
  /// exact lies within primary +- (residual bound + z standard errors).
  bool brackets(double exact, double z = 3.0) const noexcept {
    return std::abs(exact - primary.value) <= residual.total() + z * primary.std_error;
  }
};

inline ResidualBound residual_bound(int n, std::uint64_t t, double delta, double r) {
  const int d = edge_count(n);
  const double td = static_cast<double>(t);
  ResidualBound b;
  b.odd_cells = std::pow(2.0, -2.0 * td);
  if (delta < r && t > 0) {
    const double log_k = (2.0 * d - n + 1.0) * std::numbers::ln2 - d * std::log(2.0 * std::numbers::pi);
    b.near_shell = std::exp(log_k - td * delta * delta / 2.0 + 0.5 * d * std::log(std::numbers::pi / td));
  }
  const FarShellConstants c = far_shell_constants(r);
  const double p = 4.0 * td;
  const double e_r = std::pow(c.q_small, p) + std::pow(c.q_big, p) +
                     std::exp(-c.a_r * td * std::pow(static_cast<double>(n), -2.0 / 3.0));
  b.far_shell = std::pow(2.0, 1.0 - n) * e_r;
  return b;
}

/// primary = K_n int_{B_delta} psi^{4t}, by importance sampling from the
/// Gaussian e^{-2t s(mu)} truncated to B_delta (per-coordinate rejection).
/// Weight: Re psi^{4t} * Z1^d * e^{2 t s}, Z1 = sqrt(pi/2t) erf(delta sqrt(2t)).
inline DecomposedEstimate integral_decomposed(int n, std::uint64_t t, const DecompositionBudget& budget,
                                              std::uint64_t seed, unsigned jobs = 1, double r = 0.25,
                                              std::optional<double> delta_override = std::nullopt,
                                              int cap = kPsiCap) {
  require_enumerable(n, cap, "integral_decomposed");
  if (budget.box_samples == 0 || budget.core_samples == 0)
    throw std::invalid_argument("integral_decomposed: budgets must be positive");
  if (!(r > 0.0 && r < kQuarterPi)) throw std::invalid_argument("integral_decomposed: r outside (0, pi/4)");
  const int d = edge_count(n);

  DecomposedEstimate out;
  out.r = r;
  out.constants = far_shell_constants(r);
  if (delta_override) {
    if (!(*delta_override > 0.0 && *delta_override <= kQuarterPi))
      throw std::invalid_argument("integral_decomposed: delta outside (0, pi/4]");
    out.delta = *delta_override;
  } else {
    const DeltaChoice dc = default_delta(d, t);
    out.delta = dc.delta;
    out.delta_clamped = dc.clamped;
  }
  const double delta = out.delta;
  const double td = static_cast<double>(t);
  const double log_k = (2.0 * d - n + 1.0) * std::numbers::ln2 - d * std::log(2.0 * std::numbers::pi);

  EstimateWithError& prim = out.primary;
  prim = EstimateWithError{"decomposed", n, t, 0.0, 0.0, budget.box_samples, seed};

  if (t == 0) {
    // psi^0 = 1: the box integral is its volume.
    prim.value = std::exp(log_k + d * std::log(2.0 * delta));
    prim.acceptance_rate = 1.0;
    out.residual = ResidualBound{1.0, 0.0, 0.0};
    return out;
  }

  const double sigma = 1.0 / std::sqrt(4.0 * td);
  const double log_z1 = 0.5 * std::log(std::numbers::pi / (2.0 * td)) + std::log(std::erf(delta * std::sqrt(2.0 * td)));
  auto body = [&](std::uint64_t b, std::uint64_t e) {
    detail::ComplexStats st;
    TorusPoint mu(n);
    for (std::uint64_t i = b; i < e; ++i) {
      Philox4x32 rng(seed, i);
      for (int k = 0; k < d; ++k) {
        double x;
        do {
          x = sigma * rng.normal();
          ++st.proposals;
        } while (std::abs(x) > delta);
        mu[k] = x;
      }
      const CharValue v = psi_power(psi(mu, cap), 4 * t);
      const double log_w = v.log_mag + d * log_z1 + 2.0 * td * mu.norm_sq();
      const double w = std::exp(log_w);
      st.re.add(w * std::cos(v.arg));
      st.im.add(w * std::sin(v.arg));
    }
    return st;
  };
  const auto st = chunked_reduce<detail::ComplexStats>(budget.box_samples, jobs, body, detail::merge_stats);
  detail::fill_estimate(prim, st, std::exp(log_k));
  // Per-coordinate acceptance; report the per-sample rate (all d coordinates accepted).
  prim.acceptance_rate = st.proposals ? static_cast<double>(st.re.count() * static_cast<std::uint64_t>(d)) /
                                            static_cast<double>(st.proposals)
                                      : 1.0;

  out.residual = residual_bound(n, t, delta, r);

  if (budget.residual_mode == ResidualMode::sampled) {
    // (2 pi)^{-d} int over T^d minus the even primary boxes, uniform sampling.
    const std::uint64_t rseed = seed ^ 0x9e3779b97f4a7c15ULL;
    auto rbody = [&](std::uint64_t b, std::uint64_t e) {
      detail::ComplexStats rs;
      TorusPoint g(n);
      for (std::uint64_t i = b; i < e; ++i) {
        Philox4x32 rng(rseed, i);
        for (int k = 0; k < d; ++k) g[k] = rng.uniform(-std::numbers::pi, std::numbers::pi);
        const CellAssignment cell = cell_of(g);
        ++rs.proposals;
        if (cell.even && cell.offset.max_abs() <= delta) {
          rs.re.add(0.0);
          rs.im.add(0.0);
          continue;
        }
        const auto v = psi_power(psi(g, cap), 4 * t).value;
        rs.re.add(v.real());
        rs.im.add(v.imag());
      }
      return rs;
    };
    const auto rs = chunked_reduce<detail::ComplexStats>(budget.residual_samples, jobs, rbody, detail::merge_stats);
    EstimateWithError res{"residual_uniform_mc", n, t, 0.0, 0.0, budget.residual_samples, rseed};
    detail::fill_estimate(res, rs, 1.0);
    res.acceptance_rate = 1.0;
    out.residual_sampled = res;
  }
  return out;
}

struct CubicPhaseProbe {
  int n = 0;
  std::uint64_t t = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double imag_mean = 0.0;  // mean sin(4t T)
  double imag_std_error = 0.0;
  double deficit = 0.0;  // mean 1 - cos(4t T)
  double deficit_std_error = 0.0;
  double predicted = 0.0;  // C(n,3)/(8t)
  double acceptance_rate = 1.0;

  double relative_error() const noexcept { return predicted > 0 ? std::abs(deficit - predicted) / predicted : 0.0; }
};

/// Draws mu with i.i.d. N(0, 1/(4t)) coordinates conditioned on s(mu) <= d/t
/// and averages e^{-4 i t T(mu)} split into its sine and 1 - cosine parts.
inline CubicPhaseProbe cubic_phase_probe(int n, std::uint64_t t, std::uint64_t samples, std::uint64_t seed,
                                         unsigned jobs = 1) {
  if (n < 1) throw std::invalid_argument("cubic_phase_probe: n must be >= 1");
  if (t == 0) throw std::invalid_argument("cubic_phase_probe: t must be >= 1");
  if (samples == 0) throw std::invalid_argument("cubic_phase_probe: samples must be positive");
  const int d = edge_count(n);
  const double td = static_cast<double>(t);
  const double sigma = 1.0 / std::sqrt(4.0 * td);
  const double core = static_cast<double>(d) / td;
  struct Partial {
    SampleStats im, def;
    std::uint64_t proposals = 0;
  };
  auto body = [&](std::uint64_t b, std::uint64_t e) {
    Partial p;
    TorusPoint mu(n);
    for (std::uint64_t i = b; i < e; ++i) {
      Philox4x32 rng(seed, i);
      do {
        for (int k = 0; k < d; ++k) mu[k] = sigma * rng.normal();
        ++p.proposals;
      } while (mu.norm_sq() > core);
      const double phase = 4.0 * td * triangle_form(mu);
      p.im.add(std::sin(phase));
      p.def.add(1.0 - std::cos(phase));
    }
    return p;
  };
  const Partial p = chunked_reduce<Partial>(samples, jobs, body, [](Partial& acc, const Partial& q) {
    acc.im.merge(q.im);
    acc.def.merge(q.def);
    acc.proposals += q.proposals;
  });
  CubicPhaseProbe out;
  out.n = n;
  out.t = t;
  out.samples = samples;
  out.seed = seed;
  out.imag_mean = p.im.mean();
  out.imag_std_error = p.im.std_error();
  out.deficit = p.def.mean();
  out.deficit_std_error = p.def.std_error();
  const double nd = n;
  out.predicted = nd * (nd - 1) * (nd - 2) / 6.0 / (8.0 * td);
  out.acceptance_rate = static_cast<double>(samples) / static_cast<double>(p.proposals);
  return out;
}

enum class RatioMode { exact, mc };

struct RatioReport {
  int n = 0;
  std::uint64_t t = 0;
  std::string method;
  std::optional<BigCount> N;  // exact mode
  double log_N = 0.0;         // natural log of N (or of its estimate)
  double log_A = 0.0;
  double ratio = 0.0;
  double ratio_std_error = 0.0;  // mc mode only
  double predicted_ratio = 0.0;
  double t_times_gap = 0.0;
  bool refused = false;
  std::string refusal_reason;
};

/// N_{n,4t} / A_{n,4t} per t. Exact mode counts with the meet-in-the-middle
/// walk table; mc mode uses 2^{4nt} times the uniform estimate. Refusals are
/// recorded per row and the remaining rows still run.
inline std::vector<RatioReport> ratio_experiment(int n, const std::vector<std::uint64_t>& t_list, RatioMode mode,
                                                 std::uint64_t seed = 0, std::uint64_t samples = 100000,
                                                 unsigned jobs = 1,
                                                 const CountLimits& lim = CountLimits::from_env()) {
  std::vector<RatioReport> rows;
  for (std::uint64_t t : t_list) {
    RatioReport row;
    row.n = n;
    row.t = t;
    row.method = mode == RatioMode::exact ? "exact" : "mc";
    try {
      const AsymptoticReport a = asymptotic_scale(n, t);
      row.log_A = a.log_A;
      row.predicted_ratio = a.predicted_ratio;
      if (mode == RatioMode::exact) {
        if (4 * t > 32767) throw CapExceeded("ratio_experiment: s exceeds key range", "dp_key_range");
        BigCount N = count_meet_middle(n, static_cast<int>(4 * t), jobs, lim);
        row.log_N = log_e(N);
        row.ratio = std::exp(row.log_N - row.log_A);
        row.N = std::move(N);
      } else {
        const EstimateWithError est = integral_uniform_mc(n, t, samples, seed, jobs);
        // ratio = P / A_hat with A_hat = A 2^{-4nt}.
        const double inv_a_hat = std::exp(-a.log_A_hat);
        row.ratio = est.value * inv_a_hat;
        row.ratio_std_error = est.std_error * inv_a_hat;
        row.log_N = est.value > 0 ? std::log(est.value) + 4.0 * n * static_cast<double>(t) * std::numbers::ln2
                                  : -std::numeric_limits<double>::infinity();
      }
      row.t_times_gap = static_cast<double>(t) * (1.0 - row.ratio);
    } catch (const CapExceeded& e) {
      row.refused = true;
      row.refusal_reason = e.reason();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace phad
