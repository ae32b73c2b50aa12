// phad: command-line front end for counting, lattice, cumulant, verification,
// integration and ratio-report runs.
//
// Exit codes: 0 success, 1 a verification check failed, 2 usage error,
// 3 refusal (a cap or budget was exceeded; the JSON error record names it).

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phad/charfn.hpp"
#include "phad/counting.hpp"
#include "phad/cumulants.hpp"
#include "phad/integration.hpp"
#include "phad/lattice.hpp"
#include "phad/report.hpp"
#include "phad/verify.hpp"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRefused = 3;

struct Common {
  unsigned jobs = 1;
  std::string output;
  std::string format = "json";
};

void emit(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(c.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + c.output);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string dump(const phad::json& j) { return j.dump(2); }

std::vector<double> parse_lambda(const std::string& s) {
  std::vector<double> v;
  std::stringstream in(s);
  std::string cell;
  while (std::getline(in, cell, ',')) v.push_back(phad::parse_real(cell));
  return v;
}

// ---------------------------------------------------------------------------

struct CountArgs {
  int n = 0;
  int cols = 0;
  std::string method = "dp";
};

int run_count(const CountArgs& a, const Common& c) {
  const auto start = std::chrono::steady_clock::now();
  phad::BigCount value;
  if (a.method == "dp")
    value = phad::count_dp(a.n, a.cols, c.jobs);
  else if (a.method == "brute")
    value = phad::count_bruteforce(a.n, a.cols, c.jobs);
  else
    value = phad::count_meet_middle(a.n, a.cols, c.jobs);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  emit(c, dump(phad::to_json(phad::CountRecord{a.n, a.cols, a.method, value, ms})));
  return 0;
}

struct LatticeArgs {
  int n = 0;
  bool dump_points = false;
};

int run_lattice(const LatticeArgs& a, const Common& c) {
  const phad::LatticePsiSummary s = phad::psi_on_lattice(a.n);
  phad::json j{{"n", a.n},
               {"d", phad::edge_count(a.n)},
               {"lattice_size", s.lattice_size},
               {"expected_size", phad::expected_lattice_size(a.n)},
               {"root_counts", phad::json{{"1", s.root_counts[0]},
                                          {"i", s.root_counts[1]},
                                          {"-1", s.root_counts[2]},
                                          {"-i", s.root_counts[3]}}},
               {"expected_each", s.expected_each},
               {"unmatched", s.unmatched},
               {"max_root_distance", s.max_root_distance},
               {"degenerate", s.degenerate},
               {"consistent", s.consistent()}};
  if (a.dump_points) {
    phad::json pts = phad::json::array();
    for (const auto& e : phad::lattice_dump(a.n)) pts.push_back(phad::to_json(e));
    j["points"] = std::move(pts);
  }
  emit(c, dump(j));
  return s.consistent() ? 0 : kExitCheckFailed;
}

struct CumulantArgs {
  int n = 0;
  std::string lambda;
  std::optional<std::uint64_t> seed;
  double scale = 1.0;
};

int run_cumulants(const CumulantArgs& a, const Common& c) {
  phad::TorusPoint x(a.n);
  if (!a.lambda.empty()) {
    x = phad::TorusPoint(a.n, parse_lambda(a.lambda));
  } else if (a.seed) {
    phad::Philox4x32 rng(*a.seed, 0);
    for (int e = 0; e < x.d(); ++e) x[e] = rng.uniform(-a.scale, a.scale);
  } else {
    throw CLI::ValidationError("cumulants", "either --lambda or --seed is required");
  }
  const phad::CumulantSet cs = phad::exact_cumulants(x);
  phad::json lam = phad::json::array();
  for (double v : x.coords()) lam.push_back(v);
  phad::json j{{"n", a.n},
               {"lambda", lam},
               {"s", x.norm_sq()},
               {"cumulants", phad::to_json(cs)},
               {"triangle_form", phad::triangle_form(x)},
               {"cycle_form_c4", phad::cycle_form_c4(x)},
               {"quartic_form", phad::quartic_form(x)}};
  if (a.n >= 2) {
    const phad::PeelStep p = phad::peel_step(x);
    j["peel"] = phad::json{{"q_full", p.q_full},
                           {"q_sub", p.q_sub},
                           {"quadratic", p.quadratic},
                           {"quartic_tail", p.quartic_tail},
                           {"identity_gap", p.identity_gap()}};
  }
  const auto v = phad::psi(x).value;
  j["psi"] = phad::json{{"re", v.real()}, {"im", v.imag()}};
  if (v.real() > 0) {
    const auto e6 = phad::log_expansion_remainder(x, v);
    j["E6"] = phad::json{{"re", e6.real()}, {"im", e6.imag()}};
  }
  emit(c, dump(j));
  return 0;
}

int run_verify(const phad::VerifyConfig& cfg, const Common& c) {
  const auto results = phad::run_all_checks(cfg);
  bool ok = true;
  phad::json arr = phad::json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    arr.push_back(phad::to_json(r));
  }
  phad::json j{{"seed", cfg.seed},
               {"samples", cfg.samples},
               {"n_min", cfg.n_min},
               {"n_max", cfg.n_max},
               {"r0", cfg.r0},
               {"r", cfg.r},
               {"all_passed", ok},
               {"checks", arr}};
  emit(c, dump(j));
  return ok ? 0 : kExitCheckFailed;
}

struct IntegrateArgs {
  int n = 0;
  std::uint64_t t = 0;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  bool decomposed = false;
  bool cubic_probe = false;
  std::string residual = "bound";
  std::optional<double> delta;
  double r = 0.25;
  bool paper_defaults = false;
};

int run_integrate(IntegrateArgs a, const Common& c) {
  if (a.paper_defaults) {
    a.delta.reset();
    a.r = 0.25;
  }
  if (a.cubic_probe) {
    emit(c, dump(phad::to_json(phad::cubic_phase_probe(a.n, a.t, a.samples, a.seed, c.jobs))));
    return 0;
  }
  if (!a.decomposed) {
    const auto est = phad::integral_uniform_mc(a.n, a.t, a.samples, a.seed, c.jobs);
    emit(c, dump(phad::to_json(phad::estimate_record(est))));
    return 0;
  }
  phad::DecompositionBudget budget;
  budget.box_samples = a.samples;
  budget.core_samples = a.samples;
  budget.residual_samples = a.samples;
  budget.residual_mode = a.residual == "sampled" ? phad::ResidualMode::sampled : phad::ResidualMode::bound_only;
  const auto est = phad::integral_decomposed(a.n, a.t, budget, a.seed, c.jobs, a.r, a.delta);
  emit(c, dump(phad::to_json(est)));
  return 0;
}

struct ReportArgs {
  int n = 0;
  std::uint64_t t_min = 1;
  std::uint64_t t_max = 8;
  std::string mode = "exact";
  std::optional<std::uint64_t> seed;
  std::uint64_t samples = 100000;
};

int run_report(const ReportArgs& a, const Common& c) {
  if (a.t_min < 1 || a.t_max < a.t_min) throw CLI::ValidationError("report", "need 1 <= t-min <= t-max");
  if (a.mode == "mc" && !a.seed) throw CLI::ValidationError("report", "--seed is required with --mode mc");
  std::vector<std::uint64_t> ts;
  for (std::uint64_t t = a.t_min; t <= a.t_max; ++t) ts.push_back(t);
  const auto rows = phad::ratio_experiment(a.n, ts, a.mode == "mc" ? phad::RatioMode::mc : phad::RatioMode::exact,
                                           a.seed.value_or(0), a.samples, c.jobs);
  if (c.format == "csv") {
    emit(c, phad::ratio_table_csv(rows));
  } else {
    phad::json arr = phad::json::array();
    for (const auto& r : rows) arr.push_back(phad::to_json(phad::ratio_row(r)));
    emit(c, dump(arr));
  }
  return 0;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--jobs", c.jobs, "Worker threads (0 = hardware concurrency)")->capture_default_str();
  sub->add_option("--output,-o", c.output, "Write to this file instead of stdout");
  sub->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact counts, lattice and cumulant tools, bound sweeps and Monte Carlo integrals for partial Hadamard matrices"};
  app.require_subcommand(1);
  Common common;

  CountArgs count;
  auto* c_count = app.add_subcommand("count", "Exact number of n x s partial Hadamard matrices");
  c_count->add_option("--n", count.n, "Rows")->required()->check(CLI::Range(1, phad::kMaxRows));
  c_count->add_option("--cols,-s", count.cols, "Columns")->required()->check(CLI::NonNegativeNumber);
  c_count->add_option("--method", count.method, "dp | brute | mitm")
      ->check(CLI::IsMember({"dp", "brute", "mitm"}))
      ->capture_default_str();
  add_common(c_count, common);

  LatticeArgs lat;
  auto* c_lat = app.add_subcommand("lattice", "Enumerate the lattice and tally psi over it");
  c_lat->add_option("--n", lat.n, "Rows")->required()->check(CLI::Range(1, phad::kPsiCap));
  c_lat->add_flag("--dump", lat.dump_points, "Include every lattice point");
  add_common(c_lat, common);

  CumulantArgs cum;
  auto* c_cum = app.add_subcommand("cumulants", "Cumulants and structured forms at one point");
  c_cum->add_option("--n", cum.n, "Rows")->required()->check(CLI::Range(1, phad::kEnumerationCap));
  c_cum->add_option("--lambda", cum.lambda, "Comma-separated edge coordinates in index order");
  c_cum->add_option("--seed", cum.seed, "Draw lambda uniformly from [-scale, scale]^d");
  c_cum->add_option("--scale", cum.scale, "Half-width for random lambda")->capture_default_str();
  add_common(c_cum, common);

  phad::VerifyConfig vcfg;
  std::uint64_t vseed = 0;
  auto* c_ver = app.add_subcommand("verify", "Run the bound and identity sweeps");
  c_ver->add_option("--n-min", vcfg.n_min, "Smallest row count")->check(CLI::Range(2, phad::kPsiCap))->capture_default_str();
  c_ver->add_option("--n-max", vcfg.n_max, "Largest row count")->check(CLI::Range(2, phad::kPsiCap))->capture_default_str();
  c_ver->add_option("--samples", vcfg.samples, "Samples per sweep")->capture_default_str();
  c_ver->add_option("--seed", vseed, "Random seed")->required();
  c_ver->add_option("--r0", vcfg.r0, "Small-ball radius")->capture_default_str();
  c_ver->add_option("--r", vcfg.r, "Far-shell radius")->capture_default_str();
  add_common(c_ver, common);

  IntegrateArgs integ;
  auto* c_int = app.add_subcommand("integrate", "Monte Carlo estimate of P(S_4t = 0)");
  c_int->add_option("--n", integ.n, "Rows")->required()->check(CLI::Range(1, phad::kPsiCap));
  c_int->add_option("--t", integ.t, "Blocks (s = 4t)")->required();
  c_int->add_option("--samples", integ.samples, "Samples")->capture_default_str();
  c_int->add_option("--seed", integ.seed, "Random seed")->required();
  c_int->add_flag("--decomposed", integ.decomposed, "Primary boxes plus residual bound");
  c_int->add_flag("--cubic-probe", integ.cubic_probe, "Gaussian-core cubic phase probe");
  c_int->add_option("--residual", integ.residual, "bound | sampled")
      ->check(CLI::IsMember({"bound", "sampled"}))
      ->capture_default_str();
  c_int->add_option("--delta", integ.delta, "Primary box half-width (default sqrt(2d/t), clamped)");
  c_int->add_option("--r", integ.r, "Far-shell radius")->capture_default_str();
  c_int->add_flag("--paper-defaults", integ.paper_defaults, "delta^2 = 2d/t and r = r0 = 0.25");
  add_common(c_int, common);

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "Table of N/A against the first-order prediction");
  c_rep->add_option("--n", rep.n, "Rows")->required()->check(CLI::Range(1, phad::kMaxRows));
  c_rep->add_option("--t-min", rep.t_min, "First t")->capture_default_str();
  c_rep->add_option("--t-max", rep.t_max, "Last t")->capture_default_str();
  c_rep->add_option("--mode", rep.mode, "exact | mc")->check(CLI::IsMember({"exact", "mc"}))->capture_default_str();
  c_rep->add_option("--seed", rep.seed, "Random seed (mc mode)");
  c_rep->add_option("--samples", rep.samples, "Samples per t (mc mode)")->capture_default_str();
  add_common(c_rep, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*c_count) return run_count(count, common);
    if (*c_lat) return run_lattice(lat, common);
    if (*c_cum) return run_cumulants(cum, common);
    if (*c_ver) {
      vcfg.seed = vseed;
      vcfg.jobs = common.jobs;
      if (vcfg.n_max < vcfg.n_min) throw CLI::ValidationError("verify", "need n-min <= n-max");
      return run_verify(vcfg, common);
    }
    if (*c_int) return run_integrate(integ, common);
    if (*c_rep) return run_report(rep, common);
  } catch (const phad::CapExceeded& e) {
    std::cout << phad::json{{"error", "refused"}, {"reason", e.reason()}, {"message", e.what()}}.dump() << '\n';
    return kExitRefused;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
