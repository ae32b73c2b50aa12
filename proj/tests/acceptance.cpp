// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "phad/counting.hpp"
#include "phad/cumulants.hpp"
#include "phad/integration.hpp"
#include "phad/lattice.hpp"
#include "phad/verify.hpp"

using namespace phad;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (!passed) detail << "; ";
    passed = false;
    detail << why;
  }
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<void(Outcome&)> body;
};

std::string run_cli(const std::string& args, int& status) {
  const std::string cmd = std::string(PHAD_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t k;
  while ((k = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), k);
  const int st = pclose(p);
  status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return out;
}

void oracle_equality(Outcome& o) {
  int pairs = 0;
  for (int n = 1; n <= 24; ++n)
    for (int s = 0; n * s <= 24; ++s) {
      const BigCount dp = count_dp(n, s);
      const BigCount bf = count_bruteforce(n, s);
      ++pairs;
      if (dp != bf) o.fail("n=" + std::to_string(n) + " s=" + std::to_string(s) + " dp=" + to_decimal(dp) +
                           " brute=" + to_decimal(bf));
    }
  o.detail << (o.passed ? "" : "; ") << pairs << " (n,s) pairs";
}

void known_values(Outcome& o) {
  const std::array<std::array<int, 3>, 3> fixed{{{2, 4, 96}, {3, 4, 384}, {4, 4, 768}}};
  for (const auto& [n, s, want] : fixed) {
    const BigCount got = count_dp(n, s);
    if (got != want || count_bruteforce(n, s) != want)
      o.fail("N_{" + std::to_string(n) + "," + std::to_string(s) + "}=" + to_decimal(got));
  }
  for (unsigned k = 1; k <= 16; ++k) {
    const BigCount want = pow2(2 * k) * binomial(2 * k, k);
    const BigCount got = count_dp(2, static_cast<int>(2 * k));
    if (got != want) o.fail("N_{2," + std::to_string(2 * k) + "}=" + to_decimal(got) + " want " + to_decimal(want));
  }
  if (o.passed) o.detail << "N_{2,32}=" << to_decimal(count_dp(2, 32));
}

void cumulant_identities(Outcome& o) {
  double worst_rel = 0.0;
  double worst_peel = 0.0;
  for (int n = 2; n <= 8; ++n) {
    const auto r = verify_cumulants(n, 100, 1000 + n);
    worst_rel = std::max(worst_rel, r.measured.at("max_relative_gap"));
    if (!r.passed) o.fail("cumulants n=" + std::to_string(n));
  }
  for (int n = 3; n <= 10; ++n) {
    const auto r = verify_peeling(n, 1000, 2000 + n);
    worst_peel = std::max(worst_peel, r.measured.at("max_gap"));
    if (!r.passed) o.fail("peeling n=" + std::to_string(n));
  }
  o.detail << (o.passed ? "" : "; ") << "max relative gap " << worst_rel << ", max peeling gap " << worst_peel;
}

void lattice_structure(Outcome& o) {
  for (int n = 3; n <= 5; ++n) {
    const auto c = enumerate_lattice(n, false);
    if (c.even_count != expected_lattice_size(n)) o.fail("|Lambda| at n=" + std::to_string(n));
  }
  for (int n = 3; n <= 4; ++n) {
    const auto s = psi_on_lattice(n, 1e-12);
    if (!s.consistent() || s.degenerate) o.fail("psi multiset at n=" + std::to_string(n));
  }
  const auto m = verify_multiplicativity(3, 100, 77);
  if (!m.passed) o.fail("multiplicativity");
  o.detail << (o.passed ? "" : "; ") << "sizes 16/256/8192, multiplicativity max gap " << m.measured.at("max_gap");
}

void inequality_sweeps(Outcome& o) {
  constexpr std::uint64_t kSamples = 100000;
  std::uint64_t total = 0;
  std::uint64_t seed = 5000;
  for (int n = 2; n <= 8; ++n) {
    for (const auto& r : {verify_cosine_bound(n, kSamples, ++seed), verify_lindeberg(n, kSamples, ++seed),
                          verify_real_part(n, kSamples, ++seed), verify_small_ball(n, kSamples, ++seed, 0.25),
                          verify_odd_cells(n, kSamples, ++seed), verify_far_shell(n, kSamples, ++seed, 0.25)}) {
      total += r.violations;
      if (!r.passed) o.fail(r.name + "[n=" + std::to_string(n) + "] violations=" + std::to_string(r.violations));
    }
  }
  o.detail << (o.passed ? "" : "; ") << "42 sweeps, " << total << " violations";
}

void integral_consistency(Outcome& o) {
  const std::array<std::array<int, 2>, 4> cases{{{2, 1}, {2, 2}, {3, 1}, {3, 2}}};
  for (const auto& [n, t] : cases) {
    const auto e = integral_uniform_mc(n, static_cast<std::uint64_t>(t), 1000000, 600 + n * 10 + t);
    const BigCount N = count_meet_middle(n, 4 * t);
    const double exact = std::exp(log_e(N) - 4.0 * n * t * std::numbers::ln2);
    const double z = std::abs(e.value - exact) / e.std_error;
    o.detail << (o.detail.tellp() > 0 ? ", " : "") << "(" << n << "," << t << ") z=" << z;
    if (z > 3.0) o.fail("real part off by " + std::to_string(z) + " sigma");
    if (!e.imag_consistent()) o.fail("imag part nonzero at (" + std::to_string(n) + "," + std::to_string(t) + ")");
  }
}

void decomposition_bracket(Outcome& o) {
  const std::array<std::array<int, 2>, 3> cases{{{2, 2}, {2, 4}, {3, 2}}};
  for (const auto& [n, t] : cases) {
    const auto tt = static_cast<std::uint64_t>(t);
    const auto d = integral_decomposed(n, tt, DecompositionBudget{}, 900 + n * 10 + t);
    const double exact = std::exp(log_e(count_meet_middle(n, 4 * t)) - 4.0 * n * t * std::numbers::ln2);
    o.detail << (o.detail.tellp() > 0 ? ", " : "") << "(" << n << "," << t << ") |gap|="
             << std::abs(exact - d.primary.value) << " bound=" << d.residual_bound();
    if (!d.brackets(exact)) o.fail("bracket misses at (" + std::to_string(n) + "," + std::to_string(t) + ")");
  }
}

void cubic_probe(Outcome& o) {
  const auto p = cubic_phase_probe(4, 64, 1000000, 4242);
  o.detail << "deficit " << p.deficit << " vs " << p.predicted << " (rel " << p.relative_error() << ")";
  if (std::abs(p.predicted - 7.8125e-3) > 1e-15) o.fail("prediction is not C(4,3)/512");
  if (p.relative_error() > 0.2) o.fail("deficit outside 20%");
  if (std::abs(p.imag_mean) > 3.0 * p.imag_std_error) o.fail("imag mean nonzero");
}

void ratio_trend(Outcome& o) {
  for (const auto& [n, tmax] : std::array<std::array<int, 2>, 2>{{{2, 32}, {3, 16}}}) {
    std::vector<std::uint64_t> ts;
    for (int t = 1; t <= tmax; ++t) ts.push_back(static_cast<std::uint64_t>(t));
    const auto rows = ratio_experiment(n, ts, RatioMode::exact);
    const double cap = static_cast<double>(n * (n - 1) * (n - 2)) / 48.0 + n * n;
    double prev = 0.0;
    double max_tg = 0.0;
    for (const auto& r : rows) {
      if (r.refused) {
        o.fail("refused at n=" + std::to_string(n) + " t=" + std::to_string(r.t));
        continue;
      }
      if (!(r.ratio > prev) || r.ratio >= 1.0) o.fail("not increasing below 1 at n=" + std::to_string(n) + " t=" + std::to_string(r.t));
      if (!(r.t_times_gap > 0.0) || r.t_times_gap > cap) o.fail("t(1-ratio) out of range at n=" + std::to_string(n));
      prev = r.ratio;
      max_tg = std::max(max_tg, r.t_times_gap);
    }
    o.detail << (o.detail.tellp() > 0 ? ", " : "") << "n=" << n << " final ratio " << prev << " max t(1-ratio) " << max_tg;
  }
}

void determinism(Outcome& o) {
  const std::vector<std::string> commands{
      "integrate --n 3 --t 2 --samples 60000 --seed 11",
      "integrate --n 3 --t 2 --samples 30000 --seed 11 --decomposed",
      "integrate --n 2 --t 4 --samples 30000 --seed 12 --decomposed --residual sampled",
      "integrate --n 4 --t 8 --samples 30000 --seed 13 --cubic-probe",
      "verify --n-min 2 --n-max 4 --samples 3000 --seed 14",
      "report --n 3 --t-min 1 --t-max 3 --mode mc --samples 20000 --seed 15 --format csv",
      "cumulants --n 5 --seed 16",
  };
  for (const auto& cmd : commands) {
    std::string ref;
    for (int jobs : {1, 2, 8}) {
      int status = 0;
      std::string first = run_cli(cmd + " --jobs " + std::to_string(jobs), status);
      std::string again = run_cli(cmd + " --jobs " + std::to_string(jobs), status);
      if (status != 0 || first.empty()) {
        o.fail("'" + cmd + "' exited " + std::to_string(status));
        break;
      }
      if (first != again) o.fail("'" + cmd + "' differs on rerun with " + std::to_string(jobs) + " jobs");
      if (jobs == 1) ref = first;
      else if (first != ref) o.fail("'" + cmd + "' differs between 1 and " + std::to_string(jobs) + " jobs");
    }
  }
  if (o.passed) o.detail << commands.size() << " commands x 3 worker counts x 2 runs identical";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exact-count oracle equality (n*s <= 24)", 300, oracle_equality},
      {2, "known count values", 60, known_values},
      {3, "cumulant and peeling identities", 60, cumulant_identities},
      {4, "lattice structure", 120, lattice_structure},
      {5, "inequality sweeps", 600, inequality_sweeps},
      {6, "uniform MC matches exact counts", 600, integral_consistency},
      {7, "decomposition bracket", 600, decomposition_bracket},
      {8, "cubic-phase probe at n=4, t=64", 300, cubic_probe},
      {9, "ratio trend for n=2,3", 300, ratio_trend},
      {10, "determinism across reruns and workers", 600, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) o.fail("took " + std::to_string(secs) + " s, budget " + std::to_string(c.budget_s) + " s");
    if (!o.passed) ++failures;
    std::printf("[%s] %2d %s (%.1f s): %s\n", o.passed ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
