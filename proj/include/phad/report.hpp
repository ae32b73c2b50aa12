// JSON and CSV encodings of count, estimate, ratio, lattice and check
// records. Counts are decimal strings; reals use the shortest representation
// that parses back to the same double; natural-log values carry a "_log_e"
// key suffix.
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "phad/counting.hpp"
#include "phad/integration.hpp"
#include "phad/lattice.hpp"
#include "phad/verify.hpp"

namespace phad {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of a double ("inf", "-inf", "nan" for non-finite).
inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_real(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw std::invalid_argument("parse_real: " + s);
  return x;
}

/// JSON has no infinities; non-finite reals are written as strings.
inline json real_json(double x) { return std::isfinite(x) ? json(x) : json(format_real(x)); }
inline double real_from_json(const json& j) { return j.is_string() ? parse_real(j.get<std::string>()) : j.get<double>(); }

// ---------------------------------------------------------------------------

struct CountRecord {
  int n = 0;
  int s = 0;
  std::string method;
  BigCount count = 0;
  double wall_ms = 0.0;

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

inline json to_json(const CountRecord& r) {
  const double le = log_e(r.count);
  return json{{"n", r.n},
              {"s", r.s},
              {"method", r.method},
              {"count_decimal", to_decimal(r.count)},
              {"log2_count", real_json(le / std::numbers::ln2)},
              {"count_log_e", real_json(le)},
              {"wall_ms", r.wall_ms}};
}

inline CountRecord count_record_from_json(const json& j) {
  CountRecord r;
  r.n = j.at("n").get<int>();
  r.s = j.at("s").get<int>();
  r.method = j.at("method").get<std::string>();
  r.count = from_decimal(j.at("count_decimal").get<std::string>());
  r.wall_ms = j.at("wall_ms").get<double>();
  return r;
}

struct EstimateRecord {
  std::string method;
  int n = 0;
  std::uint64_t t = 0;
  double value = 0.0;
  double std_error = 0.0;
  double residual_bound = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double acceptance_rate = 1.0;
  double imag_mean = 0.0;
  double imag_std_error = 0.0;
  std::optional<double> delta;
  std::optional<bool> delta_clamped;

  friend bool operator==(const EstimateRecord&, const EstimateRecord&) = default;
};

inline EstimateRecord estimate_record(const EstimateWithError& e, double residual = 0.0) {
  return EstimateRecord{e.method,   e.n,        e.t,    e.value,           e.std_error,
                        residual,   e.samples,  e.seed, e.acceptance_rate, e.imag_mean,
                        e.imag_std_error, std::nullopt, std::nullopt};
}

inline json to_json(const EstimateRecord& r) {
  json j{{"method", r.method},
         {"n", r.n},
         {"t", r.t},
         {"value", real_json(r.value)},
         {"std_error", real_json(r.std_error)},
         {"residual_bound", real_json(r.residual_bound)},
         {"samples", r.samples},
         {"seed", r.seed},
         {"acceptance_rate", real_json(r.acceptance_rate)},
         {"imag_mean", real_json(r.imag_mean)},
         {"imag_std_error", real_json(r.imag_std_error)}};
  if (r.delta) j["delta"] = real_json(*r.delta);
  if (r.delta_clamped) j["delta_clamped"] = *r.delta_clamped;
  return j;
}

inline EstimateRecord estimate_record_from_json(const json& j) {
  EstimateRecord r;
  r.method = j.at("method").get<std::string>();
  r.n = j.at("n").get<int>();
  r.t = j.at("t").get<std::uint64_t>();
  r.value = real_from_json(j.at("value"));
  r.std_error = real_from_json(j.at("std_error"));
  r.residual_bound = real_from_json(j.at("residual_bound"));
  r.samples = j.at("samples").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.acceptance_rate = real_from_json(j.at("acceptance_rate"));
  r.imag_mean = real_from_json(j.at("imag_mean"));
  r.imag_std_error = real_from_json(j.at("imag_std_error"));
  if (j.contains("delta")) r.delta = real_from_json(j.at("delta"));
  if (j.contains("delta_clamped")) r.delta_clamped = j.at("delta_clamped").get<bool>();
  return r;
}

inline json to_json(const ResidualBound& b) {
  return json{{"odd_cells", real_json(b.odd_cells)},
              {"near_shell", real_json(b.near_shell)},
              {"far_shell", real_json(b.far_shell)},
              {"total", real_json(b.total())}};
}

inline json to_json(const DecomposedEstimate& e) {
  EstimateRecord rec = estimate_record(e.primary, e.residual_bound());
  rec.delta = e.delta;
  rec.delta_clamped = e.delta_clamped;
  json j = to_json(rec);
  j["residual"] = to_json(e.residual);
  j["r"] = real_json(e.r);
  j["far_shell_constants"] = json{{"q_gauss", e.constants.q_gauss},
                                  {"eta", e.constants.eta},
                                  {"q_small", e.constants.q_small},
                                  {"q_big", e.constants.q_big},
                                  {"a_r", e.constants.a_r}};
  j["asymptotic_constants_verifiable"] = e.asymptotic_constants_verifiable;
  if (e.residual_sampled) j["residual_sampled"] = to_json(estimate_record(*e.residual_sampled));
  return j;
}

inline json to_json(const CubicPhaseProbe& p) {
  return json{{"method", "cubic_phase_probe"},
              {"n", p.n},
              {"t", p.t},
              {"samples", p.samples},
              {"seed", p.seed},
              {"imag_mean", real_json(p.imag_mean)},
              {"imag_std_error", real_json(p.imag_std_error)},
              {"deficit", real_json(p.deficit)},
              {"deficit_std_error", real_json(p.deficit_std_error)},
              {"predicted", real_json(p.predicted)},
              {"acceptance_rate", real_json(p.acceptance_rate)}};
}

// ---------------------------------------------------------------------------
// Ratio table (CSV).

inline constexpr const char* kRatioCsvHeader = "n,t,N,A,ratio,predicted_ratio,t_times_gap";

/// One CSV row. N is the decimal count in exact mode, the real estimate in mc
/// mode, or "refused:<reason>"; the numeric fields of a refused row are empty.
struct RatioRow {
  int n = 0;
  std::uint64_t t = 0;
  std::string N;
  std::optional<double> A;
  std::optional<double> ratio;
  std::optional<double> predicted_ratio;
  std::optional<double> t_times_gap;

  friend bool operator==(const RatioRow&, const RatioRow&) = default;
};

inline RatioRow ratio_row(const RatioReport& r) {
  RatioRow row;
  row.n = r.n;
  row.t = r.t;
  if (r.refused) {
    row.N = "refused:" + r.refusal_reason;
    return row;
  }
  row.N = r.N ? to_decimal(*r.N) : format_real(std::exp(r.log_N));
  row.A = std::exp(r.log_A);
  row.ratio = r.ratio;
  row.predicted_ratio = r.predicted_ratio;
  row.t_times_gap = r.t_times_gap;
  return row;
}

inline std::string to_csv_line(const RatioRow& r) {
  auto opt = [](const std::optional<double>& x) { return x ? format_real(*x) : std::string(); };
  return std::to_string(r.n) + "," + std::to_string(r.t) + "," + r.N + "," + opt(r.A) + "," + opt(r.ratio) + "," +
         opt(r.predicted_ratio) + "," + opt(r.t_times_gap);
}

inline RatioRow ratio_row_from_csv(const std::string& line) {
  std::vector<std::string> f;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) f.push_back(cell);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  if (f.size() != 7) throw std::invalid_argument("ratio_row_from_csv: expected 7 fields in '" + line + "'");
  auto opt = [](const std::string& s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return parse_real(s);
  };
  RatioRow r;
  r.n = std::stoi(f[0]);
  r.t = std::stoull(f[1]);
  r.N = f[2];
  r.A = opt(f[3]);
  r.ratio = opt(f[4]);
  r.predicted_ratio = opt(f[5]);
  r.t_times_gap = opt(f[6]);
  return r;
}

inline std::string ratio_table_csv(const std::vector<RatioReport>& rows) {
  std::string out = std::string(kRatioCsvHeader) + "\n";
  for (const auto& r : rows) out += to_csv_line(ratio_row(r)) + "\n";
  return out;
}

inline std::vector<RatioRow> parse_ratio_table_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kRatioCsvHeader)
    throw std::invalid_argument("parse_ratio_table_csv: missing header");
  std::vector<RatioRow> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(ratio_row_from_csv(line));
  return rows;
}

inline json to_json(const RatioRow& r) {
  auto opt = [](const std::optional<double>& x) { return x ? real_json(*x) : json(nullptr); };
  return json{{"n", r.n},
              {"t", r.t},
              {"N", r.N},
              {"A", opt(r.A)},
              {"ratio", opt(r.ratio)},
              {"predicted_ratio", opt(r.predicted_ratio)},
              {"t_times_gap", opt(r.t_times_gap)}};
}

inline RatioRow ratio_row_from_json(const json& j) {
  auto opt = [](const json& x) -> std::optional<double> {
    if (x.is_null()) return std::nullopt;
    return real_from_json(x);
  };
  RatioRow r;
  r.n = j.at("n").get<int>();
  r.t = j.at("t").get<std::uint64_t>();
  r.N = j.at("N").get<std::string>();
  r.A = opt(j.at("A"));
  r.ratio = opt(j.at("ratio"));
  r.predicted_ratio = opt(j.at("predicted_ratio"));
  r.t_times_gap = opt(j.at("t_times_gap"));
  return r;
}

// ---------------------------------------------------------------------------
// Lattice dump and check summaries.

struct LatticeDumpEntry {
  std::string lambda1_bits;
  std::string lambda2_bits;
  double psi_re = 0.0;
  double psi_im = 0.0;

  friend bool operator==(const LatticeDumpEntry&, const LatticeDumpEntry&) = default;
};

inline std::vector<LatticeDumpEntry> lattice_dump(int n) {
  std::vector<LatticeDumpEntry> out;
  for_each_lattice_point(n, [&](const LatticePoint& p) {
    const auto v = psi(p.coordinates()).value;
    out.push_back({p.lambda1().to_hex(), p.lambda2().to_hex(), v.real(), v.imag()});
  });
  return out;
}

inline json to_json(const LatticeDumpEntry& e) {
  return json{{"lambda1_bits", e.lambda1_bits},
              {"lambda2_bits", e.lambda2_bits},
              {"psi_value", json{{"re", e.psi_re}, {"im", e.psi_im}}}};
}

inline LatticeDumpEntry lattice_entry_from_json(const json& j) {
  return {j.at("lambda1_bits").get<std::string>(), j.at("lambda2_bits").get<std::string>(),
          j.at("psi_value").at("re").get<double>(), j.at("psi_value").at("im").get<double>()};
}

inline json to_json(const CheckResult& c) {
  json measured = json::object();
  for (const auto& [k, v] : c.measured) measured[k] = real_json(v);
  return json{{"name", c.name},
              {"passed", c.passed},
              {"samples", c.samples},
              {"violations", c.violations},
              {"worst_margin", real_json(c.worst_margin)},
              {"measured", measured}};
}

inline json to_json(const CumulantSet& c) {
  return json{{"kappa1", c.kappa1}, {"kappa2", c.kappa2}, {"kappa3", c.kappa3}, {"kappa4", c.kappa4},
              {"kappa5", c.kappa5}, {"T", c.T()},         {"Q", c.Q()},         {"P", c.P()}};
}

inline json to_json(const AsymptoticReport& a) {
  return json{{"n", a.n},
              {"d", a.d},
              {"t", a.t},
              {"A_log_e", real_json(a.log_A)},
              {"A_hat_log_e", real_json(a.log_A_hat)},
              {"K_log_e", real_json(a.log_K)},
              {"F", real_json(a.F)},
              {"G_core", real_json(a.G_core)},
              {"correction", real_json(a.correction)},
              {"predicted_ratio", real_json(a.predicted_ratio)},
              {"term_n2_over_t", real_json(a.term_n2_t)},
              {"term_n52_over_t32", real_json(a.term_n52_t32)},
              {"term_n6_over_t2", real_json(a.term_n6_t2)},
              {"core_scale_holds", a.core_scale_holds}};
}

}  // namespace phad
