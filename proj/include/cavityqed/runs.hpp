#pragma once

// Data products behind the command-line tool. Each run renders a complete
// CSV document; numeric formatting is fixed so identical inputs always give
// byte-identical output.

#include "cavityqed/analytic.hpp"
#include "cavityqed/lindblad.hpp"
#include "cavityqed/metrics.hpp"
#include "cavityqed/optimizer.hpp"
#include "cavityqed/parallel.hpp"

#include <cstdio>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cavityqed {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitTruncation = 4;

/// Largest analytic-vs-oracle trace distance accepted by a compare run.
inline constexpr double kCompareThreshold = 1e-6;

/// 12 significant digits, %g style (fixed or scientific by magnitude),
/// '.' decimal separator, negative zero printed as 0.
inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class CsvDocument {
 public:
  explicit CsvDocument(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) text_ += ',';
      text_.append(h);
      first = false;
    }
    text_ += '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) text_ += ',';
      text_ += format_number(v);
      first = false;
    }
    text_ += '\n';
  }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

/// Uniform time samples; both end points included.
struct TimeGrid {
  double start = 0.0;
  double end = 5.0;
  int points = 501;

  void validate() const {
    if (points < 2) throw std::invalid_argument("time grid needs at least 2 points");
    if (!std::isfinite(start) || start < 0.0) throw std::invalid_argument("t-start must be >= 0");
    if (!std::isfinite(end) || !(end > start)) throw std::invalid_argument("t-end must exceed t-start");
  }

  std::vector<double> values() const {
    validate();
    std::vector<double> out(points);
    for (int i = 0; i < points; ++i) {
      out[i] = i == points - 1 ? end : start + (end - start) * i / (points - 1);
    }
    return out;
  }
};

/// Coupling values for two-dimensional sweeps; a single point uses `start`.
struct CouplingAxis {
  double start = 0.1;
  double end = 2.0;
  int points = 20;

  std::vector<double> values() const {
    if (points < 1) throw std::invalid_argument("g grid needs at least 1 point");
    if (!std::isfinite(start) || !std::isfinite(end) || start < 0.0 || end < start) {
      throw std::invalid_argument("g range must satisfy 0 <= g-start <= g-end");
    }
    std::vector<double> out(points);
    for (int i = 0; i < points; ++i) {
      out[i] = points == 1       ? start
               : i == points - 1 ? end
                                 : start + (end - start) * i / (points - 1);
    }
    return out;
  }
};

/// Optional replacements for the oracle defaults of default_config.
struct OracleOverrides {
  std::optional<int> n_max;
  std::optional<double> dt;
  std::optional<double> rtol;
};

enum class Subcommand { evolve, sweep, optimize, compare, entropy };

struct RunSpec {
  Subcommand subcommand = Subcommand::evolve;
  SystemParams params{1.0, 0.1, 1.0};
  TimeGrid grid;
  CouplingAxis g_axis;
  double t_max = 5.0;
  double resolution = 1e-3;
  /// Adds oracle columns to evolve output.
  bool oracle = false;
  OracleOverrides oracle_cfg;
};

struct RunOutput {
  std::string csv;
  int status = kExitOk;
  std::string message;
};

/// One analytic-vs-oracle comparison row.
struct CompareRow {
  double t;
  double trace_distance;
  double concurrence_analytic;
  double concurrence_oracle;
  double leakage;
};

inline IntegratorConfig resolve_oracle_config(const SystemParams& params, double t_final,
                                              const OracleOverrides& o) {
  IntegratorConfig cfg = default_config(params, t_final);
  if (o.n_max) cfg.n_max = *o.n_max;
  if (o.dt) cfg.dt = *o.dt;
  if (o.rtol) cfg.rtol = *o.rtol;
  cfg.validate();
  return cfg;
}

inline std::vector<CompareRow> compare_rows(const SystemParams& params,
                                            std::span<const double> times,
                                            const OracleOverrides& overrides) {
  const IntegratorConfig cfg = resolve_oracle_config(params, times.back(), overrides);
  const OracleRun run = integrate_trajectory(params, cfg, times);
  return parallel_map(times.size(), [&](std::size_t i) {
    const double t = times[i];
    const FockDensity& oracle = run.states[i];
    const FockDensity exact = fock_density(params, t, cfg.n_max);
    const AnalyticState analytic = effective_density(params, t);
    const Projection proj =
        project_to_effective(oracle, analytic.env.alpha_plus, analytic.env.alpha_minus);
    return CompareRow{t, trace_distance(exact, oracle), concurrence(analytic.rho_eff),
                      concurrence(proj.rho), proj.leakage};
  });
}

inline RunOutput run_evolve(const RunSpec& spec) {
  const std::vector<double> times = spec.grid.values();
  const auto samples =
      parallel_map(times.size(), [&](std::size_t i) { return sample_metrics(spec.params, times[i]); });

  if (!spec.oracle) {
    CsvDocument csv{"t", "concurrence", "negativity", "s_total", "s_atom", "s_field"};
    for (const MetricSample& s : samples) {
      csv.row({s.t, s.concurrence, s.negativity, s.s_total, s.s_atom, s.s_field});
    }
    return {csv.str(), kExitOk, {}};
  }

  const auto rows = compare_rows(spec.params, times, spec.oracle_cfg);
  CsvDocument csv{"t",      "concurrence", "negativity",         "s_total",
                  "s_atom", "s_field",     "concurrence_oracle", "trace_distance"};
  RunOutput out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const MetricSample& s = samples[i];
    csv.row({s.t, s.concurrence, s.negativity, s.s_total, s.s_atom, s.s_field,
             rows[i].concurrence_oracle, rows[i].trace_distance});
    if (rows[i].trace_distance > kCompareThreshold) out.status = kExitValidation;
  }
  out.csv = csv.str();
  if (out.status != kExitOk) out.message = "oracle disagrees with the closed form";
  return out;
}

inline RunOutput run_sweep(const RunSpec& spec) {
  const std::vector<double> gs = spec.g_axis.values();
  const std::vector<double> times = spec.grid.values();
  const std::size_t nt = times.size();
  const auto values = parallel_map(gs.size() * nt, [&](std::size_t idx) {
    const SystemParams p(gs[idx / nt], spec.params.k(), spec.params.alpha());
    return concurrence(effective_density(p, times[idx % nt]).rho_eff);
  });
  CsvDocument csv{"g", "t", "concurrence"};
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    csv.row({gs[idx / nt], times[idx % nt], values[idx]});
  }
  return {csv.str(), kExitOk, {}};
}

inline RunOutput run_optimize(const RunSpec& spec) {
  const Optimum opt = find_optimal_time(spec.params, spec.t_max, spec.resolution);
  CsvDocument csv{"g", "k", "alpha_re", "alpha_im", "t_opt", "c_max"};
  csv.row({spec.params.g(), spec.params.k(), spec.params.alpha().real(),
           spec.params.alpha().imag(), opt.t_opt, opt.c_max});
  return {csv.str(), kExitOk, {}};
}

inline RunOutput run_compare(const RunSpec& spec) {
  const std::vector<double> times = spec.grid.values();
  const auto rows = compare_rows(spec.params, times, spec.oracle_cfg);
  CsvDocument csv{"t", "trace_distance", "concurrence_analytic", "concurrence_oracle", "leakage"};
  RunOutput out;
  double worst = 0.0;
  for (const CompareRow& r : rows) {
    csv.row({r.t, r.trace_distance, r.concurrence_analytic, r.concurrence_oracle, r.leakage});
    worst = std::max(worst, r.trace_distance);
  }
  out.csv = csv.str();
  if (worst > kCompareThreshold) {
    out.status = kExitValidation;
    out.message = detail::concat("largest trace distance ", worst, " exceeds ", kCompareThreshold);
  }
  return out;
}

inline RunOutput run_entropy(const RunSpec& spec) {
  const std::vector<double> times = spec.grid.values();
  CsvDocument csv{"t", "s_total", "s_atom", "s_field"};
  for (double t : times) {
    csv.row({t, total_entropy_closed(spec.params, t), atom_entropy_closed(spec.params, t),
             field_entropy_closed(spec.params, t)});
  }
  return {csv.str(), kExitOk, {}};
}

inline RunOutput run(const RunSpec& spec) {
  switch (spec.subcommand) {
    case Subcommand::evolve:
      return run_evolve(spec);
    case Subcommand::sweep:
      return run_sweep(spec);
    case Subcommand::optimize:
      return run_optimize(spec);
    case Subcommand::compare:
      return run_compare(spec);
    case Subcommand::entropy:
      return run_entropy(spec);
  }
  throw std::invalid_argument("unknown subcommand");
}

}  // namespace cavityqed
