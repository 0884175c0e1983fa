#include "toepfit/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "toepfit/errors.hpp"
#include "toepfit/rng.hpp"

namespace toepfit {

using nlohmann::json;
using clock_type = std::chrono::steady_clock;

void BenchConfig::validate() const {
  if (repetitions < 1) throw UsageError("need at least one repetition");
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) {
    throw UsageError("trim fraction must lie in [0, 0.5)");
  }
}

FitResult exact_fit(const TimeSeries& series, int p_bar) {
  if (p_bar < 1) throw UsageError("maximum lag must be at least 1");
  if (series.size() <= static_cast<std::size_t>(p_bar) + 1) {
    throw DataError("series too short for maximum lag " + std::to_string(p_bar));
  }
  FitResult fit;
  fit.pacf.method = PacfMethod::exact;
  fit.pacf.bound = 1.96 / std::sqrt(static_cast<double>(series.size()) - p_bar);
  for (int h = 1; h <= p_bar; ++h) {
    const auto t0 = clock_type::now();
    auto [a, b] = materialize(make_system(series, h));
    const OLSSolution sol = solve_exact(a, b);
    fit.per_lag_seconds.push_back(std::chrono::duration<double>(clock_type::now() - t0).count());
    fit.pacf.taus.push_back(sol.coefficients(h - 1));
    fit.per_lag_coefficients.push_back(sol.coefficients);
  }
  fit.p_star = select_order(fit.pacf);
  if (fit.p_star > 0) {
    fit.coefficients = fit.per_lag_coefficients[static_cast<std::size_t>(fit.p_star - 1)];
  }
  return fit;
}

FitResult srht_fit(const TimeSeries& series, int p_bar, std::int64_t c, std::uint64_t seed) {
  if (p_bar < 1) throw UsageError("maximum lag must be at least 1");
  if (series.size() <= static_cast<std::size_t>(p_bar) + 1) {
    throw DataError("series too short for maximum lag " + std::to_string(p_bar));
  }
  if (c < p_bar) throw UsageError("sample count below maximum lag");
  FitResult fit;
  fit.pacf.method = PacfMethod::srht;
  fit.pacf.bound = 1.96 / std::sqrt(static_cast<double>(c));
  for (int h = 1; h <= p_bar; ++h) {
    const auto t0 = clock_type::now();
    auto [a, b] = materialize(make_system(series, h));
    const OLSSolution sol = srht_solve(a, b, c, derive_seed(seed, static_cast<std::uint64_t>(h)));
    fit.per_lag_seconds.push_back(std::chrono::duration<double>(clock_type::now() - t0).count());
    fit.pacf.taus.push_back(sol.coefficients(h - 1));
    fit.per_lag_coefficients.push_back(sol.coefficients);
  }
  fit.p_star = select_order(fit.pacf);
  if (fit.p_star > 0) {
    fit.coefficients = fit.per_lag_coefficients[static_cast<std::size_t>(fit.p_star - 1)];
  }
  return fit;
}

namespace {

void strip_timing(FitResult& fit) {
  std::fill(fit.per_lag_seconds.begin(), fit.per_lag_seconds.end(), 0.0);
  fit.upfront_seconds = 0.0;
}

RunReport to_report(FitResult fit, const std::string& method, std::int64_t n, int p_bar,
                    std::int64_t c, std::uint64_t seed, bool with_timing) {
  if (!with_timing) strip_timing(fit);
  RunReport r;
  r.method = method;
  r.n = n;
  r.p_bar = p_bar;
  r.c = c;
  r.seed = seed;
  r.timing_recorded = with_timing;
  r.upfront_seconds = fit.upfront_seconds;
  r.per_lag_seconds = fit.per_lag_seconds;
  r.cumulative_seconds.resize(r.per_lag_seconds.size());
  double acc = fit.upfront_seconds;
  for (std::size_t i = 0; i < r.per_lag_seconds.size(); ++i) {
    acc += r.per_lag_seconds[i];
    r.cumulative_seconds[i] = acc;
  }
  r.pacf = fit.pacf;
  r.p_star = fit.p_star;
  r.coefficients = fit.coefficients;
  return r;
}

}  // namespace

RunReport run_fit(const TimeSeries& series, const std::string& method, int p_bar,
                  std::int64_t c, std::uint64_t seed, bool with_timing) {
  const auto n = static_cast<std::int64_t>(series.size());
  if (method == "exact") {
    return to_report(exact_fit(series, p_bar), method, n, p_bar, 0, seed, with_timing);
  }
  if (c < 1) throw UsageError("method '" + method + "' needs a sample count");
  if (method == "lsar") {
    return to_report(lsar_fit(series, p_bar, c, seed), method, n, p_bar, c, seed, with_timing);
  }
  if (method == "rh") {
    return to_report(rh_fit(series, p_bar, c, seed), method, n, p_bar, c, seed, with_timing);
  }
  if (method == "srht") {
    return to_report(srht_fit(series, p_bar, c, seed), method, n, p_bar, c, seed, with_timing);
  }
  throw UsageError("unknown method '" + method + "'");
}

double trimmed_mean(std::vector<double> values, double trim_fraction) {
  if (values.empty()) throw UsageError("trimmed mean of an empty sample");
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) {
    throw UsageError("trim fraction must lie in [0, 0.5)");
  }
  std::sort(values.begin(), values.end());
  const auto drop = static_cast<std::size_t>(
      std::floor(trim_fraction * static_cast<double>(values.size())));
  const std::size_t kept = values.size() - 2 * drop;
  const double sum = std::accumulate(values.begin() + static_cast<std::ptrdiff_t>(drop),
                                     values.begin() + static_cast<std::ptrdiff_t>(drop + kept),
                                     0.0);
  return sum / static_cast<double>(kept);
}

namespace {

MethodComparison summarize_method(const std::string& method, const FitResult& exact,
                                  const std::vector<FitResult>& runs, double trim_fraction) {
  const std::size_t p_bar = exact.per_lag_coefficients.size();
  const std::size_t reps = runs.size();
  MethodComparison out;
  out.method = method;
  out.trimmed_error_pct.resize(p_bar);
  out.mean_lag_seconds.assign(p_bar, 0.0);
  std::vector<double> errs(reps);
  for (std::size_t h = 0; h < p_bar; ++h) {
    for (std::size_t r = 0; r < reps; ++r) {
      errs[r] = relative_error_pct(runs[r].per_lag_coefficients[h],
                                   exact.per_lag_coefficients[h]);
      out.mean_lag_seconds[h] += runs[r].per_lag_seconds[h];
    }
    out.mean_lag_seconds[h] /= static_cast<double>(reps);
    out.trimmed_error_pct[h] = trimmed_mean(errs, trim_fraction);
  }
  for (const FitResult& run : runs) {
    out.mean_upfront_seconds += run.upfront_seconds;
    out.p_stars.push_back(run.p_star);
  }
  out.mean_upfront_seconds /= static_cast<double>(reps);
  return out;
}

}  // namespace

CompareReport run_compare(const TimeSeries& series, int p_bar, std::int64_t c, int reps,
                          double trim_fraction, std::uint64_t seed, bool with_timing) {
  if (reps < 1) throw UsageError("need at least one repetition");
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) {
    throw UsageError("trim fraction must lie in [0, 0.5)");
  }

  FitResult exact = exact_fit(series, p_bar);
  std::vector<FitResult> lsar_runs;
  std::vector<FitResult> rh_runs;
  lsar_runs.reserve(static_cast<std::size_t>(reps));
  rh_runs.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    lsar_runs.push_back(
        lsar_fit(series, p_bar, c, derive_seed(seed, 0x1000u + static_cast<unsigned>(r))));
    rh_runs.push_back(
        rh_fit(series, p_bar, c, derive_seed(seed, 0x2000u + static_cast<unsigned>(r))));
  }
  if (!with_timing) {
    strip_timing(exact);
    for (auto& f : lsar_runs) strip_timing(f);
    for (auto& f : rh_runs) strip_timing(f);
  }

  CompareReport rep;
  rep.n = static_cast<std::int64_t>(series.size());
  rep.p_bar = p_bar;
  rep.c = c;
  rep.repetitions = reps;
  rep.trim_fraction = trim_fraction;
  rep.seed = seed;
  rep.timing_recorded = with_timing;
  rep.exact_p_star = exact.p_star;
  rep.exact_lag_seconds = exact.per_lag_seconds;
  rep.exact_taus = exact.pacf.taus;
  rep.lsar = summarize_method("lsar", exact, lsar_runs, trim_fraction);
  rep.rh = summarize_method("rh", exact, rh_runs, trim_fraction);
  return rep;
}

std::vector<SweepRow> run_sweep(const TimeSeries& series, const std::vector<std::int64_t>& c_list,
                                int p_bar, int reps, double trim_fraction, std::uint64_t seed,
                                bool with_timing) {
  if (c_list.empty()) throw UsageError("empty c list");
  const FitResult exact = exact_fit(series, p_bar);
  std::vector<SweepRow> rows;
  for (std::size_t ci = 0; ci < c_list.size(); ++ci) {
    const std::int64_t c = c_list[ci];
    for (const char* method : {"lsar", "rh"}) {
      std::vector<FitResult> runs;
      for (int r = 0; r < reps; ++r) {
        const std::uint64_t s =
            derive_seed(seed, (static_cast<std::uint64_t>(ci) << 20) +
                                  (method[0] == 'l' ? 0x10000u : 0x20000u) +
                                  static_cast<unsigned>(r));
        runs.push_back(method[0] == 'l' ? lsar_fit(series, p_bar, c, s)
                                        : rh_fit(series, p_bar, c, s));
      }
      if (!with_timing) {
        for (auto& f : runs) strip_timing(f);
      }
      const MethodComparison summary = summarize_method(method, exact, runs, trim_fraction);
      SweepRow row;
      row.method = method;
      row.c = c;
      row.max_lag_seconds =
          *std::max_element(summary.mean_lag_seconds.begin(), summary.mean_lag_seconds.end());
      row.max_error_pct =
          *std::max_element(summary.trimmed_error_pct.begin(), summary.trimmed_error_pct.end());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

json pacf_to_json(const PACFResult& pacf) {
  return json{{"method", pacf_method_name(pacf.method)},
              {"bound", pacf.bound},
              {"taus", pacf.taus}};
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

json comparison_to_json(const MethodComparison& m) {
  return json{{"method", m.method},
              {"trimmed_error_pct", m.trimmed_error_pct},
              {"mean_lag_seconds", m.mean_lag_seconds},
              {"mean_upfront_seconds", m.mean_upfront_seconds},
              {"p_stars", m.p_stars}};
}

}  // namespace

std::string report_to_json(const RunReport& r) {
  json j{{"method", r.method},
         {"n", r.n},
         {"p_bar", r.p_bar},
         {"c", r.c},
         {"seed", r.seed},
         {"timing_recorded", r.timing_recorded},
         {"upfront_seconds", r.upfront_seconds},
         {"per_lag_seconds", r.per_lag_seconds},
         {"cumulative_seconds", r.cumulative_seconds},
         {"pacf", pacf_to_json(r.pacf)},
         {"p_star", r.p_star},
         {"coefficients", to_std(r.coefficients)}};
  if (r.per_lag_relative_error) j["per_lag_relative_error"] = *r.per_lag_relative_error;
  return j.dump(2) + "\n";
}

std::string compare_to_json(const CompareReport& r) {
  json j{{"n", r.n},
         {"p_bar", r.p_bar},
         {"c", r.c},
         {"repetitions", r.repetitions},
         {"trim_fraction", r.trim_fraction},
         {"seed", r.seed},
         {"timing_recorded", r.timing_recorded},
         {"exact", json{{"p_star", r.exact_p_star},
                        {"per_lag_seconds", r.exact_lag_seconds},
                        {"taus", r.exact_taus}}},
         {"lsar", comparison_to_json(r.lsar)},
         {"rh", comparison_to_json(r.rh)}};
  return j.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("short write to " + path);
}

void write_run_report(const RunReport& report, const std::string& path) {
  write_text(path, report_to_json(report));
}

void write_compare_json(const CompareReport& report, const std::string& path) {
  write_text(path, compare_to_json(report));
}

void write_compare_errors_csv(const CompareReport& report, const std::string& path) {
  std::string text = "lag,lsar_error,rh_error\n";
  char buf[96];
  for (std::size_t h = 0; h < report.lsar.trimmed_error_pct.size(); ++h) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", h + 1,
                  report.lsar.trimmed_error_pct[h], report.rh.trimmed_error_pct[h]);
    text += buf;
  }
  write_text(path, text);
}

void write_compare_timing_csv(const CompareReport& report, const std::string& path) {
  std::string text = "lag,exact_cum,lsar_cum,rh_cum\n";
  char buf[128];
  double exact_acc = 0.0;
  double lsar_acc = 0.0;
  double rh_acc = report.rh.mean_upfront_seconds;
  for (std::size_t h = 0; h < report.exact_lag_seconds.size(); ++h) {
    exact_acc += report.exact_lag_seconds[h];
    lsar_acc += report.lsar.mean_lag_seconds[h];
    rh_acc += report.rh.mean_lag_seconds[h];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", h + 1, exact_acc, lsar_acc, rh_acc);
    text += buf;
  }
  write_text(path, text);
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::string text = "method,c,max_seconds,max_error_pct\n";
  char buf[128];
  for (const SweepRow& row : rows) {
    std::snprintf(buf, sizeof buf, "%s,%lld,%.17g,%.17g\n", row.method.c_str(),
                  static_cast<long long>(row.c), row.max_lag_seconds, row.max_error_pct);
    text += buf;
  }
  write_text(path, text);
}

void write_pacf_plot_csv(const PACFResult& pacf, const std::string& path) {
  std::string text = "lag,tau,bound_hi,bound_lo\n";
  char buf[128];
  for (std::size_t i = 0; i < pacf.taus.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i + 1, pacf.taus[i], pacf.bound,
                  -pacf.bound);
    text += buf;
  }
  write_text(path, text);
}

}  // namespace toepfit
