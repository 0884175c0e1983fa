#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toepfit/lsar.hpp"
#include "toepfit/repeated_halving.hpp"
#include "toepfit/series.hpp"

namespace toepfit {

// Serializable record of one fitting run. cumulative_seconds[h] includes the
// upfront (pre-loop) cost, so curves for methods with a setup phase show the
// constant offset; with timing disabled all timing fields are zero while
// every numeric result is unchanged.
struct RunReport {
  std::string method;  // exact | lsar | rh | srht
  std::int64_t n = 0;
  int p_bar = 0;
  std::int64_t c = 0;  // 0 for exact
  std::uint64_t seed = 0;
  bool timing_recorded = true;
  double upfront_seconds = 0.0;
  std::vector<double> per_lag_seconds;
  std::vector<double> cumulative_seconds;
  PACFResult pacf;
  int p_star = 0;
  Eigen::VectorXd coefficients;
  std::optional<std::vector<double>> per_lag_relative_error;
};

struct BenchConfig {
  std::int64_t n = 0;
  std::vector<int> p_list;
  std::vector<std::int64_t> c_list;
  int repetitions = 1;
  double trim_fraction = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

// Exact per-lag fits on the full series; pacf/bound as pacf_exact.
FitResult exact_fit(const TimeSeries& series, int p_bar);

// Per-lag randomized-Hadamard solves on the materialized lag systems.
FitResult srht_fit(const TimeSeries& series, int p_bar, std::int64_t c, std::uint64_t seed);

// Dispatch on method name; c is ignored for exact and required otherwise.
// with_timing=false zeroes all recorded times (for byte-stable output).
RunReport run_fit(const TimeSeries& series, const std::string& method, int p_bar,
                  std::int64_t c, std::uint64_t seed, bool with_timing = true);

// Mean after dropping floor(trim_fraction * count) values at each end;
// trim_fraction must lie in [0, 0.5).
double trimmed_mean(std::vector<double> values, double trim_fraction);

struct MethodComparison {
  std::string method;
  std::vector<double> trimmed_error_pct;  // per lag, against the exact fit
  std::vector<double> mean_lag_seconds;
  double mean_upfront_seconds = 0.0;
  std::vector<int> p_stars;  // one per repetition
};

struct CompareReport {
  std::int64_t n = 0;
  int p_bar = 0;
  std::int64_t c = 0;
  int repetitions = 0;
  double trim_fraction = 0.0;
  std::uint64_t seed = 0;
  bool timing_recorded = true;
  int exact_p_star = 0;
  std::vector<double> exact_lag_seconds;
  std::vector<double> exact_taus;
  MethodComparison lsar;
  MethodComparison rh;
};

// Exact once, then R seeded repetitions of each compressed method; per-lag
// errors are 100*||phi_s - phi||/||phi|| against the exact coefficients,
// aggregated by trimmed mean over the repetitions.
CompareReport run_compare(const TimeSeries& series, int p_bar, std::int64_t c, int reps,
                          double trim_fraction, std::uint64_t seed, bool with_timing = true);

struct SweepRow {
  std::string method;
  std::int64_t c = 0;
  double max_lag_seconds = 0.0;
  double max_error_pct = 0.0;
};

// For each c: repetitions of lsar/rh against one exact fit; reports the
// max-over-lags mean per-lag time and max-over-lags trimmed error.
std::vector<SweepRow> run_sweep(const TimeSeries& series, const std::vector<std::int64_t>& c_list,
                                int p_bar, int reps, double trim_fraction, std::uint64_t seed,
                                bool with_timing = true);

std::string report_to_json(const RunReport& report);
std::string compare_to_json(const CompareReport& report);

void write_text(const std::string& path, const std::string& text);
void write_run_report(const RunReport& report, const std::string& path);
void write_compare_json(const CompareReport& report, const std::string& path);
// lag,lsar_error,rh_error
void write_compare_errors_csv(const CompareReport& report, const std::string& path);
// lag,exact_cum,lsar_cum,rh_cum (means over repetitions; rh includes upfront)
void write_compare_timing_csv(const CompareReport& report, const std::string& path);
// method,c,max_seconds,max_error_pct
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);
// lag,tau,bound_hi,bound_lo
void write_pacf_plot_csv(const PACFResult& pacf, const std::string& path);

}  // namespace toepfit
