#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "toepfit/bench.hpp"
#include "toepfit/errors.hpp"
#include "toepfit/series.hpp"

namespace {

using namespace toepfit;
using nlohmann::json;

TimeSeries load_series(const std::string& path, const std::string& column) {
  if (path.size() > 4 && path.compare(path.size() - 4, 4, ".bin") == 0) {
    return load_series_bin(path);
  }
  return load_csv(path, column);
}

OutlierSpec parse_outliers(const std::string& text) {
  OutlierSpec spec;
  double count = 0.0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf:%lf", &count, &spec.uniform_low,
                  &spec.uniform_high, &spec.normal_variance) != 4 ||
      count < 0.0) {
    throw UsageError("--outliers expects k:lo:hi:var");
  }
  spec.count = static_cast<std::size_t>(count);
  return spec;
}

int run(int argc, char** argv) {
  CLI::App app{"autoregressive model fitting via compressed Toeplitz least squares"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a stationary AR(p) series");
  int sim_p = 1;
  std::int64_t sim_n = 0;
  std::uint64_t sim_seed = 0;
  double sim_noise = 1.0;
  std::int64_t sim_burn = -1;
  std::string sim_outliers;
  std::string sim_out;
  sim->add_option("-p,--order", sim_p, "model order")->required();
  sim->add_option("-n,--n", sim_n, "observations to emit")->required();
  sim->add_option("--seed", sim_seed, "random seed");
  sim->add_option("--noise-std", sim_noise, "innovation standard deviation");
  sim->add_option("--burn-in", sim_burn, "warm-up steps (default 10p + 1000)");
  sim->add_option("--outliers", sim_outliers, "contamination k:lo:hi:var");
  sim->add_option("-o,--out", sim_out, "output prefix (.bin/.csv/.json)")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "fit one method and write a run report");
  std::string fit_series, fit_method, fit_column = "value", fit_out;
  int fit_pbar = 0;
  std::int64_t fit_c = 0;
  std::uint64_t fit_seed = 0;
  bool fit_no_timing = false;
  fit->add_option("series", fit_series, "series file (.bin or .csv)")->required();
  fit->add_option("-m,--method", fit_method, "exact | lsar | rh | srht")->required();
  fit->add_option("--pbar", fit_pbar, "maximum lag")->required();
  fit->add_option("-c,--c", fit_c, "sampled rows (compressed methods)");
  fit->add_option("--seed", fit_seed, "random seed");
  fit->add_option("--column", fit_column, "CSV column name or index");
  fit->add_option("-o,--out", fit_out, "report JSON path")->required();
  fit->add_flag("--no-timing", fit_no_timing, "zero all timing fields for stable output");

  // compare
  auto* cmp = app.add_subcommand("compare", "exact vs lsar/rh error and timing study");
  std::string cmp_series, cmp_column = "value", cmp_out;
  int cmp_pbar = 0, cmp_reps = 50;
  std::int64_t cmp_c = 0;
  double cmp_trim = 0.05;
  std::uint64_t cmp_seed = 0;
  bool cmp_no_timing = false;
  cmp->add_option("series", cmp_series, "series file (.bin or .csv)")->required();
  cmp->add_option("--pbar", cmp_pbar, "maximum lag")->required();
  cmp->add_option("-c,--c", cmp_c, "sampled rows")->required();
  cmp->add_option("-R,--reps", cmp_reps, "repetitions per compressed method");
  cmp->add_option("--trim", cmp_trim, "trim fraction per tail");
  cmp->add_option("--seed", cmp_seed, "random seed");
  cmp->add_option("--column", cmp_column, "CSV column name or index");
  cmp->add_option("-o,--out", cmp_out, "output prefix")->required();
  cmp->add_flag("--no-timing", cmp_no_timing, "zero all timing fields for stable output");

  // pacf
  auto* pac = app.add_subcommand("pacf", "emit plot-ready PACF data for one method");
  std::string pac_series, pac_method = "exact", pac_column = "value", pac_out;
  int pac_pbar = 0;
  std::int64_t pac_c = 0;
  std::uint64_t pac_seed = 0;
  pac->add_option("series", pac_series, "series file (.bin or .csv)")->required();
  pac->add_option("-m,--method", pac_method, "exact | lsar | rh | srht");
  pac->add_option("--pbar", pac_pbar, "maximum lag")->required();
  pac->add_option("-c,--c", pac_c, "sampled rows (compressed methods)");
  pac->add_option("--seed", pac_seed, "random seed");
  pac->add_option("--column", pac_column, "CSV column name or index");
  pac->add_option("-o,--out", pac_out, "PACF CSV path")->required();

  // sweep-c
  auto* swp = app.add_subcommand("sweep-c", "max-over-lags error/time as c varies");
  std::string swp_series, swp_column = "value", swp_out;
  int swp_pbar = 0, swp_reps = 5;
  std::vector<std::int64_t> swp_c;
  double swp_trim = 0.05;
  std::uint64_t swp_seed = 0;
  bool swp_no_timing = false;
  swp->add_option("series", swp_series, "series file (.bin or .csv)")->required();
  swp->add_option("-c,--c", swp_c, "sample counts (repeat or comma-separate)")
      ->required()
      ->delimiter(',');
  swp->add_option("--pbar", swp_pbar, "maximum lag")->required();
  swp->add_option("-R,--reps", swp_reps, "repetitions per (method, c)");
  swp->add_option("--trim", swp_trim, "trim fraction per tail");
  swp->add_option("--seed", swp_seed, "random seed");
  swp->add_option("--column", swp_column, "CSV column name or index");
  swp->add_option("-o,--out", swp_out, "sweep CSV path")->required();
  swp->add_flag("--no-timing", swp_no_timing, "zero all timing fields for stable output");

  // real
  auto* real = app.add_subcommand("real", "log-diff transform a CSV column, then compare");
  std::string real_csv, real_column, real_out;
  int real_pbar = 0, real_reps = 50;
  std::int64_t real_c = 0;
  double real_trim = 0.05;
  std::uint64_t real_seed = 0;
  bool real_no_timing = false;
  real->add_option("csv", real_csv, "raw CSV path")->required();
  real->add_option("--column", real_column, "CSV column name or index")->required();
  real->add_option("--pbar", real_pbar, "maximum lag")->required();
  real->add_option("-c,--c", real_c, "sampled rows (default ceil(0.01 n))");
  real->add_option("-R,--reps", real_reps, "repetitions per compressed method");
  real->add_option("--trim", real_trim, "trim fraction per tail");
  real->add_option("--seed", real_seed, "random seed");
  real->add_option("-o,--out", real_out, "output prefix")->required();
  real->add_flag("--no-timing", real_no_timing, "zero all timing fields for stable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help/version exit 0; every real parse failure is a usage error
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (sim->parsed()) {
    const ARModelSpec spec = [&] {
      ARModelSpec s = random_stationary_ar(sim_p, derive_seed(sim_seed, 0xc0ef));
      s.noise_std = sim_noise;
      return s;
    }();
    const std::size_t burn =
        sim_burn >= 0 ? static_cast<std::size_t>(sim_burn) : default_burn_in(sim_p);
    TimeSeries series =
        simulate_ar(spec, static_cast<std::size_t>(sim_n), burn, derive_seed(sim_seed, 0xda7a));
    json sidecar{{"order", spec.order()},
                 {"coefficients", spec.coefficients},
                 {"noise_std", spec.noise_std},
                 {"n", sim_n},
                 {"burn_in", burn},
                 {"seed", sim_seed},
                 {"spectral_radius", companion_spectral_radius(spec.coefficients)},
                 {"outliers", nullptr}};
    if (!sim_outliers.empty()) {
      const OutlierSpec out_spec = parse_outliers(sim_outliers);
      series = inject_outliers(series, out_spec, derive_seed(sim_seed, 0x0071));
      sidecar["outliers"] = json{{"count", out_spec.count},
                                 {"uniform_low", out_spec.uniform_low},
                                 {"uniform_high", out_spec.uniform_high},
                                 {"normal_variance", out_spec.normal_variance}};
    }
    save_series_bin(series, sim_out + ".bin");
    save_series_csv(series, sim_out + ".csv");
    write_text(sim_out + ".json", sidecar.dump(2) + "\n");
    std::cout << "wrote " << sim_out << ".bin/.csv/.json\n";
    return 0;
  }

  if (fit->parsed()) {
    const TimeSeries series = load_series(fit_series, fit_column);
    const RunReport report =
        run_fit(series, fit_method, fit_pbar, fit_c, fit_seed, !fit_no_timing);
    write_run_report(report, fit_out);
    std::cout << "p_star " << report.p_star << ", report " << fit_out << "\n";
    return 0;
  }

  if (cmp->parsed()) {
    const TimeSeries series = load_series(cmp_series, cmp_column);
    const CompareReport report =
        run_compare(series, cmp_pbar, cmp_c, cmp_reps, cmp_trim, cmp_seed, !cmp_no_timing);
    write_compare_json(report, cmp_out + "_compare.json");
    write_compare_errors_csv(report, cmp_out + "_errors.csv");
    write_compare_timing_csv(report, cmp_out + "_timing.csv");
    std::cout << "wrote " << cmp_out << "_compare.json/_errors.csv/_timing.csv\n";
    return 0;
  }

  if (pac->parsed()) {
    const TimeSeries series = load_series(pac_series, pac_column);
    const RunReport report = run_fit(series, pac_method, pac_pbar, pac_c, pac_seed, false);
    write_pacf_plot_csv(report.pacf, pac_out);
    std::cout << "p_star " << report.p_star << ", pacf " << pac_out << "\n";
    return 0;
  }

  if (swp->parsed()) {
    const TimeSeries series = load_series(swp_series, swp_column);
    const std::vector<SweepRow> rows =
        run_sweep(series, swp_c, swp_pbar, swp_reps, swp_trim, swp_seed, !swp_no_timing);
    write_sweep_csv(rows, swp_out);
    std::cout << "wrote " << swp_out << "\n";
    return 0;
  }

  if (real->parsed()) {
    const TimeSeries raw = load_csv(real_csv, real_column);
    const TimeSeries series = log_diff_transform(raw);
    const std::int64_t c =
        real_c > 0 ? real_c
                   : static_cast<std::int64_t>(std::ceil(0.01 * static_cast<double>(raw.size())));
    const CompareReport report =
        run_compare(series, real_pbar, c, real_reps, real_trim, real_seed, !real_no_timing);
    write_compare_json(report, real_out + "_compare.json");
    write_compare_errors_csv(report, real_out + "_errors.csv");
    write_compare_timing_csv(report, real_out + "_timing.csv");
    std::cout << "n " << series.size() << ", c " << c << ", wrote " << real_out
              << "_compare.json/_errors.csv/_timing.csv\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
