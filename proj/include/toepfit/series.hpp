#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "toepfit/rng.hpp"

namespace toepfit {

// Ordered real-valued observations. Values are validated finite and nonempty
// on construction and immutable afterwards; copies share storage so views
// built on top of a series stay cheap.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values, std::string label = "");

  const std::vector<double>& values() const { return *values_; }
  std::size_t size() const { return values_->size(); }
  const std::string& label() const { return label_; }

  // Shared handle for views that must outlive this wrapper.
  std::shared_ptr<const std::vector<double>> storage() const { return values_; }

 private:
  std::shared_ptr<const std::vector<double>> values_;
  std::string label_;
};

// Autoregressive model y_t = phi_1 y_{t-1} + ... + phi_p y_{t-p} + w_t,
// w_t ~ N(0, noise_std^2). Degenerate specs (noise_std = 0) are legal and
// useful for deterministic tests; stationarity is checked only where a
// routine requires it.
struct ARModelSpec {
  std::vector<double> coefficients;  // phi_1 .. phi_p
  double noise_std = 1.0;

  int order() const { return static_cast<int>(coefficients.size()); }
};

// Contamination model: `count` distinct positions receive an additive
// uniform draw from [uniform_low, uniform_high] plus a centered normal with
// variance normal_variance.
struct OutlierSpec {
  std::size_t count = 0;
  double uniform_low = -3.0;
  double uniform_high = 3.0;
  double normal_variance = 100.0;
};

// Largest eigenvalue modulus of the companion matrix of `coefficients`.
// Strictly below 1 iff the AR process is (causal) stationary.
double companion_spectral_radius(const std::vector<double>& coefficients);

// Throws NumericalError unless the model is stationary with phi_p != 0 and
// noise_std >= 0.
void validate_stationary(const ARModelSpec& spec);

// Map partial autocorrelations (each in (-1, 1)) to AR coefficients through
// the Levinson recursion; the result is always stationary.
std::vector<double> partials_to_ar(const std::vector<double>& partials);

// Stationary AR(p) with partials drawn uniformly from (-0.9, 0.9) and the
// last partial rejected while |kappa_p| < 0.1 so phi_p stays clearly nonzero.
ARModelSpec random_stationary_ar(int p, std::uint64_t seed);

inline std::size_t default_burn_in(int p) {
  return 10 * static_cast<std::size_t>(p) + 1000;
}

// Simulate n observations after discarding `burn_in` initial steps from a
// zero start state.
TimeSeries simulate_ar(const ARModelSpec& spec, std::size_t n, std::size_t burn_in,
                       std::uint64_t seed);
TimeSeries simulate_ar(const ARModelSpec& spec, std::size_t n, std::uint64_t seed);

// Copy of `series` with spec.count distinct positions (chosen without
// replacement) perturbed additively. count must not exceed the length.
TimeSeries inject_outliers(const TimeSeries& series, const OutlierSpec& spec,
                           std::uint64_t seed);

// First differences of the natural log: z_t = ln y_{t+1} - ln y_t. All
// inputs must be strictly positive; output is one element shorter.
TimeSeries log_diff_transform(const TimeSeries& series);

// Read one column of a CSV file. `column` is a header name, or a 0-based
// index when it parses as an integer or the file has no header row. Cells
// must parse as finite doubles.
TimeSeries load_csv(const std::string& path, const std::string& column);

// Flat binary format: uint64 little-endian count, then count f64 LE values.
void save_series_bin(const TimeSeries& series, const std::string& path);
TimeSeries load_series_bin(const std::string& path);

// One value per line with a single-name header.
void save_series_csv(const TimeSeries& series, const std::string& path);

}  // namespace toepfit
