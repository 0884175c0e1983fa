#include "toepfit/series.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "toepfit/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary series format assumes a little-endian host");

namespace toepfit {

TimeSeries::TimeSeries(std::vector<double> values, std::string label)
    : values_(std::make_shared<const std::vector<double>>(std::move(values))),
      label_(std::move(label)) {
  if (values_->empty()) throw DataError("series must contain at least one value");
  for (std::size_t i = 0; i < values_->size(); ++i) {
    if (!std::isfinite((*values_)[i])) {
      throw DataError("series value at position " + std::to_string(i) + " is not finite");
    }
  }
}

double companion_spectral_radius(const std::vector<double>& coefficients) {
  const int p = static_cast<int>(coefficients.size());
  if (p == 0) return 0.0;
  if (p == 1) return std::abs(coefficients[0]);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (int j = 0; j < p; ++j) companion(0, j) = coefficients[j];
  companion.block(1, 0, p - 1, p - 1).setIdentity();
  Eigen::EigenSolver<Eigen::MatrixXd> eig(companion, /*computeEigenvectors=*/false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

void validate_stationary(const ARModelSpec& spec) {
  if (spec.order() < 1) throw NumericalError("model order must be at least 1");
  if (spec.coefficients.back() == 0.0) {
    throw NumericalError("leading-order coefficient is zero; order is overstated");
  }
  if (!(spec.noise_std >= 0.0)) throw NumericalError("noise standard deviation is negative");
  const double radius = companion_spectral_radius(spec.coefficients);
  if (!(radius < 1.0)) {
    throw NumericalError("model is not stationary (companion spectral radius " +
                         std::to_string(radius) + ")");
  }
}

std::vector<double> partials_to_ar(const std::vector<double>& partials) {
  std::vector<double> phi;
  phi.reserve(partials.size());
  for (std::size_t k = 0; k < partials.size(); ++k) {
    const double kappa = partials[k];
    if (!(std::abs(kappa) < 1.0)) {
      throw UsageError("partial autocorrelation at lag " + std::to_string(k + 1) +
                       " is outside (-1, 1)");
    }
    std::vector<double> next(k + 1);
    for (std::size_t j = 0; j < k; ++j) next[j] = phi[j] - kappa * phi[k - 1 - j];
    next[k] = kappa;
    phi = std::move(next);
  }
  return phi;
}

ARModelSpec random_stationary_ar(int p, std::uint64_t seed) {
  if (p < 1) throw UsageError("model order must be at least 1");
  Rng rng(seed);
  std::vector<double> partials(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) partials[k] = rng.uniform(-0.9, 0.9);
  // Keep the last partial (= phi_p) away from zero so the generated order is
  // unambiguous.
  while (std::abs(partials[p - 1]) < 0.1) partials[p - 1] = rng.uniform(-0.9, 0.9);
  ARModelSpec spec;
  spec.coefficients = partials_to_ar(partials);
  spec.noise_std = 1.0;
  return spec;
}

TimeSeries simulate_ar(const ARModelSpec& spec, std::size_t n, std::size_t burn_in,
                       std::uint64_t seed) {
  validate_stationary(spec);
  if (n == 0) throw UsageError("cannot simulate an empty series");
  const int p = spec.order();
  const std::vector<double>& phi = spec.coefficients;
  Rng rng(seed);
  std::vector<double> buf(burn_in + n, 0.0);
  std::vector<double> state(static_cast<std::size_t>(p), 0.0);  // state[j] = y_{t-1-j}
  for (std::size_t t = 0; t < buf.size(); ++t) {
    double y = spec.noise_std == 0.0 ? 0.0 : spec.noise_std * rng.normal();
    for (int j = 0; j < p; ++j) y += phi[static_cast<std::size_t>(j)] * state[static_cast<std::size_t>(j)];
    for (int j = p - 1; j > 0; --j) state[static_cast<std::size_t>(j)] = state[static_cast<std::size_t>(j - 1)];
    if (p > 0) state[0] = y;
    buf[t] = y;
  }
  std::vector<double> out(buf.begin() + static_cast<std::ptrdiff_t>(burn_in), buf.end());
  return TimeSeries(std::move(out));
}

TimeSeries simulate_ar(const ARModelSpec& spec, std::size_t n, std::uint64_t seed) {
  return simulate_ar(spec, n, default_burn_in(spec.order()), seed);
}

TimeSeries inject_outliers(const TimeSeries& series, const OutlierSpec& spec,
                           std::uint64_t seed) {
  const std::size_t n = series.size();
  if (spec.count > n) throw DataError("outlier count exceeds series length");
  if (spec.uniform_high < spec.uniform_low) throw UsageError("empty uniform range");
  if (spec.normal_variance < 0.0) throw UsageError("negative outlier variance");
  std::vector<double> values = series.values();
  if (spec.count == 0) return TimeSeries(std::move(values), series.label());

  Rng rng(seed);
  std::vector<std::size_t> positions;
  positions.reserve(spec.count);
  if (spec.count > n / 2) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t i = 0; i < spec.count; ++i) {
      const std::size_t j = i + rng.below(n - i);
      std::swap(all[i], all[j]);
      positions.push_back(all[i]);
    }
  } else {
    std::unordered_set<std::size_t> seen;
    while (positions.size() < spec.count) {
      const std::size_t i = rng.below(n);
      if (seen.insert(i).second) positions.push_back(i);
    }
  }
  const double sd = std::sqrt(spec.normal_variance);
  for (std::size_t i : positions) {
    values[i] += rng.uniform(spec.uniform_low, spec.uniform_high) + sd * rng.normal();
  }
  return TimeSeries(std::move(values), series.label());
}

TimeSeries log_diff_transform(const TimeSeries& series) {
  const std::vector<double>& y = series.values();
  if (y.size() < 2) throw DataError("need at least two values to difference");
  std::vector<double> z(y.size() - 1);
  for (std::size_t t = 0; t < z.size(); ++t) {
    if (!(y[t] > 0.0) || !(y[t + 1] > 0.0)) {
      throw DataError("log transform requires strictly positive values (position " +
                      std::to_string(t + (y[t] > 0.0 ? 1 : 0)) + ")");
    }
    z[t] = std::log(y[t + 1]) - std::log(y[t]);
  }
  return TimeSeries(std::move(z), series.label());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

bool parse_index(const std::string& s, std::size_t& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size()) return false;
  out = static_cast<std::size_t>(v);
  return true;
}

}  // namespace

TimeSeries load_csv(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + " is empty");
  const std::vector<std::string> head = split_csv_line(line);

  std::size_t col = 0;
  bool header = false;
  bool resolved = false;
  for (std::size_t j = 0; j < head.size(); ++j) {
    if (trim(head[j]) == trim(column)) {
      col = j;
      header = true;
      resolved = true;
      break;
    }
  }
  if (!resolved) {
    if (!parse_index(column, col)) {
      throw DataError("column '" + column + "' not found in " + path);
    }
    if (col >= head.size()) {
      throw DataError("column index " + std::to_string(col) + " out of range in " + path);
    }
    double probe;
    header = !parse_double(head[col], probe);
  }

  std::vector<double> values;
  std::size_t lineno = 1;
  if (!header) {
    double v;
    if (!parse_double(head[col], v)) {
      throw DataError(path + ":1: cell is not a finite number");
    }
    values.push_back(v);
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (col >= cells.size()) {
      throw DataError(path + ":" + std::to_string(lineno) + ": missing column " +
                      std::to_string(col));
    }
    double v;
    if (!parse_double(cells[col], v)) {
      throw DataError(path + ":" + std::to_string(lineno) + ": cell '" + cells[col] +
                      "' is not a finite number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw DataError(path + " has no data rows");
  return TimeSeries(std::move(values), header ? trim(column) : "");
}

void save_series_bin(const TimeSeries& series, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  const std::uint64_t count = series.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  out.write(reinterpret_cast<const char*>(series.values().data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) throw DataError("short write to " + path);
}

TimeSeries load_series_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in) throw DataError(path + ": truncated header");
  std::vector<double> values(count);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw DataError(path + ": truncated payload");
  return TimeSeries(std::move(values));
}

void save_series_csv(const TimeSeries& series, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << "value\n";
  char buf[32];
  for (double v : series.values()) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << '\n';
  }
  if (!out) throw DataError("short write to " + path);
}

}  // namespace toepfit
