#include "toepfit/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "toepfit/errors.hpp"
#include "toepfit/rng.hpp"

namespace toepfit {

void SketchConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must lie in (0, 1)");
  if (c_override && *c_override < 1) throw UsageError("c override must be positive");
}

SampleSet sample_rows(const Eigen::Ref<const Eigen::VectorXd>& pi, std::int64_t c,
                      std::uint64_t seed) {
  const std::int64_t n = pi.size();
  if (n < 1) throw DataError("empty distribution");
  if (c < 1) throw UsageError("sample count must be positive");
  double total = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (!(pi(i) >= 0.0)) throw DataError("distribution has a negative entry");
    total += pi(i);
  }
  if (std::abs(total - 1.0) > 1e-8) {
    throw DataError("distribution sums to " + std::to_string(total) + ", not 1");
  }

  std::vector<double> cdf(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    acc += pi(i);
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  cdf.back() = acc;  // guard the final bucket against roundoff

  SampleSet out;
  out.source_rows = n;
  out.indices.resize(static_cast<std::size_t>(c));
  out.weights.resize(static_cast<std::size_t>(c));
  Rng rng(seed);
  const double cd = static_cast<double>(c);
  for (std::int64_t t = 0; t < c; ++t) {
    const double u = rng.uniform01() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    std::int64_t i = static_cast<std::int64_t>(it - cdf.begin());
    while (pi(i) == 0.0 && i + 1 < n) ++i;  // never land on a zero-mass row
    while (pi(i) == 0.0 && i > 0) --i;
    out.indices[static_cast<std::size_t>(t)] = i;
    out.weights[static_cast<std::size_t>(t)] = 1.0 / std::sqrt(cd * pi(i) / total);
  }
  return out;
}

void apply_sample(const ToeplitzSystem& sys, const SampleSet& s, int width,
                  Eigen::MatrixXd& a_out, Eigen::VectorXd& b_out) {
  if (width < 1 || width > sys.p()) throw UsageError("invalid column width");
  const std::int64_t c = s.size();
  a_out.resize(c, width);
  b_out.resize(c);
  for (std::int64_t t = 0; t < c; ++t) {
    const std::int64_t i = s.indices[static_cast<std::size_t>(t)];
    if (i < 0 || i >= sys.rows()) throw UsageError("sample index out of range");
    const double w = s.weights[static_cast<std::size_t>(t)];
    for (int j = 0; j < width; ++j) a_out(t, j) = w * sys.entry(i, j);
    b_out(t) = w * sys.target(i);
  }
}

void apply_sample(const ToeplitzSystem& sys, const SampleSet& s, Eigen::MatrixXd& a_out,
                  Eigen::VectorXd& b_out) {
  apply_sample(sys, s, sys.p(), a_out, b_out);
}

void apply_sample(const Eigen::Ref<const Eigen::MatrixXd>& a,
                  const Eigen::Ref<const Eigen::VectorXd>& b, const SampleSet& s,
                  Eigen::MatrixXd& a_out, Eigen::VectorXd& b_out) {
  const std::int64_t c = s.size();
  a_out.resize(c, a.cols());
  b_out.resize(c);
  for (std::int64_t t = 0; t < c; ++t) {
    const std::int64_t i = s.indices[static_cast<std::size_t>(t)];
    if (i < 0 || i >= a.rows()) throw UsageError("sample index out of range");
    const double w = s.weights[static_cast<std::size_t>(t)];
    a_out.row(t) = w * a.row(i);
    b_out(t) = w * b(i);
  }
}

OLSSolution solve_compressed(const Eigen::Ref<const Eigen::MatrixXd>& a_s,
                             const Eigen::Ref<const Eigen::VectorXd>& b_s) {
  OLSSolution sol = solve_exact(a_s, b_s);
  sol.method = SolveMethod::compressed;
  return sol;
}

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

void hadamard_apply(std::span<double> x) {
  const std::size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0) throw UsageError("transform length must be a power of two");
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = x[j];
        const double b = x[j + h];
        x[j] = (a + b) * kInvSqrt2;
        x[j + h] = (a - b) * kInvSqrt2;
      }
    }
  }
}

Eigen::VectorXd hadamard_apply(const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd y = x;
  hadamard_apply(std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
  return y;
}

PartialHadamard::PartialHadamard(std::int64_t n) : n_(n) {
  if (n < 1 || (n & (n - 1)) != 0) throw UsageError("transform length must be a power of two");
  for (std::int64_t len = n; len > 1; len /= 2) {
    scratch_.emplace_back(static_cast<std::size_t>(len / 2));
  }
}

void PartialHadamard::rows(std::span<const double> x, std::span<const std::int64_t> idx,
                           std::span<double> out) {
  if (static_cast<std::int64_t>(x.size()) != n_) throw UsageError("input length mismatch");
  if (idx.size() != out.size()) throw UsageError("index/output length mismatch");
  if (idx.empty()) return;
  reqs_.resize(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= n_) throw UsageError("row index out of range");
    if (k > 0 && idx[k] <= idx[k - 1]) throw UsageError("row indices must be sorted unique");
    reqs_[k] = Req{idx[k], static_cast<std::int64_t>(k)};
  }
  recurse(x.data(), n_, 0, reqs_.data(), reqs_.data() + reqs_.size(), out.data());
}

void PartialHadamard::recurse(const double* x, std::int64_t len, int level, Req* first,
                              Req* last, double* out) {
  if (len == 1) {
    for (Req* r = first; r != last; ++r) out[r->out] = x[0];
    return;
  }
  const std::int64_t h = len / 2;
  // Requests are sorted by index, so the split point is a partition point.
  Req* mid = std::partition_point(first, last, [h](const Req& r) { return r.idx < h; });
  double* buf = scratch_[static_cast<std::size_t>(level)].data();
  if (first != mid) {
    for (std::int64_t i = 0; i < h; ++i) buf[i] = (x[i] + x[i + h]) * kInvSqrt2;
    recurse(buf, h, level + 1, first, mid, out);
  }
  if (mid != last) {
    for (std::int64_t i = 0; i < h; ++i) buf[i] = (x[i] - x[i + h]) * kInvSqrt2;
    for (Req* r = mid; r != last; ++r) r->idx -= h;
    recurse(buf, h, level + 1, mid, last, out);
  }
}

SrhtCount srht_sample_count(std::int64_t n, std::int64_t d, double epsilon) {
  if (!(n > d && d >= 1)) throw UsageError("need n > d >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("epsilon must lie in (0, 1)");
  const double nd = static_cast<double>(n) * static_cast<double>(d);
  const double log_term = std::log(40.0 * nd);
  const double branch1 =
      48.0 * 48.0 * static_cast<double>(d) * log_term * std::log(100.0 * 100.0 * d * log_term);
  const double branch2 = 40.0 * static_cast<double>(d) * log_term / epsilon;
  SrhtCount out;
  out.formula_value = std::max(branch1, branch2);
  const double rounded = std::ceil(out.formula_value);
  if (rounded > static_cast<double>(n)) {
    out.c = n;
    out.capped = true;
  } else {
    out.c = static_cast<std::int64_t>(rounded);
  }
  return out;
}

OLSSolution srht_solve(const Eigen::Ref<const Eigen::MatrixXd>& a,
                       const Eigen::Ref<const Eigen::VectorXd>& b, std::int64_t c,
                       std::uint64_t seed) {
  const std::int64_t n0 = a.rows();
  const std::int64_t d = a.cols();
  if (n0 < d) throw UsageError("need rows >= columns");
  if (n0 != b.rows()) throw UsageError("matrix/target row mismatch");
  if (c < d) throw UsageError("sample count below column count");
  const std::int64_t n = std::bit_ceil(static_cast<std::uint64_t>(n0));

  Rng rng(seed);
  std::vector<double> sign(static_cast<std::size_t>(n0));
  for (auto& s : sign) s = (rng() >> 63) ? 1.0 : -1.0;

  std::vector<std::int64_t> draws(static_cast<std::size_t>(c));
  for (auto& i : draws) i = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
  std::vector<std::int64_t> uniq = draws;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

  PartialHadamard ph(n);
  std::vector<double> padded(static_cast<std::size_t>(n), 0.0);
  std::vector<double> vals(uniq.size());
  const double w = std::sqrt(static_cast<double>(n) / static_cast<double>(c));

  Eigen::MatrixXd a_s(c, d);
  Eigen::VectorXd b_s(c);
  auto scatter = [&](auto&& put) {
    for (std::int64_t t = 0; t < c; ++t) {
      const auto pos = std::lower_bound(uniq.begin(), uniq.end(),
                                        draws[static_cast<std::size_t>(t)]) -
                       uniq.begin();
      put(t, w * vals[static_cast<std::size_t>(pos)]);
    }
  };
  for (std::int64_t j = 0; j < d; ++j) {
    for (std::int64_t i = 0; i < n0; ++i) {
      padded[static_cast<std::size_t>(i)] = sign[static_cast<std::size_t>(i)] * a(i, j);
    }
    ph.rows(padded, uniq, vals);
    scatter([&](std::int64_t t, double v) { a_s(t, j) = v; });
  }
  for (std::int64_t i = 0; i < n0; ++i) {
    padded[static_cast<std::size_t>(i)] = sign[static_cast<std::size_t>(i)] * b(i);
  }
  ph.rows(padded, uniq, vals);
  scatter([&](std::int64_t t, double v) { b_s(t) = v; });

  return solve_compressed(a_s, b_s);
}

Eigen::MatrixXd gaussian_apply(const GaussianSketch& sketch,
                               const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (sketch.rows < 1) throw UsageError("sketch needs at least one row");
  const std::int64_t g = sketch.rows;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g, m.cols());
  Eigen::VectorXd col(g);
  Rng rng(sketch.seed);
  for (std::int64_t j = 0; j < m.rows(); ++j) {
    for (std::int64_t i = 0; i < g; ++i) col(i) = rng.normal();
    out.noalias() += col * m.row(j);
  }
  return out;
}

void write_sampleset_csv(const SampleSet& s, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << "index,weight\n";
  char buf[64];
  for (std::size_t t = 0; t < s.indices.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g\n",
                  static_cast<long long>(s.indices[t]), s.weights[t]);
    out << buf;
  }
  if (!out) throw DataError("short write to " + path);
}

}  // namespace toepfit
