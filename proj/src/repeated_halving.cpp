#include "toepfit/repeated_halving.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "toepfit/errors.hpp"
#include "toepfit/rng.hpp"

namespace toepfit {

void DenseRowSource::gather(std::span<const std::int64_t> idx,
                            Eigen::Ref<Eigen::MatrixXd> out) const {
  for (std::size_t t = 0; t < idx.size(); ++t) {
    out.row(static_cast<Eigen::Index>(t)) = a_.row(idx[t]);
  }
}

void AugmentedRowSource::gather(std::span<const std::int64_t> idx,
                                Eigen::Ref<Eigen::MatrixXd> out) const {
  const int p = sys_.p();
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const std::int64_t i = idx[t];
    const auto row = static_cast<Eigen::Index>(t);
    for (int j = 0; j < p; ++j) out(row, j) = sys_.entry(i, j);
    out(row, p) = sys_.target(i);
  }
}

RHConfig RHConfig::defaults(std::int64_t n, std::int64_t k, std::int64_t c,
                            std::uint64_t seed) {
  RHConfig cfg;
  cfg.sample_count = c;
  cfg.base_threshold = default_base_threshold(c, k);
  cfg.gaussian_rows = default_gaussian_rows(std::max<std::int64_t>(n, 2));
  cfg.seed = seed;
  return cfg;
}

void RHConfig::validate() const {
  if (sample_count < 1) throw UsageError("sample count must be positive");
  if (base_threshold < sample_count) throw UsageError("base threshold below sample count");
  if (gaussian_rows < 1) throw UsageError("need at least one sketch row");
}

namespace {

// Factorization of the reference matrix, reused across row blocks. Scores
// come from l(i) = ||R^-T P^T x_i||^2 where B P = Q R; a sketch replaces the
// implicit thin Q with (1/sqrt(g)) G Q so the expectation is unchanged.
class LeverageKernel {
 public:
  LeverageKernel(const Eigen::Ref<const Eigen::MatrixXd>& b, const GaussianSketch* sketch) {
    if (b.rows() < b.cols()) throw NumericalError("reference matrix has too few rows");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    qr.setThreshold(static_cast<double>(std::max(b.rows(), b.cols())) *
                    std::numeric_limits<double>::epsilon());
    qr.compute(b);
    if (qr.rank() != b.cols()) {
      throw NumericalError("reference matrix is rank deficient");
    }
    const auto k = b.cols();
    r_ = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    perm_ = qr.colsPermutation();
    if (sketch != nullptr) {
      Eigen::MatrixXd thin_q = qr.householderQ() * Eigen::MatrixXd::Identity(b.rows(), k);
      mix_ = gaussian_apply(*sketch, thin_q) / std::sqrt(static_cast<double>(sketch->rows));
      sketched_ = true;
    }
  }

  void scores(const Eigen::Ref<const Eigen::MatrixXd>& blk, Eigen::Ref<Eigen::VectorXd> out) const {
    Eigen::MatrixXd zt = (blk * perm_).transpose();
    r_.triangularView<Eigen::Upper>().transpose().solveInPlace(zt);
    if (sketched_) {
      out = (mix_ * zt).colwise().squaredNorm().transpose();
    } else {
      out = zt.colwise().squaredNorm().transpose();
    }
  }

 private:
  Eigen::MatrixXd r_;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic> perm_;
  Eigen::MatrixXd mix_;
  bool sketched_ = false;
};

constexpr std::int64_t kScoreBlock = 8192;

Eigen::VectorXd scores_for(const RowSource& src, std::span<const std::int64_t> idx,
                           const Eigen::Ref<const Eigen::MatrixXd>& b,
                           const GaussianSketch* sketch) {
  if (src.cols() != b.cols()) throw UsageError("column count mismatch");
  const LeverageKernel kernel(b, sketch);
  const auto n = static_cast<std::int64_t>(idx.size());
  Eigen::VectorXd out(n);
  Eigen::MatrixXd buf(std::min(kScoreBlock, n), src.cols());
  for (std::int64_t s = 0; s < n; s += kScoreBlock) {
    const std::int64_t len = std::min(kScoreBlock, n - s);
    if (len != buf.rows()) buf.resize(len, src.cols());
    src.gather(idx.subspan(static_cast<std::size_t>(s), static_cast<std::size_t>(len)), buf);
    kernel.scores(buf, out.segment(s, len));
  }
  return out;
}

std::vector<std::int64_t> iota_indices(std::int64_t n) {
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), std::int64_t{0});
  return idx;
}

}  // namespace

Eigen::VectorXd generalized_leverage(const Eigen::Ref<const Eigen::MatrixXd>& c_rows,
                                     const Eigen::Ref<const Eigen::MatrixXd>& b,
                                     const GaussianSketch* sketch) {
  const DenseRowSource src(c_rows);
  return scores_for(src, iota_indices(c_rows.rows()), b, sketch);
}

SpectralApprox repeated_halving(const RowSource& x, const RHConfig& config) {
  config.validate();
  const std::int64_t n = x.rows();
  const std::int64_t k = x.cols();
  if (n < 1) throw UsageError("empty source");

  std::vector<std::vector<std::int64_t>> levels;
  levels.push_back(iota_indices(n));
  while (static_cast<std::int64_t>(levels.back().size()) > config.base_threshold) {
    const std::vector<std::int64_t>& cur = levels.back();
    const std::int64_t size = static_cast<std::int64_t>(cur.size());
    const std::int64_t half = size / 2;
    std::vector<std::int64_t> next(cur);
    Rng rng(derive_seed(config.seed, 0x10000u + levels.size()));
    for (std::int64_t i = 0; i < half; ++i) {
      const std::int64_t j =
          i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(size - i)));
      std::swap(next[static_cast<std::size_t>(i)], next[static_cast<std::size_t>(j)]);
    }
    next.resize(static_cast<std::size_t>(half));
    std::sort(next.begin(), next.end());
    levels.push_back(std::move(next));
  }

  const int depth = static_cast<int>(levels.size()) - 1;
  Eigen::MatrixXd approx(static_cast<Eigen::Index>(levels.back().size()), k);
  x.gather(levels.back(), approx);

  for (int i = depth - 1; i >= 0; --i) {
    const std::vector<std::int64_t>& cur = levels[static_cast<std::size_t>(i)];
    const GaussianSketch sketch{config.gaussian_rows,
                                derive_seed(config.seed, 0x20000u + static_cast<unsigned>(i))};
    const Eigen::VectorXd scores = scores_for(x, cur, approx, &sketch);
    const Eigen::VectorXd dist = leverage_to_distribution(scores);
    const SampleSet sample = sample_rows(
        dist, config.sample_count, derive_seed(config.seed, 0x30000u + static_cast<unsigned>(i)));

    std::vector<std::int64_t> picked(sample.indices.size());
    for (std::size_t t = 0; t < picked.size(); ++t) {
      picked[t] = cur[static_cast<std::size_t>(sample.indices[t])];
    }
    Eigen::MatrixXd next(config.sample_count, k);
    x.gather(picked, next);
    for (std::int64_t t = 0; t < config.sample_count; ++t) {
      next.row(t) *= sample.weights[static_cast<std::size_t>(t)];
    }
    approx = std::move(next);
  }

  SpectralApprox out;
  out.rows = std::move(approx);
  out.levels = depth;
  out.sample_count = out.rows.rows();
  return out;
}

Eigen::VectorXd rh_leverage_scores(const ToeplitzSystem& sys, const RHConfig& config) {
  const AugmentedRowSource src(sys);
  const SpectralApprox approx = repeated_halving(src, config);
  // Final pass over all rows stays unsketched: at or below the base threshold
  // the approximation is the matrix itself, and scoring a matrix against its
  // own column space reproduces exact leverage.
  return scores_for(src, iota_indices(src.rows()), approx.rows, nullptr);
}

FitResult rh_fit(const TimeSeries& series, int p_bar, std::int64_t c,
                 const RHConfig* config, std::uint64_t seed) {
  if (p_bar < 1) throw UsageError("maximum lag must be at least 1");
  if (series.size() <= static_cast<std::size_t>(p_bar) + 1) {
    throw DataError("series too short for maximum lag " + std::to_string(p_bar));
  }
  if (c < p_bar) throw UsageError("sample count below maximum lag");

  const ToeplitzSystem full(series, p_bar);
  const RHConfig cfg = config != nullptr
                           ? *config
                           : RHConfig::defaults(full.rows(), p_bar + 1, c,
                                                derive_seed(seed, 0x5c07e5u));

  FitResult fit;
  fit.pacf.method = PacfMethod::rh;
  fit.pacf.bound = 1.96 / std::sqrt(static_cast<double>(c));

  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  const Eigen::VectorXd scores = rh_leverage_scores(full, cfg);
  const Eigen::VectorXd dist = leverage_to_distribution(scores);
  fit.upfront_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  Eigen::MatrixXd a_s;
  Eigen::VectorXd b_s;
  for (int p = 1; p <= p_bar; ++p) {
    t0 = clock::now();
    const SampleSet sample =
        sample_rows(dist, c, derive_seed(seed, static_cast<std::uint64_t>(p)));
    apply_sample(full, sample, p, a_s, b_s);
    const OLSSolution sol = solve_compressed(a_s, b_s);
    fit.per_lag_seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    fit.pacf.taus.push_back(sol.coefficients(p - 1));
    fit.per_lag_coefficients.push_back(sol.coefficients);
  }
  fit.p_star = select_order(fit.pacf);
  if (fit.p_star > 0) {
    fit.coefficients = fit.per_lag_coefficients[static_cast<std::size_t>(fit.p_star - 1)];
  }
  return fit;
}

FitResult rh_fit(const TimeSeries& series, int p_bar, std::int64_t c, std::uint64_t seed) {
  return rh_fit(series, p_bar, c, nullptr, seed);
}

}  // namespace toepfit
