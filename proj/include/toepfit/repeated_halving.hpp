#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "toepfit/lsar.hpp"
#include "toepfit/sketch.hpp"
#include "toepfit/toeplitz.hpp"

namespace toepfit {

// Read-only row access to an n x k matrix that may never exist in memory.
// gather() fills out.row(t) with source row idx[t].
class RowSource {
 public:
  virtual ~RowSource() = default;
  virtual std::int64_t rows() const = 0;
  virtual std::int64_t cols() const = 0;
  virtual void gather(std::span<const std::int64_t> idx, Eigen::Ref<Eigen::MatrixXd> out) const = 0;
};

class DenseRowSource final : public RowSource {
 public:
  explicit DenseRowSource(const Eigen::Ref<const Eigen::MatrixXd>& a) : a_(a) {}
  std::int64_t rows() const override { return a_.rows(); }
  std::int64_t cols() const override { return a_.cols(); }
  void gather(std::span<const std::int64_t> idx, Eigen::Ref<Eigen::MatrixXd> out) const override;

 private:
  Eigen::Ref<const Eigen::MatrixXd> a_;
};

// Rows of the augmented system [T, b]: the lag matrix with the target as the
// final column, read straight off the implicit system.
class AugmentedRowSource final : public RowSource {
 public:
  explicit AugmentedRowSource(const ToeplitzSystem& sys) : sys_(sys) {}
  std::int64_t rows() const override { return sys_.rows(); }
  std::int64_t cols() const override { return sys_.p() + 1; }
  void gather(std::span<const std::int64_t> idx, Eigen::Ref<Eigen::MatrixXd> out) const override;

 private:
  ToeplitzSystem sys_;
};

// Row-compressed stand-in whose Gram matrix approximates the source's.
struct SpectralApprox {
  Eigen::MatrixXd rows;
  int levels = 0;
  std::int64_t sample_count = 0;
};

struct RHConfig {
  std::int64_t base_threshold = 0;  // stop halving at or below this row count
  std::int64_t sample_count = 0;    // c
  std::int64_t gaussian_rows = 0;   // g
  std::uint64_t seed = 0;

  static RHConfig defaults(std::int64_t n, std::int64_t k, std::int64_t c,
                           std::uint64_t seed);
  void validate() const;
};

inline std::int64_t default_base_threshold(std::int64_t c, std::int64_t k) {
  const auto logk = static_cast<std::int64_t>(std::ceil(std::log(static_cast<double>(k) + 1.0)));
  return std::max(c, 10 * k * logk);
}

// Leverage of the rows of C measured through the column space of B:
// l(i) = ||B (B^T B)^-1 C(i,:)||^2, computed via B's thin factorization.
// With a sketch, B's orthonormal factor is compressed to `rows` Gaussian
// mixes first (normalized so the expectation stays l(i)).
Eigen::VectorXd generalized_leverage(const Eigen::Ref<const Eigen::MatrixXd>& c_rows,
                                     const Eigen::Ref<const Eigen::MatrixXd>& b,
                                     const GaussianSketch* sketch = nullptr);

// Downward pass: uniformly halve (without replacement) until at most
// base_threshold rows remain; that submatrix is the base approximation.
// Upward pass: per level, score the level's rows against the approximation
// below via sketched generalized leverage, then leverage-sample c rows with
// replacement and weight 1/sqrt(c * p_i).
SpectralApprox repeated_halving(const RowSource& x, const RHConfig& config);

// Scores of all rows of the augmented system [T, b] against the spectral
// approximation returned by repeated_halving. The final pass is unsketched,
// so at or below base_threshold the result is exact leverage of [T, b].
Eigen::VectorXd rh_leverage_scores(const ToeplitzSystem& sys, const RHConfig& config);

// Fit with one upfront score computation: scores of the full-width augmented
// system are computed once, and every lag p samples from that fixed
// distribution, solving on the first p columns of the sampled full-width
// rows (lag-p rows are prefixes of full-width rows). Order selection as in
// lsar_fit; the upfront cost lands in FitResult::upfront_seconds.
FitResult rh_fit(const TimeSeries& series, int p_bar, std::int64_t c,
                 const RHConfig* config, std::uint64_t seed);
FitResult rh_fit(const TimeSeries& series, int p_bar, std::int64_t c, std::uint64_t seed);

}  // namespace toepfit
