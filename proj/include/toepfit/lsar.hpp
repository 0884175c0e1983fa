#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "toepfit/sketch.hpp"
#include "toepfit/toeplitz.hpp"

namespace toepfit {

// State of the lag recursion after the compressed solve at lag p. The window
// covers the first m observations, where m starts at n - p_bar + 1 for p = 1
// and grows by one per lag, so the row count m - p stays constant and row i
// of the lag-(p+1) system extends row i of the lag-p system by one column.
struct LeverageState {
  int p = 0;
  std::int64_t m = 0;
  Eigen::VectorXd scores;        // approximate leverage, length m - p
  Eigen::VectorXd residuals;     // full-length residuals of the lag-p compressed fit
  Eigen::VectorXd coefficients;  // compressed phi at lag p
};

// Outcome of a full fitting run (compressed or exact): selected order, the
// coefficients at that order, the PACF curve, and per-lag wall time. The
// upfront entry is nonzero only for methods that do work before the lag loop.
struct FitResult {
  int p_star = 0;
  Eigen::VectorXd coefficients;
  PACFResult pacf;
  std::vector<double> per_lag_seconds;
  std::vector<Eigen::VectorXd> per_lag_coefficients;
  double upfront_seconds = 0.0;
};

// Exact leverage scores of the single-column lag-1 system: y_i^2 / sum y^2.
Eigen::VectorXd init_leverage_p1(const Eigen::Ref<const Eigen::VectorXd>& window);

// One recursion step: new score(i) = score(i) + r(i)^2 / ||r||^2. Adding the
// previous target column to the design matrix updates the hat diagonal by
// exactly the normalized squared residuals, so with exact residuals this
// reproduces exact leverage scores lag by lag.
Eigen::VectorXd leverage_update(const Eigen::Ref<const Eigen::VectorXd>& scores,
                                const Eigen::Ref<const Eigen::VectorXd>& residuals);

// Scores normalized by their empirical sum. Exact scores of a d-column
// matrix sum to d, giving score/d; approximate scores need not, and dividing
// by the actual sum keeps the result a valid distribution.
Eigen::VectorXd leverage_to_distribution(const Eigen::Ref<const Eigen::VectorXd>& scores);

struct LsarCount {
  std::int64_t c = 0;
  bool capped = false;
};

// Sample-count heuristic c = ceil(K * p * ln(p/delta) / (beta * eps^2)),
// capped at `rows` when rows > 0.
LsarCount lsar_c(int p, double epsilon, double delta, double beta, double k_const = 1.0,
                 std::int64_t rows = 0);

// Drives the recursion: per lag, sample c rows from the score distribution,
// solve the compressed window system, and push residuals into the next lag's
// scores. Exposed separately from lsar_fit so tests can replay single steps.
class LsarDriver {
 public:
  LsarDriver(const TimeSeries& series, int p_bar, std::int64_t c, std::uint64_t seed);

  LeverageState first_lag() const;
  LeverageState advance(const LeverageState& state) const;

  // Window system for lag p: first n - p_bar + p observations.
  ToeplitzSystem window_system(int p) const;
  std::int64_t row_count() const { return w_; }

 private:
  LeverageState solve_at(int p, std::int64_t m, Eigen::VectorXd scores) const;

  const TimeSeries& series_;
  int p_bar_;
  std::int64_t c_;
  std::uint64_t seed_;
  std::int64_t w_;  // constant row count n - p_bar
};

// Full lag-recursive fit: PACF over lags 1..p_bar from compressed solves,
// order = largest lag with |tau| >= 1.96/sqrt(c), coefficients from the
// compressed solve at that lag.
FitResult lsar_fit(const TimeSeries& series, int p_bar, std::int64_t c, std::uint64_t seed);

}  // namespace toepfit
