#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "toepfit/series.hpp"

namespace toepfit {

// Lagged least-squares system for an AR(p) fit on the first `n_used`
// observations y_1..y_n of a series: row i (0-based) of the design matrix is
// (y_{p+i}, y_{p+i-1}, ..., y_{i+1}) in 1-based series indexing and the
// target is y_{p+i+1}. The matrix has constant descending diagonals and is
// never stored; entries are read straight out of the shared series buffer.
class ToeplitzSystem {
 public:
  ToeplitzSystem(const TimeSeries& series, int p);
  ToeplitzSystem(const TimeSeries& series, int p, std::size_t n_used);

  int p() const { return p_; }
  std::size_t n() const { return n_; }               // observations used
  std::int64_t rows() const { return static_cast<std::int64_t>(n_) - p_; }

  double entry(std::int64_t i, int j) const {        // design matrix (i, j)
    return data_[static_cast<std::size_t>(p_ + i - 1 - j)];
  }
  double target(std::int64_t i) const { return data_[static_cast<std::size_t>(p_ + i)]; }

  // Row i of the design matrix restricted to its first `width` columns.
  void copy_row(std::int64_t i, int width, double* out) const {
    const double* src = data_ + (p_ + i - 1);
    for (int j = 0; j < width; ++j) out[j] = src[-j];
  }

  const double* values() const { return data_; }

 private:
  std::shared_ptr<const std::vector<double>> storage_;
  const double* data_;
  std::size_t n_;
  int p_;
};

enum class SolveMethod { exact_qr, exact_svd, compressed };

struct OLSSolution {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;  // A x - b
  double residual_norm = 0.0;
  SolveMethod method = SolveMethod::exact_qr;
};

enum class PacfMethod { exact, lsar, rh, srht };

const char* pacf_method_name(PacfMethod m);

// Partial autocorrelation estimates for lags 1..p_bar (taus[h-1] is lag h)
// plus the two-sided cutoff used for order selection.
struct PACFResult {
  std::vector<double> taus;
  double bound = 0.0;
  PacfMethod method = PacfMethod::exact;
};

inline constexpr std::int64_t kDefaultMaterializeCap = 200'000'000;

ToeplitzSystem make_system(const TimeSeries& series, int p);

// Dense copy of the system. Refuses to allocate more than max_entries matrix
// entries; pass a larger cap explicitly for oversized systems.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> materialize(
    const ToeplitzSystem& sys, std::int64_t max_entries = kDefaultMaterializeCap);

// Least-squares solve. Rank-revealing QR when numerically full rank, minimum-
// norm SVD otherwise (singular values below max(rows, cols) * eps * sigma_max
// are treated as zero). Works for rows < cols via the SVD path.
OLSSolution solve_exact(const Eigen::Ref<const Eigen::MatrixXd>& A,
                        const Eigen::Ref<const Eigen::VectorXd>& b);

// Residuals A phi - b streamed off the implicit system; never materializes.
Eigen::VectorXd residuals(const ToeplitzSystem& sys,
                          const Eigen::Ref<const Eigen::VectorXd>& phi);

// Diagonal of the hat matrix A (A^T A)^+ A^T via squared row norms of the
// thin Q factor. Requires rows >= cols and full column rank.
Eigen::VectorXd exact_leverage_scores(const Eigen::Ref<const Eigen::MatrixXd>& A);

// tau_h = last coefficient of the exact lag-h fit on the full series, for
// h = 1..p_bar; bound = 1.96 / sqrt(n - p_bar).
PACFResult pacf_exact(const TimeSeries& series, int p_bar);

// Largest lag whose |tau| clears the bound; 0 when none does.
int select_order(const PACFResult& pacf);

// 100 * ||estimate - reference|| / ||reference||.
double relative_error_pct(const Eigen::Ref<const Eigen::VectorXd>& estimate,
                          const Eigen::Ref<const Eigen::VectorXd>& reference);

// Columns: lag, tau, bound, significant.
void write_pacf_csv(const PACFResult& pacf, const std::string& path);

}  // namespace toepfit
