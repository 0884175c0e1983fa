#include "toepfit/toeplitz.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "toepfit/errors.hpp"

namespace toepfit {

ToeplitzSystem::ToeplitzSystem(const TimeSeries& series, int p)
    : ToeplitzSystem(series, p, series.size()) {}

ToeplitzSystem::ToeplitzSystem(const TimeSeries& series, int p, std::size_t n_used)
    : storage_(series.storage()), data_(storage_->data()), n_(n_used), p_(p) {
  if (p < 1) throw UsageError("lag order must be at least 1");
  if (n_used > series.size()) throw UsageError("window exceeds series length");
  if (n_used <= static_cast<std::size_t>(p)) {
    throw DataError("series window of length " + std::to_string(n_used) +
                    " is too short for lag order " + std::to_string(p));
  }
}

const char* pacf_method_name(PacfMethod m) {
  switch (m) {
    case PacfMethod::exact: return "exact";
    case PacfMethod::lsar: return "lsar";
    case PacfMethod::rh: return "rh";
    case PacfMethod::srht: return "srht";
  }
  return "?";
}

ToeplitzSystem make_system(const TimeSeries& series, int p) {
  return ToeplitzSystem(series, p);
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> materialize(const ToeplitzSystem& sys,
                                                        std::int64_t max_entries) {
  const std::int64_t m = sys.rows();
  const int p = sys.p();
  if (m * p > max_entries) {
    throw UsageError("refusing to materialize " + std::to_string(m * p) +
                     " entries (cap " + std::to_string(max_entries) + ")");
  }
  Eigen::MatrixXd A(m, p);
  Eigen::VectorXd b(m);
  // Columns are contiguous slices of the series: column j holds
  // y_{p-j} .. y_{n-1-j} (1-based), so fill column-wise.
  Eigen::Map<const Eigen::VectorXd> v(sys.values(), static_cast<Eigen::Index>(sys.n()));
  for (int j = 0; j < p; ++j) A.col(j) = v.segment(p - 1 - j, m);
  b = v.segment(p, m);
  return {std::move(A), std::move(b)};
}

OLSSolution solve_exact(const Eigen::Ref<const Eigen::MatrixXd>& A,
                        const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (A.rows() == 0 || A.cols() == 0) throw UsageError("empty system");
  if (A.rows() != b.rows()) throw UsageError("matrix/target row mismatch");
  const double tol = static_cast<double>(std::max(A.rows(), A.cols())) *
                     std::numeric_limits<double>::epsilon();
  OLSSolution sol;
  bool solved = false;
  if (A.rows() >= A.cols()) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    qr.setThreshold(tol);
    qr.compute(A);
    if (qr.rank() == A.cols()) {
      sol.coefficients = qr.solve(b);
      sol.method = SolveMethod::exact_qr;
      solved = true;
    }
  }
  if (!solved) {
    // Rank deficient or underdetermined: minimum-norm least squares.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(tol);
    sol.coefficients = svd.solve(b);
    sol.method = SolveMethod::exact_svd;
  }
  sol.residuals = A * sol.coefficients - b;
  sol.residual_norm = sol.residuals.norm();
  return sol;
}

Eigen::VectorXd residuals(const ToeplitzSystem& sys,
                          const Eigen::Ref<const Eigen::VectorXd>& phi) {
  const int p = sys.p();
  if (phi.size() != p) throw UsageError("coefficient length does not match lag order");
  const std::int64_t m = sys.rows();
  Eigen::Map<const Eigen::VectorXd> v(sys.values(), static_cast<Eigen::Index>(sys.n()));
  Eigen::VectorXd r = -v.segment(p, m);
  // r_i = sum_j phi_j y_{p+i-j} - y_{p+i+1}; regrouped by series offset so
  // each term is one vectorized axpy over a contiguous slice.
  for (int j = 0; j < p; ++j) r += phi(j) * v.segment(p - 1 - j, m);
  return r;
}

Eigen::VectorXd exact_leverage_scores(const Eigen::Ref<const Eigen::MatrixXd>& A) {
  if (A.rows() < A.cols()) throw UsageError("leverage scores need rows >= cols");
  if (A.cols() == 0) throw UsageError("empty matrix");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  qr.setThreshold(static_cast<double>(std::max(A.rows(), A.cols())) *
                  std::numeric_limits<double>::epsilon());
  qr.compute(A);
  if (qr.rank() != A.cols()) {
    throw NumericalError("matrix is rank deficient; leverage scores undefined");
  }
  // Row norms of the thin Q factor. Column pivoting permutes columns only,
  // which leaves the column space and hence the hat diagonal unchanged.
  Eigen::MatrixXd thin_q = qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), A.cols());
  return thin_q.rowwise().squaredNorm();
}

PACFResult pacf_exact(const TimeSeries& series, int p_bar) {
  if (p_bar < 1) throw UsageError("maximum lag must be at least 1");
  if (series.size() <= static_cast<std::size_t>(p_bar) + 1) {
    throw DataError("series too short for maximum lag " + std::to_string(p_bar));
  }
  PACFResult out;
  out.method = PacfMethod::exact;
  out.taus.resize(static_cast<std::size_t>(p_bar));
  for (int h = 1; h <= p_bar; ++h) {
    auto [A, b] = materialize(make_system(series, h));
    const OLSSolution sol = solve_exact(A, b);
    out.taus[static_cast<std::size_t>(h - 1)] = sol.coefficients(h - 1);
  }
  out.bound = 1.96 / std::sqrt(static_cast<double>(series.size()) - p_bar);
  return out;
}

int select_order(const PACFResult& pacf) {
  for (int h = static_cast<int>(pacf.taus.size()); h >= 1; --h) {
    if (std::abs(pacf.taus[static_cast<std::size_t>(h - 1)]) >= pacf.bound) return h;
  }
  return 0;
}

double relative_error_pct(const Eigen::Ref<const Eigen::VectorXd>& estimate,
                          const Eigen::Ref<const Eigen::VectorXd>& reference) {
  if (estimate.size() != reference.size()) throw UsageError("length mismatch");
  const double ref_norm = reference.norm();
  if (ref_norm == 0.0) throw NumericalError("reference coefficients have zero norm");
  return 100.0 * (estimate - reference).norm() / ref_norm;
}

void write_pacf_csv(const PACFResult& pacf, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << "lag,tau,bound\n";
  char buf[96];
  for (std::size_t i = 0; i < pacf.taus.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i + 1, pacf.taus[i], pacf.bound);
    out << buf;
  }
  if (!out) throw DataError("short write to " + path);
}

}  // namespace toepfit
