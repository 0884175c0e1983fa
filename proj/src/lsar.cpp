#include "toepfit/lsar.hpp"

#include <chrono>
#include <cmath>

#include "toepfit/errors.hpp"
#include "toepfit/rng.hpp"

namespace toepfit {

Eigen::VectorXd init_leverage_p1(const Eigen::Ref<const Eigen::VectorXd>& window) {
  const double total = window.squaredNorm();
  if (total == 0.0) throw NumericalError("all-zero window; leverage undefined");
  return window.array().square() / total;
}

Eigen::VectorXd leverage_update(const Eigen::Ref<const Eigen::VectorXd>& scores,
                                const Eigen::Ref<const Eigen::VectorXd>& residuals) {
  if (scores.size() != residuals.size()) throw UsageError("score/residual length mismatch");
  const double total = residuals.squaredNorm();
  if (total == 0.0) {
    throw NumericalError("zero residual norm; sampling distribution undefined");
  }
  return scores + (residuals.array().square() / total).matrix();
}

Eigen::VectorXd leverage_to_distribution(const Eigen::Ref<const Eigen::VectorXd>& scores) {
  if (scores.size() == 0) throw UsageError("empty score vector");
  double total = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (!(scores(i) >= 0.0)) throw UsageError("negative leverage score");
    total += scores(i);
  }
  if (total == 0.0) throw NumericalError("zero score sum; distribution undefined");
  return scores / total;
}

LsarCount lsar_c(int p, double epsilon, double delta, double beta, double k_const,
                 std::int64_t rows) {
  if (p < 1) throw UsageError("lag order must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must lie in (0, 1)");
  if (!(beta > 0.0 && beta <= 1.0)) throw UsageError("beta must lie in (0, 1]");
  if (!(k_const > 0.0)) throw UsageError("constant must be positive");
  LsarCount out;
  const double value = k_const * p * std::log(p / delta) / (beta * epsilon * epsilon);
  out.c = static_cast<std::int64_t>(std::ceil(value));
  if (rows > 0 && out.c > rows) {
    out.c = rows;
    out.capped = true;
  }
  return out;
}

LsarDriver::LsarDriver(const TimeSeries& series, int p_bar, std::int64_t c,
                       std::uint64_t seed)
    : series_(series), p_bar_(p_bar), c_(c), seed_(seed) {
  if (p_bar < 1) throw UsageError("maximum lag must be at least 1");
  if (series.size() <= static_cast<std::size_t>(p_bar) + 1) {
    throw DataError("series too short for maximum lag " + std::to_string(p_bar));
  }
  if (c < p_bar) throw UsageError("sample count below maximum lag");
  w_ = static_cast<std::int64_t>(series.size()) - p_bar;
}

ToeplitzSystem LsarDriver::window_system(int p) const {
  return ToeplitzSystem(series_, p, static_cast<std::size_t>(w_ + p));
}

LeverageState LsarDriver::solve_at(int p, std::int64_t m, Eigen::VectorXd scores) const {
  const ToeplitzSystem sys = window_system(p);
  const Eigen::VectorXd dist = leverage_to_distribution(scores);
  const SampleSet sample =
      sample_rows(dist, c_, derive_seed(seed_, static_cast<std::uint64_t>(p)));
  Eigen::MatrixXd a_s;
  Eigen::VectorXd b_s;
  apply_sample(sys, sample, a_s, b_s);
  const OLSSolution sol = solve_compressed(a_s, b_s);

  LeverageState state;
  state.p = p;
  state.m = m;
  state.scores = std::move(scores);
  state.coefficients = sol.coefficients;
  state.residuals = residuals(sys, sol.coefficients);
  return state;
}

LeverageState LsarDriver::first_lag() const {
  const std::int64_t m = w_ + 1;
  Eigen::Map<const Eigen::VectorXd> window(series_.values().data(), w_);
  return solve_at(1, m, init_leverage_p1(window));
}

LeverageState LsarDriver::advance(const LeverageState& state) const {
  if (state.p < 1 || state.p >= p_bar_) throw UsageError("cannot advance past maximum lag");
  return solve_at(state.p + 1, state.m + 1, leverage_update(state.scores, state.residuals));
}

FitResult lsar_fit(const TimeSeries& series, int p_bar, std::int64_t c,
                   std::uint64_t seed) {
  const LsarDriver driver(series, p_bar, c, seed);
  FitResult fit;
  fit.pacf.method = PacfMethod::lsar;
  fit.pacf.bound = 1.96 / std::sqrt(static_cast<double>(c));
  fit.pacf.taus.reserve(static_cast<std::size_t>(p_bar));
  fit.per_lag_seconds.reserve(static_cast<std::size_t>(p_bar));
  fit.per_lag_coefficients.reserve(static_cast<std::size_t>(p_bar));

  using clock = std::chrono::steady_clock;
  LeverageState state;
  for (int p = 1; p <= p_bar; ++p) {
    const auto t0 = clock::now();
    state = (p == 1) ? driver.first_lag() : driver.advance(state);
    fit.per_lag_seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    fit.pacf.taus.push_back(state.coefficients(p - 1));
    fit.per_lag_coefficients.push_back(state.coefficients);
  }
  fit.p_star = select_order(fit.pacf);
  if (fit.p_star > 0) {
    fit.coefficients = fit.per_lag_coefficients[static_cast<std::size_t>(fit.p_star - 1)];
  }
  return fit;
}

}  // namespace toepfit
