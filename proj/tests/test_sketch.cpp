#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "toepfit/errors.hpp"
#include "toepfit/rng.hpp"
#include "toepfit/series.hpp"
#include "toepfit/sketch.hpp"

using namespace toepfit;

namespace {

// Brute-force oracle: build the normalized transform matrix straight from the
// recursive definition and multiply.
Eigen::MatrixXd naive_hadamard_matrix(std::int64_t n) {
  if (n == 1) return Eigen::MatrixXd::Ones(1, 1);
  const Eigen::MatrixXd h = naive_hadamard_matrix(n / 2);
  Eigen::MatrixXd out(n, n);
  out.topLeftCorner(n / 2, n / 2) = h;
  out.topRightCorner(n / 2, n / 2) = h;
  out.bottomLeftCorner(n / 2, n / 2) = h;
  out.bottomRightCorner(n / 2, n / 2) = -h;
  return out / std::sqrt(2.0);
}

Eigen::MatrixXd random_matrix(std::int64_t rows, std::int64_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Eigen::VectorXd random_vector(std::int64_t n, std::uint64_t seed) {
  return random_matrix(n, 1, seed);
}

}  // namespace

TEST_CASE("fast transform equals the recursive definition on small sizes") {
  for (std::int64_t n : {2, 4, 8, 16}) {
    Eigen::MatrixXd h = naive_hadamard_matrix(n);
    Eigen::VectorXd x = random_vector(n, 100 + static_cast<std::uint64_t>(n));
    Eigen::VectorXd fast = hadamard_apply(x);
    CHECK((fast - h * x).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  Eigen::VectorXd e0(2);
  e0 << 1, 0;
  Eigen::VectorXd t = hadamard_apply(e0);
  CHECK(t(0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(t(1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("transform is involutive and norm preserving at large size") {
  const std::int64_t n = 1 << 16;
  Eigen::VectorXd x = random_vector(n, 7);
  Eigen::VectorXd hx = hadamard_apply(x);
  CHECK(hx.norm() == doctest::Approx(x.norm()).epsilon(1e-12));
  Eigen::VectorXd back = hadamard_apply(hx);
  CHECK((back - x).norm() <= 1e-12 * x.norm());
}

TEST_CASE("transform rejects non-power-of-two lengths") {
  std::vector<double> x{1, 2, 3};
  CHECK_THROWS_AS(hadamard_apply(std::span<double>(x)), UsageError);
  std::vector<double> empty;
  CHECK_THROWS_AS(hadamard_apply(std::span<double>(empty)), UsageError);
}

TEST_CASE("pruned transform matches the full transform on requested rows") {
  const std::int64_t n = 4096;
  Eigen::VectorXd x = random_vector(n, 11);
  Eigen::VectorXd full = hadamard_apply(x);

  PartialHadamard partial(n);
  Rng rng(12);
  std::vector<std::int64_t> idx;
  for (std::int64_t i = 0; i < n; ++i)
    if (rng.uniform01() < 0.01) idx.push_back(i);
  REQUIRE(idx.size() > 4);
  std::vector<double> out(idx.size());
  partial.rows(std::span<const double>(x.data(), n), idx, out);
  for (std::size_t k = 0; k < idx.size(); ++k)
    CHECK(out[k] == doctest::Approx(full(idx[k])).epsilon(1e-12));

  // all rows
  std::vector<std::int64_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<double> out_all(n);
  partial.rows(std::span<const double>(x.data(), n), all, out_all);
  for (std::int64_t i = 0; i < n; ++i)
    CHECK(out_all[static_cast<std::size_t>(i)] == doctest::Approx(full(i)).epsilon(1e-12));

  // single row, and misuse
  std::vector<std::int64_t> one{n - 1};
  std::vector<double> out_one(1);
  partial.rows(std::span<const double>(x.data(), n), one, out_one);
  CHECK(out_one[0] == doctest::Approx(full(n - 1)).epsilon(1e-12));
  std::vector<std::int64_t> unsorted{5, 3};
  std::vector<double> out_two(2);
  CHECK_THROWS_AS(partial.rows(std::span<const double>(x.data(), n), unsorted, out_two),
                  UsageError);
}

TEST_CASE("sample count formula: frozen regression value and shape") {
  SrhtCount big = srht_sample_count(std::int64_t{1} << 20, 10, 0.5);
  CHECK(big.formula_value == doctest::Approx(6633578.924774391).epsilon(1e-12));
  CHECK(big.capped);
  CHECK(big.c == (std::int64_t{1} << 20));

  // monotone nonincreasing in epsilon
  SrhtCount loose = srht_sample_count(1 << 20, 10, 0.9);
  CHECK(loose.formula_value <= big.formula_value);

  CHECK_THROWS_AS(srht_sample_count(5, 5, 0.5), UsageError);
  CHECK_THROWS_AS(srht_sample_count(10, 0, 0.5), UsageError);
  CHECK_THROWS_AS(srht_sample_count(100, 5, 0.0), UsageError);
  CHECK_THROWS_AS(srht_sample_count(100, 5, 1.0), UsageError);
}

TEST_CASE("row sampling: weight law, point mass, and validation") {
  const std::int64_t n = 16, c = 8;
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / n);
  SampleSet s = sample_rows(uniform, c, 5);
  REQUIRE(s.size() == c);
  CHECK(s.source_rows == n);
  for (double w : s.weights)
    CHECK(w == doctest::Approx(std::sqrt(static_cast<double>(n) / c)).epsilon(1e-15));
  for (std::int64_t i : s.indices) {
    CHECK(i >= 0);
    CHECK(i < n);
  }

  Eigen::VectorXd point = Eigen::VectorXd::Zero(n);
  point(3) = 1.0;
  SampleSet sp = sample_rows(point, 5, 6);
  for (std::int64_t i : sp.indices) CHECK(i == 3);
  for (double w : sp.weights) CHECK(w == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-15));

  SampleSet again = sample_rows(uniform, c, 5);
  CHECK(again.indices == s.indices);

  Eigen::VectorXd negative = uniform;
  negative(0) = -0.1;
  CHECK_THROWS_AS(sample_rows(negative, c, 1), DataError);
  Eigen::VectorXd off = Eigen::VectorXd::Constant(n, 0.9 / n);
  CHECK_THROWS_AS(sample_rows(off, c, 1), DataError);
  CHECK_THROWS_AS(sample_rows(uniform, 0, 1), UsageError);
}

TEST_CASE("sketched Gram matrix is unbiased") {
  Eigen::MatrixXd a = random_matrix(100, 5, 21);
  Eigen::MatrixXd gram = a.transpose() * a;
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(100, 0.01);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(5, 5);
  const int seeds = 500;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(100);
  for (int t = 0; t < seeds; ++t) {
    SampleSet s = sample_rows(uniform, 50, 1000 + t);
    Eigen::MatrixXd as;
    Eigen::VectorXd bs;
    apply_sample(a, b, s, as, bs);
    acc += as.transpose() * as;
  }
  acc /= seeds;
  CHECK((acc - gram).norm() <= 0.05 * gram.norm());
}

TEST_CASE("apply_sample rescales rows of the implicit system") {
  TimeSeries series({1, 2, 3, 4, 5});
  ToeplitzSystem sys(series, 2);
  SampleSet s;
  s.indices = {1};
  s.weights = {0.7};
  s.source_rows = 3;
  Eigen::MatrixXd as;
  Eigen::VectorXd bs;
  apply_sample(sys, s, as, bs);
  REQUIRE(as.rows() == 1);
  CHECK(as(0, 0) == doctest::Approx(0.7 * 3.0));
  CHECK(as(0, 1) == doctest::Approx(0.7 * 2.0));
  CHECK(bs(0) == doctest::Approx(0.7 * 4.0));

  // width restriction keeps leading columns
  apply_sample(sys, s, 1, as, bs);
  REQUIRE(as.cols() == 1);
  CHECK(as(0, 0) == doctest::Approx(0.7 * 3.0));

  // dense overload agrees with the system overload
  auto [a, b] = materialize(sys);
  SampleSet many;
  many.indices = {0, 2, 2};
  many.weights = {1.5, 0.5, 2.0};
  many.source_rows = 3;
  Eigen::MatrixXd a1, a2;
  Eigen::VectorXd b1, b2;
  apply_sample(sys, many, a1, b1);
  apply_sample(a, b, many, a2, b2);
  CHECK(a1 == a2);
  CHECK(b1 == b2);

  SampleSet bad;
  bad.indices = {3};
  bad.weights = {1.0};
  bad.source_rows = 3;
  CHECK_THROWS_AS(apply_sample(sys, bad, as, bs), UsageError);
}

TEST_CASE("compressed solve of the full system equals the exact solve") {
  ARModelSpec spec = random_stationary_ar(3, 31);
  TimeSeries series = simulate_ar(spec, 200, 32);
  ToeplitzSystem sys = make_system(series, 3);
  auto [a, b] = materialize(sys);
  OLSSolution exact = solve_exact(a, b);

  SampleSet all;
  all.source_rows = sys.rows();
  for (std::int64_t i = 0; i < sys.rows(); ++i) {
    all.indices.push_back(i);
    all.weights.push_back(1.0);
  }
  Eigen::MatrixXd as;
  Eigen::VectorXd bs;
  apply_sample(sys, all, as, bs);
  OLSSolution comp = solve_compressed(as, bs);
  CHECK(comp.method == SolveMethod::compressed);
  CHECK((comp.coefficients - exact.coefficients).norm() < 1e-12);

  // uniform weight rescaling cancels in the argmin
  for (auto& w : all.weights) w *= 2.0;
  apply_sample(sys, all, as, bs);
  OLSSolution doubled = solve_compressed(as, bs);
  CHECK((doubled.coefficients - exact.coefficients).norm() < 1e-12);

  // fewer draws than columns: minimum-norm path, no throw
  SampleSet tiny;
  tiny.indices = {0, 1};
  tiny.weights = {1.0, 1.0};
  tiny.source_rows = sys.rows();
  apply_sample(sys, tiny, as, bs);
  OLSSolution mn = solve_compressed(as, bs);
  CHECK(mn.coefficients.allFinite());
}

TEST_CASE("randomized-Hadamard solve is accurate, deterministic, and padded correctly") {
  // a genuine regression: target = signal in the column space plus small noise
  Eigen::MatrixXd a = random_matrix(64, 2, 41);
  Eigen::VectorXd truth(2);
  truth << 1.5, -0.75;
  Eigen::VectorXd b = a * truth + 0.1 * random_vector(64, 42);
  OLSSolution exact = solve_exact(a, b);

  int good = 0;
  for (int seed = 0; seed < 50; ++seed) {
    OLSSolution s = srht_solve(a, b, 64, 5000 + seed);
    const double err = (s.coefficients - exact.coefficients).norm() / exact.coefficients.norm();
    good += err < 0.15;
  }
  CHECK(good >= 45);

  // non-power-of-two row count exercises zero padding
  Eigen::MatrixXd a2 = random_matrix(100, 3, 43);
  Eigen::VectorXd truth3(3);
  truth3 << 0.5, 2.0, -1.0;
  Eigen::VectorXd b2 = a2 * truth3 + 0.1 * random_vector(100, 44);
  OLSSolution exact2 = solve_exact(a2, b2);
  OLSSolution padded = srht_solve(a2, b2, 128, 9);
  CHECK(padded.coefficients.allFinite());
  CHECK((padded.coefficients - exact2.coefficients).norm() < 0.1 * exact2.coefficients.norm());

  OLSSolution r1 = srht_solve(a2, b2, 64, 10);
  OLSSolution r2 = srht_solve(a2, b2, 64, 10);
  CHECK(r1.coefficients == r2.coefficients);

  CHECK_THROWS_AS(srht_solve(a2, b2, 2, 1), UsageError);
}

TEST_CASE("gaussian sketch: zero input, determinism, and norm concentration") {
  GaussianSketch sk{64, 77};
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(128, 3);
  CHECK(gaussian_apply(sk, zero).isZero(0.0));

  Eigen::MatrixXd m = random_matrix(128, 3, 78);
  Eigen::MatrixXd g1 = gaussian_apply(sk, m);
  Eigen::MatrixXd g2 = gaussian_apply(sk, m);
  REQUIRE(g1.rows() == 64);
  REQUIRE(g1.cols() == 3);
  CHECK(g1 == g2);

  int inside = 0;
  const int vectors = 1000;
  for (int t = 0; t < vectors; ++t) {
    Eigen::VectorXd v = random_vector(128, 9000 + t);
    v.normalize();
    GaussianSketch per{64, 500 + static_cast<std::uint64_t>(t)};
    const double est = gaussian_apply(per, v).squaredNorm() / 64.0;
    inside += est >= 0.5 && est <= 2.0;
  }
  CHECK(inside >= 950);
}

TEST_CASE("sketch config validation") {
  SketchConfig ok;
  CHECK_NOTHROW(ok.validate());
  SketchConfig bad_eps;
  bad_eps.epsilon = 1.5;
  CHECK_THROWS_AS(bad_eps.validate(), UsageError);
  SketchConfig bad_delta;
  bad_delta.delta = 0.0;
  CHECK_THROWS_AS(bad_delta.validate(), UsageError);
  SketchConfig bad_c;
  bad_c.c_override = 0;
  CHECK_THROWS_AS(bad_c.validate(), UsageError);
}
