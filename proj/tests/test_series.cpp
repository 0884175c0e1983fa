#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "toepfit/errors.hpp"
#include "toepfit/series.hpp"

using namespace toepfit;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("series rejects empty and non-finite input") {
  CHECK_THROWS_AS(TimeSeries(std::vector<double>{}), DataError);
  CHECK_THROWS_AS(TimeSeries({1.0, std::numeric_limits<double>::quiet_NaN()}), DataError);
  CHECK_THROWS_AS(TimeSeries({1.0, std::numeric_limits<double>::infinity()}), DataError);
  TimeSeries ok({1.0, 2.0});
  CHECK(ok.size() == 2);
}

TEST_CASE("companion spectral radius matches known roots") {
  CHECK(companion_spectral_radius({}) == 0.0);
  CHECK(companion_spectral_radius({0.5}) == doctest::Approx(0.5));
  CHECK(companion_spectral_radius({-0.7}) == doctest::Approx(0.7));
  // z^2 - 1.5 z + 0.56 = (z - 0.7)(z - 0.8)
  CHECK(companion_spectral_radius({1.5, -0.56}) == doctest::Approx(0.8).epsilon(1e-10));
}

TEST_CASE("stationarity validation") {
  ARModelSpec unit;
  unit.coefficients = {1.0};
  CHECK_THROWS_AS(validate_stationary(unit), NumericalError);

  ARModelSpec neg_noise;
  neg_noise.coefficients = {0.5};
  neg_noise.noise_std = -1.0;
  CHECK_THROWS_AS(validate_stationary(neg_noise), NumericalError);

  ARModelSpec zero_lead;
  zero_lead.coefficients = {0.5, 0.0};
  CHECK_THROWS_AS(validate_stationary(zero_lead), NumericalError);

  ARModelSpec ok;
  ok.coefficients = {1.5, -0.56};
  CHECK_NOTHROW(validate_stationary(ok));
}

TEST_CASE("partial autocorrelations map to AR coefficients") {
  auto p1 = partials_to_ar({0.6});
  CHECK(p1.size() == 1);
  CHECK(p1[0] == doctest::Approx(0.6));

  // order 2: phi = [k1 (1 - k2), k2]
  auto p2 = partials_to_ar({0.5, 0.3});
  CHECK(p2[0] == doctest::Approx(0.5 * 0.7).epsilon(1e-14));
  CHECK(p2[1] == doctest::Approx(0.3).epsilon(1e-14));

  CHECK_THROWS_AS(partials_to_ar({1.0}), UsageError);
  CHECK_THROWS_AS(partials_to_ar({0.2, -1.2}), UsageError);
}

TEST_CASE("random stationary specs are valid and deterministic") {
  for (int p : {1, 3, 8}) {
    ARModelSpec spec = random_stationary_ar(p, 1234);
    CHECK(spec.order() == p);
    CHECK_NOTHROW(validate_stationary(spec));
    CHECK(companion_spectral_radius(spec.coefficients) < 1.0);
    ARModelSpec again = random_stationary_ar(p, 1234);
    CHECK(spec.coefficients == again.coefficients);
  }
}

TEST_CASE("simulation is deterministic with the requested length") {
  ARModelSpec spec;
  spec.coefficients = {0.9};
  TimeSeries a = simulate_ar(spec, 500, 77);
  TimeSeries b = simulate_ar(spec, 500, 77);
  CHECK(a.size() == 500);
  CHECK(a.values() == b.values());
  TimeSeries c = simulate_ar(spec, 500, 78);
  CHECK(a.values() != c.values());
}

TEST_CASE("AR(1) simulation matches theoretical moments") {
  ARModelSpec spec;
  spec.coefficients = {0.9};
  const std::size_t n = 40000;
  TimeSeries s = simulate_ar(spec, n, 5);
  const auto& y = s.values();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0, cov = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    var += (y[i] - mean) * (y[i] - mean);
    cov += (y[i] - mean) * (y[i + 1] - mean);
  }
  const double rho1 = cov / var;
  CHECK(std::abs(rho1 - 0.9) < 0.02);
  // stationary variance 1 / (1 - 0.81)
  var /= static_cast<double>(n - 1);
  CHECK(var == doctest::Approx(1.0 / 0.19).epsilon(0.15));
}

TEST_CASE("outlier injection perturbs exactly the requested count") {
  ARModelSpec spec;
  spec.coefficients = {0.5};
  TimeSeries clean = simulate_ar(spec, 300, 9);

  OutlierSpec none;
  none.count = 0;
  TimeSeries same = inject_outliers(clean, none, 1);
  CHECK(same.values() == clean.values());

  OutlierSpec three;
  three.count = 3;
  TimeSeries dirty = inject_outliers(clean, three, 1);
  TimeSeries dirty2 = inject_outliers(clean, three, 1);
  CHECK(dirty.values() == dirty2.values());
  int changed = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    changed += clean.values()[i] != dirty.values()[i];
  }
  CHECK(changed == 3);

  OutlierSpec too_many;
  too_many.count = 301;
  CHECK_THROWS_AS(inject_outliers(clean, too_many, 1), DataError);

  // dense request exercises the shuffle path
  OutlierSpec most;
  most.count = 250;
  TimeSeries heavy = inject_outliers(clean, most, 2);
  changed = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    changed += clean.values()[i] != heavy.values()[i];
  }
  CHECK(changed == 250);
}

TEST_CASE("log-diff transform") {
  TimeSeries s({1.0, std::exp(1.0), std::exp(3.0)});
  TimeSeries t = log_diff_transform(s);
  REQUIRE(t.size() == 2);
  CHECK(t.values()[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.values()[1] == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(log_diff_transform(TimeSeries({1.0})), DataError);
  CHECK_THROWS_AS(log_diff_transform(TimeSeries({1.0, -2.0, 3.0})), DataError);
  CHECK_THROWS_AS(log_diff_transform(TimeSeries({1.0, 0.0, 3.0})), DataError);
}

TEST_CASE("csv round trip by column name and index") {
  TempFile f("series_roundtrip_tmp.csv");
  TimeSeries s({1.5, -2.25, 3.0625});
  save_series_csv(s, f.path);
  TimeSeries by_name = load_csv(f.path, "value");
  CHECK(by_name.values() == s.values());
  TimeSeries by_index = load_csv(f.path, "0");
  CHECK(by_index.values() == s.values());
  CHECK_THROWS_AS(load_csv(f.path, "nope"), DataError);
  CHECK_THROWS_AS(load_csv("missing_file.csv", "value"), DataError);
}

TEST_CASE("csv loader rejects malformed numbers and picks the right column") {
  TempFile f("series_malformed_tmp.csv");
  {
    std::ofstream out(f.path);
    out << "date,price\n2020-01,10.5\n2020-02,11.25\n";
  }
  TimeSeries good = load_csv(f.path, "price");
  CHECK(good.values() == std::vector<double>{10.5, 11.25});
  // the date column is not numeric
  CHECK_THROWS_AS(load_csv(f.path, "date"), DataError);

  TempFile g("series_bad_tmp.csv");
  {
    std::ofstream out(g.path);
    out << "value\n1.0\nnot_a_number\n";
  }
  CHECK_THROWS_AS(load_csv(g.path, "value"), DataError);
}

TEST_CASE("binary round trip is exact and truncation is detected") {
  TempFile f("series_roundtrip_tmp.bin");
  TimeSeries s({0.1, -1e300, 5e-324, 12345.678});
  save_series_bin(s, f.path);
  TimeSeries back = load_series_bin(f.path);
  CHECK(back.values() == s.values());

  // chop the payload short
  {
    std::ofstream out(f.path, std::ios::binary | std::ios::trunc);
    const std::uint64_t count = 4;
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    const double one = 1.0;
    out.write(reinterpret_cast<const char*>(&one), sizeof(one));
  }
  CHECK_THROWS_AS(load_series_bin(f.path), DataError);
}
