#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

#include "horizon/batch.hpp"
#include "horizon/error.hpp"

using namespace horizon;

namespace {

CalibrationEstimate make_estimate(double dx, double dy, double u, double v) {
  CalibrationEstimate e;
  e.d_x = dx;
  e.d_y = dy;
  e.K11 << dx, 0, 0, dy;
  e.J = {u, v};
  e.K12 = e.J;
  return e;
}

std::vector<CalibrationEstimate> noisy_pool(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nf(0, 5.0), np(0, 3.0);
  std::vector<CalibrationEstimate> pool;
  for (int i = 0; i < n; ++i)
    pool.push_back(make_estimate(1000 + nf(rng), 1000 + nf(rng), 560 + np(rng), 500 + np(rng)));
  return pool;
}

}  // namespace

TEST_SUITE("batch") {

TEST_CASE("batch_focal") {
  const auto one = make_estimate(1002, 998, 0, 0);
  const std::vector<CalibrationEstimate> single{one};
  CHECK(batch_focal(single, 0.012, 0.012) == focal_from_k(one, 0.012, 0.012));

  const std::vector<CalibrationEstimate> same(3, make_estimate(1000, 1000, 0, 0));
  CHECK(batch_focal(same, 0.012, 0.012) == doctest::Approx(12.0).epsilon(1e-15));

  const std::vector<CalibrationEstimate> copies(17, one);
  CHECK(batch_focal(copies, 0.0119, 0.0121) == doctest::Approx(focal_from_k(one, 0.0119, 0.0121)).epsilon(1e-15));

  BatchInput input;
  input.estimates = {make_estimate(1000, 1010, 0, 0), make_estimate(990, 1000, 0, 0)};
  input.mu_x_mm = input.mu_y_mm = 0.01;
  CHECK(batch_focal(input) == doctest::Approx(10.0).epsilon(1e-15));

  try {
    batch_focal(std::vector<CalibrationEstimate>{}, 0.01, 0.01);
    FAIL("expected EmptyBatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyBatch);
  }
}

TEST_CASE("batch_principal") {
  const std::vector<CalibrationEstimate> single{make_estimate(1, 1, 3.5, -2.25)};
  CHECK(batch_principal(single) == Eigen::Vector2d(3.5, -2.25));

  const std::vector<CalibrationEstimate> nominal(5, make_estimate(1, 1, 560, 500));
  CHECK(batch_principal(nominal) == Eigen::Vector2d(560, 500));

  const std::vector<CalibrationEstimate> two{make_estimate(1, 1, 0, 0), make_estimate(1, 1, 2, 4)};
  CHECK(batch_principal(two) == Eigen::Vector2d(1, 2));

  CHECK_THROWS_AS(batch_principal(std::vector<CalibrationEstimate>{}), Error);
}

TEST_CASE("summarize") {
  const std::vector<double> s{1, 2, 3};
  const auto a = summarize(s, 2.0);
  CHECK(a.mean == 2);
  CHECK(a.median == 2);
  CHECK(a.sigma == doctest::Approx(1.0));
  CHECK(a.mad == 1);
  CHECK(a.mean_error == 0);
  CHECK(a.median_error == 0);

  const std::vector<double> outlier{0, 0, 0, 100};
  const auto b = summarize(outlier, 0.0);
  CHECK(b.median == 0);
  CHECK(b.mad == 0);

  // Signed errors at full precision against a reference.
  const std::vector<double> report{2002.5, 2002.9};
  const auto c = summarize(report, 2002.7);
  CHECK(c.mean_error == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.median == doctest::Approx(2002.7));

  const std::vector<double> single{4.0};
  const auto d = summarize(single);
  CHECK(d.sigma == 0.0);
  CHECK(d.mad == 0.0);

  CHECK_THROWS_AS(summarize(std::vector<double>{}), Error);
}

TEST_CASE("summarize is permutation invariant and bounded") {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(1 + trial * 3);
    for (auto& v : x) v = n(rng) * 10 + 3;
    const auto a = summarize(x, 1.0);
    std::shuffle(x.begin(), x.end(), rng);
    const auto b = summarize(x, 1.0);
    CHECK(a.mean == b.mean);
    CHECK(a.sigma == b.sigma);
    CHECK(a.median == b.median);
    CHECK(a.mad == b.mad);
    CHECK(a.mad >= 0);
    CHECK(a.median >= *std::min_element(x.begin(), x.end()));
    CHECK(a.median <= *std::max_element(x.begin(), x.end()));
  }
}

TEST_CASE("linear_fit") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("sweep subsets are valid and deterministic") {
  const auto a = sweep_subsets(50, 5, 200, 7);
  const auto b = sweep_subsets(50, 5, 200, 7);
  CHECK(a == b);
  CHECK(a != sweep_subsets(50, 5, 200, 8));
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].size() == 5);
    CHECK(std::set<int>(a[i].begin(), a[i].end()).size() == 5);
    CHECK(a[i].front() >= 0);
    CHECK(a[i].back() < 50);
    if (i > 0) CHECK(a[i] != a[i - 1]);
  }
  // C(3, 2) = 3: consecutive repeats are redrawn even with few subsets.
  const auto small = sweep_subsets(3, 2, 100, 1);
  for (std::size_t i = 1; i < small.size(); ++i) CHECK(small[i] != small[i - 1]);
  // C(n, n) = 1: every draw is the whole pool.
  for (const auto& s : sweep_subsets(6, 6, 10, 3)) CHECK(s == std::vector<int>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("combination_sweep") {
  const auto pool = noisy_pool(50, 5);
  const auto full = combination_sweep(pool, 50, 20, 1, 0.012, 0.012);
  CHECK(full.f_mm.sigma == 0.0);
  CHECK(full.u0_px.sigma == 0.0);
  CHECK(full.f_mm.mean == doctest::Approx(batch_focal(pool, 0.012, 0.012)).epsilon(1e-14));

  const auto q5 = combination_sweep(pool, 5, 2000, 11, 0.012, 0.012);
  CHECK(q5.f_mm.count == 2000);
  CHECK(q5.u0_px.count == 2000);

  // Thread count does not change the output.
  const auto t1 = combination_sweep(pool, 7, 500, 3, 0.012, 0.012, 1);
  const auto t4 = combination_sweep(pool, 7, 500, 3, 0.012, 0.012, 4);
  CHECK(t1.f_mm.sigma == t4.f_mm.sigma);
  CHECK(t1.v0_px.mad == t4.v0_px.mad);

  const std::vector<int> qs{1, 5, 9};
  const auto rows = combination_sweep(pool, qs, 300, 2, 0.012, 0.012);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].f_mm.sigma > rows[2].f_mm.sigma);

  try {
    combination_sweep(pool, 51, 10, 1, 0.012, 0.012);
    FAIL("expected InvalidSweep");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidSweep);
  }
  CHECK_THROWS_AS(combination_sweep(pool, 0, 10, 1, 0.012, 0.012), Error);
  CHECK_THROWS_AS(combination_sweep(pool, 3, 0, 1, 0.012, 0.012), Error);
}

TEST_CASE("batch spread shrinks like 1/sqrt(N) for independent images") {
  // Fresh i.i.d. images per batch (no finite pool): log sigma vs log N has
  // slope -1/2 for both targets, and sigma_f sqrt(2N) is flat relative to the
  // spread of a single stacked entry.
  const double mu = 0.012, sd = 5.0;
  std::mt19937_64 rng(73);
  std::normal_distribution<double> nf(0, sd), np(0, 3.0);
  std::vector<double> logn, logf, logu, flat;
  for (int N : {1, 2, 4, 8, 16, 32, 64}) {
    std::vector<double> f, u;
    for (int rep = 0; rep < 4000; ++rep) {
      std::vector<CalibrationEstimate> batch;
      for (int i = 0; i < N; ++i)
        batch.push_back(make_estimate(1000 + nf(rng), 1000 + nf(rng), 560 + np(rng), 500 + np(rng)));
      f.push_back(batch_focal(batch, mu, mu));
      u.push_back(batch_principal(batch).x());
    }
    const double sf = summarize(f).sigma, su = summarize(u).sigma;
    logn.push_back(std::log(N));
    logf.push_back(std::log(sf));
    logu.push_back(std::log(su));
    flat.push_back(sf * std::sqrt(2.0 * N) / (mu * sd));
  }
  const double slope_f = linear_fit(logn, logf).slope;
  const double slope_u = linear_fit(logn, logu).slope;
  CHECK(slope_f > -0.57);
  CHECK(slope_f < -0.43);
  CHECK(slope_u > -0.57);
  CHECK(slope_u < -0.43);
  for (double v : flat) CHECK(std::abs(v - 1.0) < 0.15);
}

}
