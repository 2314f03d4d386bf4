#include <cmath>
#include <numeric>

#include "bagg/mcmc.hpp"
#include "doctest.h"

using namespace bagg;

TEST_CASE("quantiles interpolate between order statistics") {
  std::vector<double> x(1000);
  std::iota(x.begin(), x.end(), 1.0);
  CHECK(quantile_sorted(x, 0.025) == doctest::Approx(25.975));
  CHECK(quantile_sorted(x, 0.975) == doctest::Approx(975.025));
  CHECK(quantile_sorted(x, 0.5) == doctest::Approx(500.5));
  CHECK(quantile_sorted(x, 0.0) == 1.0);
  CHECK(quantile_sorted(x, 1.0) == 1000.0);
  CHECK_THROWS_AS(quantile_sorted(std::vector<double>{}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(quantile_sorted(x, 1.5), std::invalid_argument);
}

TEST_CASE("posterior summaries") {
  PosteriorSamples s;
  s.draws.resize(1000, 2);
  for (int i = 0; i < 1000; ++i) {
    s.draws(i, 0) = i + 1.0;
    s.draws(i, 1) = 0.3;
  }
  const auto sum = summarize_posterior(s, 0.95);
  REQUIRE(sum.size() == 2);
  CHECK(sum[0].lo == doctest::Approx(25.975));
  CHECK(sum[0].hi == doctest::Approx(975.025));
  CHECK(sum[0].mean == doctest::Approx(500.5));
  // Constant draws collapse the interval onto the value.
  CHECK(sum[1].lo == 0.3);
  CHECK(sum[1].hi == 0.3);
  CHECK(sum[1].median == 0.3);
  CHECK(posterior_medians(s)(0) == doctest::Approx(500.5));

  s.draws.conservativeResize(99, 2);
  CHECK_THROWS_AS(summarize_posterior(s, 0.95), std::invalid_argument);
  CHECK_NOTHROW(posterior_medians(s));
}

TEST_CASE("acceptance block lookup") {
  PosteriorSamples s;
  s.acceptance.push_back({"T", 40, 100});
  CHECK(s.block("T").rate() == doctest::Approx(0.4));
  CHECK_THROWS_AS(s.block("A"), std::out_of_range);
  CHECK(BlockAcceptance{"z", 0, 0}.rate() == 0.0);
}

TEST_CASE("step tuner") {
  SUBCASE("grows after a window of acceptances and shrinks after rejections") {
    StepTuner up(1.0, 0.4, 10);
    for (int i = 0; i < 9; ++i) up.record(true);
    CHECK(up.step() == 1.0);
    up.record(true);
    CHECK(up.step() == doctest::Approx(std::exp(0.6)));

    StepTuner down(1.0, 0.4, 10);
    for (int i = 0; i < 10; ++i) down.record(false);
    CHECK(down.step() == doctest::Approx(std::exp(-0.4)));
  }
  SUBCASE("rate on target leaves the step unchanged") {
    StepTuner t(0.7, 0.5, 4);
    for (bool a : {true, false, true, false}) t.record(a);
    CHECK(t.step() == doctest::Approx(0.7));
  }
  SUBCASE("multi-proposal iterations use the pooled rate") {
    StepTuner t(1.0, 0.4, 2);
    t.record(3, 10);
    t.record(1, 10);
    CHECK(t.step() == doctest::Approx(std::exp(0.2 - 0.4)));
  }
  SUBCASE("frozen tuners stop adapting") {
    StepTuner t(1.0, 0.4, 5);
    t.freeze();
    for (int i = 0; i < 50; ++i) t.record(true);
    CHECK(t.step() == 1.0);
    auto ts = make_tuners(3, 0.5, 0.4, 1, false);
    for (auto& x : ts) x.record(true);
    CHECK(current_steps(ts) == std::vector<double>{0.5, 0.5, 0.5});
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(StepTuner(0.0), std::invalid_argument);
    CHECK_THROWS_AS(StepTuner(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(StepTuner(1.0, 0.4, 0), std::invalid_argument);
  }
}

TEST_CASE("metropolis acceptance") {
  Rng rng = make_rng(1);
  int always = 0, never = 0, some = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    always += mh_accept(0.0, rng);
    never += mh_accept(-std::numeric_limits<double>::infinity(), rng);
    some += mh_accept(std::log(0.3), rng);
  }
  CHECK(always == n);
  CHECK(never == 0);
  CHECK(std::abs(some / static_cast<double>(n) - 0.3) < 4.0 * std::sqrt(0.21 / n));
}

TEST_CASE("regression input checks") {
  Matrix f = Matrix::Ones(5, 2);
  Vector y = Vector::Zero(5);
  CHECK_NOTHROW(check_regression_inputs(y, f));
  CHECK(residual_ss(y, f, Vector::Constant(2, 0.5)) == doctest::Approx(5.0));
  CHECK_THROWS_AS(check_regression_inputs(Vector::Zero(4), f), std::invalid_argument);
  CHECK_THROWS_AS(check_regression_inputs(Vector::Zero(1), Matrix::Ones(1, 2)), std::invalid_argument);
  f(2, 1) = std::nan("");
  CHECK_THROWS_AS(check_regression_inputs(y, f), std::invalid_argument);
}
