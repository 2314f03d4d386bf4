#include <cmath>

#include "bagg/sampler_ca.hpp"
#include "detail/augmentation.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bagg;

namespace {

struct Problem {
  Vector y;
  Matrix f;
};

// Two correlated predictors with a moderately informative response.
Problem two_learner_problem(std::uint64_t seed, int n = 30) {
  Rng rng = make_rng(seed);
  Problem p{Vector(n), Matrix(n, 2)};
  for (int i = 0; i < n; ++i) {
    const double x = std_normal(rng);
    p.f(i, 0) = x;
    p.f(i, 1) = x + 0.8 * std_normal(rng);
    p.y(i) = 0.6 * p.f(i, 0) + 0.4 * p.f(i, 1) + std_normal(rng);
  }
  return p;
}

Problem random_problem(std::uint64_t seed, int n, int m) {
  Rng rng = make_rng(seed);
  Problem p{Vector(n), Matrix(n, m)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) p.f(i, j) = std_normal(rng);
    p.y(i) = p.f(i, 0) + 0.3 * std_normal(rng);
  }
  return p;
}

// Posterior of lambda_1 with M = 2 and phi integrated out:
// p(u | y) propto u^(rho-1) (1-u)^(rho-1) (b0 + rss(u)/2)^-(a0 + n/2).
struct GridPosterior {
  double mean;
  double below_half;
};

GridPosterior m2_posterior(const Problem& p, double rho, double a0, double b0) {
  const double shape = a0 + 0.5 * static_cast<double>(p.y.size());
  auto log_g = [&](double u) {
    const Vector r = p.y - u * p.f.col(0) - (1.0 - u) * p.f.col(1);
    return -shape * std::log(b0 + 0.5 * r.squaredNorm());
  };
  const double offset = log_g(0.5);
  auto g = [&](double u) { return std::exp(log_g(u) - offset); };
  const double z = oracle::beta_weighted_integral(rho, g);
  const double m = oracle::beta_weighted_integral(rho, [&](double u) { return u * g(u); });
  const double b = oracle::beta_weighted_integral(rho, [&](double u) { return u < 0.5 ? g(u) : 0.0; });
  return {m / z, b / z};
}

}  // namespace

TEST_CASE("phi full conditional") {
  const auto g = phi_conditional(0.0, 100, 0.01, 0.01);
  CHECK(g.shape == doctest::Approx(50.01));
  CHECK(g.rate == doctest::Approx(0.01));
  const auto h = phi_conditional(8.0, 10, 1.0, 2.0);
  CHECK(h.shape == doctest::Approx(6.0));
  CHECK(h.rate == doctest::Approx(6.0));

  const auto p = random_problem(3, 40, 3);
  const auto hyper = CaHyper::defaults(3);
  CaChainState st{{0.1, -0.3, 0.5}, 1.0};
  const double rss = residual_ss(p.y, p.f, st.lambda());
  const auto cond = phi_conditional(rss, 40, hyper.a0, hyper.b0);
  Rng rng = make_rng(8);
  std::vector<double> draws;
  for (int i = 0; i < 20000; ++i) draws.push_back(gibbs_update_phi(st, p.y, p.f, hyper, rng));
  const auto m = oracle::iid_mean(draws);
  CHECK(std::abs(m.mean - cond.shape / cond.rate) < 4.0 * m.se);
  double var = 0.0;
  for (double d : draws) var += (d - m.mean) * (d - m.mean);
  var /= draws.size() - 1.0;
  CHECK(var == doctest::Approx(cond.shape / (cond.rate * cond.rate)).epsilon(0.05));
}

TEST_CASE("log acceptance ratio equals the posterior difference") {
  const auto p = random_problem(5, 25, 4);
  for (double gamma : {0.0, 1.0, 2.0}) {
    CaHyper hyper = CaHyper::defaults(4);
    hyper.dirichlet = DirichletHyper(1.0, gamma, 4);
    Rng rng = make_rng(9);
    for (int k = 0; k < 20; ++k) {
      CaChainState st{{std_normal(rng), std_normal(rng), -3.0 + std_normal(rng), std_normal(rng)}, 0.5 + uniform01(rng)};
      std::vector<double> prop = st.log_T;
      for (double& u : prop) u += 0.7 * std_normal(rng);
      const double rho = hyper.dirichlet.rho();
      const double expected = oracle::ca_log_posterior_logT(prop, st.phi, rho, p.y, p.f) -
                              oracle::ca_log_posterior_logT(st.log_T, st.phi, rho, p.y, p.f);
      CAPTURE(gamma);
      CHECK(log_ratio_T(st, prop, p.y, p.f, hyper) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("the coordinate sweep obeys the same target") {
  const auto p = random_problem(6, 25, 4);
  const auto hyper = CaHyper::defaults(4);
  // With a zero step the proposal equals the state: every move is accepted and nothing changes.
  CaChainState st{{0.2, -0.4, 1.0, -2.0}, 1.3};
  const auto before = st.log_T;
  Rng rng = make_rng(10);
  const std::vector<double> zero(4, 0.0);
  const auto flags = mh_update_T_coordinate(st, p.y, p.f, hyper, zero, rng);
  CHECK(flags == std::vector<bool>(4, true));
  CHECK(st.log_T == before);
  // Prior-only: the sweep leaves Gamma(rho, 1) invariant for each log T_j.
  const int n = 3000;
  std::vector<double> log_t{0.0, 0.0, 0.0};
  std::vector<double> t0;
  const std::vector<double> steps(3, 2.0);
  for (int it = 0; it < n * 10; ++it) {
    detail::coordinate_log_T_sweep(log_t, {}, 1.0, 1.0, 1.0, p.y, p.f.leftCols(3), false, steps, rng);
    if (it % 10 == 9) t0.push_back(std::exp(log_t[0]));
  }
  const double d = oracle::ks_statistic(t0, [](double x) { return 1.0 - std::exp(-x); });
  CHECK(d < oracle::ks_critical_01(t0.size()));
}

TEST_CASE("coordinate sweep survives extreme scales") {
  const auto p = random_problem(12, 30, 5);
  Rng rng = make_rng(13);
  std::vector<double> log_t{0.0, -400.0, -600.0, 650.0, -1.0};
  const std::vector<double> steps(5, 300.0);
  for (int it = 0; it < 2000; ++it) {
    CHECK_NOTHROW(detail::coordinate_log_T_sweep(log_t, {}, 1.0, 4.0, 1e-4, p.y, p.f, true, steps, rng));
  }
  for (double u : log_t) {
    CHECK(std::isfinite(u));
    CHECK(u <= detail::kMaxLogT);
  }
}

TEST_CASE("joint move limits") {
  const auto p = random_problem(7, 25, 3);
  const auto hyper = CaHyper::defaults(3);
  CaChainState st{{0.5, -0.5, 0.0}, 2.0};
  Rng rng = make_rng(11);
  const auto before = st.log_T;
  const auto step = mh_update_T(st, p.y, p.f, hyper, 0.0, rng);
  CHECK(step.accepted);
  CHECK(step.log_ratio == 0.0);
  CHECK(st.log_T == before);

  int accepted = 0;
  for (int i = 0; i < 1000; ++i) accepted += mh_update_T(st, p.y, p.f, hyper, 1e-7, rng).accepted;
  CHECK(accepted >= 990);

  CaChainState edge{{699.9999, 0.0, 0.0}, 1.0};
  for (int i = 0; i < 200; ++i) {
    mh_update_T(edge, p.y, p.f, hyper, 1.0, rng);
    CHECK(edge.log_T[0] <= detail::kMaxLogT);
  }
}

TEST_CASE("two learners: chain matches quadrature") {
  const auto p = two_learner_problem(21);
  for (TScheme scheme : {TScheme::kJointThenCoordinate, TScheme::kJoint, TScheme::kCoordinate}) {
    for (double rho : {0.5, 2.0}) {
      CaHyper hyper = CaHyper::defaults(2);
      hyper.dirichlet = DirichletHyper(rho * 4.0, 2.0, 2);
      hyper.t_scheme = scheme;
      hyper.n_iter = 42000;
      hyper.burn_in = 2000;
      const auto s = run_chain_ca(p.y, p.f, hyper, 99);
      std::vector<double> u, below;
      for (int i = 0; i < s.size(); ++i) {
        u.push_back(s.draws(i, 0));
        below.push_back(s.draws(i, 0) < 0.5 ? 1.0 : 0.0);
      }
      const auto exact = m2_posterior(p, rho, hyper.a0, hyper.b0);
      const auto m = oracle::batch_mean(u);
      const auto b = oracle::batch_mean(below);
      CAPTURE(static_cast<int>(scheme));
      CAPTURE(rho);
      CAPTURE(exact.mean);
      CAPTURE(m.mean);
      CHECK(std::abs(m.mean - exact.mean) < 4.0 * m.se + 2e-3);
      CHECK(std::abs(b.mean - exact.below_half) < 4.0 * b.se + 2e-3);
    }
  }
}

TEST_CASE("chain bookkeeping and invariants") {
  const auto p = random_problem(4, 60, 6);
  CaHyper hyper = CaHyper::defaults(6);
  hyper.n_iter = 600;
  hyper.burn_in = 200;
  const auto s = run_chain_ca(p.y, p.f, hyper, 5);
  CHECK(s.size() == 400);
  CHECK(s.dim() == 6);
  CHECK(s.phi.size() == 400);
  CHECK(s.seed == 5);
  CHECK(s.block("T").proposed == 400);
  CHECK(s.block("T_coord").proposed == 400 * 6);
  CHECK(s.block("T").steps.size() == 1);
  CHECK(s.block("T_coord").steps.size() == 6);
  for (int i = 0; i < s.size(); ++i) {
    CHECK(std::abs(s.draws.row(i).sum() - 1.0) <= 1e-10);
    CHECK(s.draws.row(i).minCoeff() >= 0.0);
    CHECK(s.phi[static_cast<std::size_t>(i)] > 0.0);
  }

  hyper.t_scheme = TScheme::kJoint;
  const auto j = run_chain_ca(p.y, p.f, hyper, 5);
  CHECK(j.acceptance.size() == 1);
  CHECK_THROWS_AS(j.block("T_coord"), std::out_of_range);
}

TEST_CASE("chains are reproducible from the seed") {
  const auto p = random_problem(4, 50, 5);
  CaHyper hyper = CaHyper::defaults(5);
  hyper.n_iter = 400;
  hyper.burn_in = 100;
  const auto a = run_chain_ca(p.y, p.f, hyper, 42);
  const auto b = run_chain_ca(p.y, p.f, hyper, 42);
  const auto c = run_chain_ca(p.y, p.f, hyper, 43);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("tuning moves the step toward the target rate") {
  const auto p = random_problem(4, 80, 5);
  CaHyper hyper = CaHyper::defaults(5);
  hyper.t_scheme = TScheme::kJoint;
  hyper.beta = 20.0;
  hyper.n_iter = 3000;
  hyper.burn_in = 1500;
  const double tuned = tune_beta(20.0, 0.4, p.y, p.f, hyper, 1);
  CHECK(tuned < 20.0);
  hyper.beta = tuned;
  hyper.adapt = false;
  const auto s = run_chain_ca(p.y, p.f, hyper, 2);
  CHECK(s.block("T").rate() > 0.15);
  CHECK(s.block("T").rate() < 0.75);
}

TEST_CASE("invalid inputs are rejected") {
  const auto p = random_problem(4, 20, 3);
  CaHyper hyper = CaHyper::defaults(3);
  CHECK_THROWS_AS(run_chain_ca(p.y, p.f.leftCols(1), CaHyper::defaults(1), 1), std::invalid_argument);
  CHECK_THROWS_AS(run_chain_ca(p.y, p.f, CaHyper::defaults(4), 1), std::invalid_argument);
  hyper.burn_in = hyper.n_iter;
  CHECK_THROWS_AS(run_chain_ca(p.y, p.f, hyper, 1), std::invalid_argument);
  hyper = CaHyper::defaults(3);
  hyper.a0 = 0.0;
  CHECK_THROWS_AS(run_chain_ca(p.y, p.f, hyper, 1), std::invalid_argument);
  hyper = CaHyper::defaults(3);
  Vector bad = p.y;
  bad(3) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(run_chain_ca(bad, p.f, hyper, 1), std::invalid_argument);
}
