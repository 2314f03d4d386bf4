#include <cmath>

#include "bagg/simgen.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bagg;

namespace {

SimSpec spec_for(SimModel model, int dim, int n_train, std::uint64_t seed = 1) {
  SimSpec s;
  s.model = model;
  s.dim = dim;
  s.n_train = n_train;
  s.n_test = 10;
  s.seed = seed;
  return s;
}

double sample_variance(const Vector& v) {
  const double m = v.mean();
  return (v.array() - m).square().sum() / (static_cast<double>(v.size()) - 1.0);
}

}  // namespace

TEST_CASE("sparse model") {
  auto spec = spec_for(SimModel::kSparse, 5, 10);
  spec.disable_noise = true;
  const auto d = gen_sparse_linear(spec);
  Vector e1 = Vector::Zero(5);
  e1(0) = 1.0;
  CHECK(d.truth(e1) == -0.5);
  CHECK(d.train.y.isApprox(d.train.x * d.coefficients));

  for (int m : {5, 37, 100}) {
    const Vector b = sparse_coefficients(m);
    CHECK((b.array() != 0.0).count() == 5);
  }
  Vector expected(5);
  expected << -0.5, 1.0, 0.4, -1.0, 0.6;
  CHECK(sparse_coefficients(5) == expected);
  CHECK_THROWS_AS(sparse_coefficients(4), std::invalid_argument);

  // Population variance: sum beta^2 + 0.5^2 = 3.02.
  const auto big = gen_sparse_linear(spec_for(SimModel::kSparse, 5, 10000, 3));
  CHECK(std::abs(sample_variance(big.train.y) - 3.02) < 0.2);
}

TEST_CASE("non-sparse models") {
  const Vector b = ns1_coefficients(4);
  CHECK(b(0) == -3.0);
  CHECK(b(1) == 0.75);
  CHECK(b(2) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  const double l1 = ns1_coefficients(500).cwiseAbs().sum();
  CHECK(l1 >= 4.8);
  CHECK(l1 <= 4.935);
  // sum 3 / j^2 converges to 3 pi^2 / 6 from below.
  CHECK(l1 < M_PI * M_PI / 2.0);

  const Vector b2 = ns2_coefficients(100);
  CHECK((b2.array() == 0.1).count() == 50);
  CHECK((b2.array() == 0.0).count() == 50);
  CHECK((ns2_coefficients(7).array() != 0.0).count() == 3);

  auto spec = spec_for(SimModel::kNonSparse2, 100, 50);
  const auto d = generate(spec);
  CHECK(d.coefficients == b2);
  CHECK(spec.noise() == 0.1);
}

TEST_CASE("nonlinear model") {
  CHECK(nonlinear_truth(Vector::Zero(20)) == -2.0);
  Vector x = Vector::Zero(20);
  const double base = nonlinear_truth(x);
  x(10) = 5.0;
  x(19) = -3.0;
  CHECK(nonlinear_truth(x) == base);
  CHECK_THROWS_AS(gen_nonlinear(spec_for(SimModel::kNonlinear, 3, 10)), std::invalid_argument);

  // E y = 3 - 2 e^(1/2); the noise has variance 0.5.
  const auto big = gen_nonlinear(spec_for(SimModel::kNonlinear, 4, 100000, 5));
  CHECK(std::abs(big.train.y.mean() - (3.0 - 2.0 * std::exp(0.5))) < 0.05);
  Vector resid(big.train.rows());
  for (Eigen::Index i = 0; i < resid.size(); ++i) resid(i) = big.train.y(i) - big.truth(big.train.x.row(i).transpose());
  CHECK(std::abs(sample_variance(resid) - 0.5) < 0.01);
  CHECK(big.coefficients.size() == 0);
}

TEST_CASE("generation is deterministic with distinct train and test streams") {
  auto spec = spec_for(SimModel::kNonSparse1, 10, 30, 9);
  spec.n_test = 30;
  const auto a = generate(spec);
  const auto b = generate(spec);
  CHECK(a.train.x == b.train.x);
  CHECK(a.train.y == b.train.y);
  CHECK(a.test.y == b.test.y);
  CHECK_FALSE(a.train.x == a.test.x);
  spec.seed = 10;
  CHECK_FALSE(generate(spec).train.x == a.train.x);
}

TEST_CASE("simulation settings validation and names") {
  for (const char* name : {"s", "ns1", "ns2", "nonlin"}) CHECK(model_name(parse_model(name)) == name);
  CHECK_THROWS_AS(parse_model("sparse"), std::invalid_argument);
  auto spec = spec_for(SimModel::kSparse, 10, 0);
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  spec = spec_for(SimModel::kSparse, 10, 10);
  spec.noise_sd = -1.0;
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  spec.noise_sd = 2.0;
  CHECK(spec.noise() == 2.0);
  spec.disable_noise = true;
  CHECK(spec.noise() == 0.0);
  CHECK(default_noise_sd(SimModel::kNonlinear) == doctest::Approx(std::sqrt(0.5)));
}
