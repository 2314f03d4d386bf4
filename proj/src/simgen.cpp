#include "bagg/simgen.hpp"

#include <cmath>
#include <stdexcept>

#include "bagg/random.hpp"

namespace bagg {

SimModel parse_model(const std::string& name) {
  if (name == "s") return SimModel::kSparse;
  if (name == "ns1") return SimModel::kNonSparse1;
  if (name == "ns2") return SimModel::kNonSparse2;
  if (name == "nonlin") return SimModel::kNonlinear;
  throw std::invalid_argument("unknown model '" + name + "' (expected s, ns1, ns2 or nonlin)");
}

std::string model_name(SimModel model) {
  switch (model) {
    case SimModel::kSparse: return "s";
    case SimModel::kNonSparse1: return "ns1";
    case SimModel::kNonSparse2: return "ns2";
    case SimModel::kNonlinear: return "nonlin";
  }
  return "?";
}

double default_noise_sd(SimModel model) {
  switch (model) {
    case SimModel::kSparse: return 0.5;
    case SimModel::kNonSparse1:
    case SimModel::kNonSparse2: return 0.1;
    case SimModel::kNonlinear: return std::sqrt(0.5);
  }
  return 1.0;
}

double SimSpec::noise() const {
  if (disable_noise) return 0.0;
  return noise_sd.value_or(default_noise_sd(model));
}

void SimSpec::validate() const {
  if (dim < 1 || n_train < 1 || n_test < 1) throw std::invalid_argument("simulation sizes must be positive");
  if (noise_sd && !(*noise_sd > 0.0)) throw std::invalid_argument("noise_sd must be positive");
}

Vector sparse_coefficients(int dim) {
  if (dim < 5) throw std::invalid_argument("the sparse model needs M >= 5");
  Vector b = Vector::Zero(dim);
  b.head(5) << -0.5, 1.0, 0.4, -1.0, 0.6;
  return b;
}

Vector ns1_coefficients(int dim) {
  if (dim < 2) throw std::invalid_argument("the non-sparse models need M >= 2");
  Vector b(dim);
  for (int j = 1; j <= dim; ++j) {
    b(j - 1) = 3.0 * (j % 2 == 0 ? 1.0 : -1.0) / (static_cast<double>(j) * j);
  }
  return b;
}

Vector ns2_coefficients(int dim) {
  if (dim < 2) throw std::invalid_argument("the non-sparse models need M >= 2");
  const int half = dim / 2;
  Vector b = Vector::Zero(dim);
  b.head(half).setConstant(5.0 / half);
  return b;
}

double nonlinear_truth(const Eigen::Ref<const Vector>& x) {
  return x(0) + x(1) + 3.0 * x(2) * x(2) - 2.0 * std::exp(-x(3));
}

namespace {

Dataset draw_design(int rows, int dim, double noise, const TruthFunction& truth, Rng& rng) {
  Dataset d;
  d.x.resize(rows, dim);
  d.y.resize(rows);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < dim; ++j) d.x(i, j) = std_normal(rng);
  }
  for (int i = 0; i < rows; ++i) {
    const Vector row = d.x.row(i).transpose();
    d.y(i) = truth(row) + (noise > 0.0 ? noise * std_normal(rng) : 0.0);
  }
  return d;
}

SimData linear_data(const SimSpec& spec, Vector coef) {
  spec.validate();
  SimData out;
  out.coefficients = std::move(coef);
  out.truth = [b = out.coefficients](const Eigen::Ref<const Vector>& x) { return x.dot(b); };
  Rng train_rng = make_rng(spec.seed, 1);
  Rng test_rng = make_rng(spec.seed, 2);
  out.train = draw_design(spec.n_train, spec.dim, spec.noise(), out.truth, train_rng);
  out.test = draw_design(spec.n_test, spec.dim, spec.noise(), out.truth, test_rng);
  return out;
}

}  // namespace

SimData gen_sparse_linear(const SimSpec& spec) {
  return linear_data(spec, sparse_coefficients(spec.dim));
}

SimData gen_nonsparse(const SimSpec& spec) {
  if (spec.model == SimModel::kNonSparse2) return linear_data(spec, ns2_coefficients(spec.dim));
  return linear_data(spec, ns1_coefficients(spec.dim));
}

SimData gen_nonlinear(const SimSpec& spec) {
  spec.validate();
  if (spec.dim < 4) throw std::invalid_argument("the nonlinear model needs d >= 4");
  SimData out;
  out.truth = nonlinear_truth;
  Rng train_rng = make_rng(spec.seed, 1);
  Rng test_rng = make_rng(spec.seed, 2);
  out.train = draw_design(spec.n_train, spec.dim, spec.noise(), out.truth, train_rng);
  out.test = draw_design(spec.n_test, spec.dim, spec.noise(), out.truth, test_rng);
  return out;
}

SimData generate(const SimSpec& spec) {
  switch (spec.model) {
    case SimModel::kSparse: return gen_sparse_linear(spec);
    case SimModel::kNonSparse1:
    case SimModel::kNonSparse2: return gen_nonsparse(spec);
    case SimModel::kNonlinear: return gen_nonlinear(spec);
  }
  throw std::invalid_argument("unknown model");
}

}  // namespace bagg
