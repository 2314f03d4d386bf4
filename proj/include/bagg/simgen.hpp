#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "bagg/dataset.hpp"

namespace bagg {

enum class SimModel {
  kSparse,      // y = -0.5 x1 + x2 + 0.4 x3 - x4 + 0.6 x5 + N(0, 0.5^2)
  kNonSparse1,  // beta_j = 3 (-1)^j / j^2, noise sd 0.1
  kNonSparse2,  // beta_j = 5 / floor(M/2) for j <= floor(M/2), noise sd 0.1
  kNonlinear,   // y = x1 + x2 + 3 x3^2 - 2 exp(-x4) + N(0, 0.5) (variance 0.5)
};

SimModel parse_model(const std::string& name);
std::string model_name(SimModel model);
double default_noise_sd(SimModel model);

struct SimSpec {
  SimModel model = SimModel::kSparse;
  int dim = 5;  // M for the linear models, d for the nonlinear one
  int n_train = 100;
  int n_test = 1000;
  std::optional<double> noise_sd;  // overrides the model's default
  bool disable_noise = false;      // test hook: noise-free responses
  std::uint64_t seed = 0;

  double noise() const;
  void validate() const;
};

using TruthFunction = std::function<double(const Eigen::Ref<const Vector>&)>;

struct SimData {
  Dataset train;
  Dataset test;
  Vector coefficients;  // empty for the nonlinear model
  TruthFunction truth;  // noise-free regression function
};

Vector sparse_coefficients(int dim);
Vector ns1_coefficients(int dim);
Vector ns2_coefficients(int dim);
double nonlinear_truth(const Eigen::Ref<const Vector>& x);

SimData gen_sparse_linear(const SimSpec& spec);
SimData gen_nonsparse(const SimSpec& spec);
SimData gen_nonlinear(const SimSpec& spec);
// Dispatches on spec.model.
SimData generate(const SimSpec& spec);

}  // namespace bagg
