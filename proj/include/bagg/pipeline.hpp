#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bagg/dataset.hpp"
#include "bagg/dirichlet.hpp"
#include "bagg/mcmc.hpp"
#include "bagg/sampler_ca.hpp"
#include "bagg/sampler_la.hpp"

namespace bagg {

// A fitted base learner. Predictors are immutable and safe to share across
// threads.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual double predict(const Eigen::Ref<const Vector>& x) const = 0;
  virtual Vector predict_rows(const Matrix& x) const;
};

class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string id() const = 0;
  // Deterministic given `seed`.
  virtual std::shared_ptr<const Predictor> fit(const Dataset& data, std::uint64_t seed) const = 0;
};

using LearnerList = std::vector<std::shared_ptr<const Learner>>;

// Ridge regression with intercept; the penalty is picked from a fixed grid by
// 5-fold cross-validation on the data it is fitted to.
class RidgeCvLearner final : public Learner {
 public:
  std::string id() const override { return "ridge_cv"; }
  std::shared_ptr<const Predictor> fit(const Dataset& data, std::uint64_t seed) const override;
};

// k nearest neighbours in standardized feature space, Euclidean distance,
// ties broken by training row order.
class KnnLearner final : public Learner {
 public:
  explicit KnnLearner(int k);
  std::string id() const override { return "knn_" + std::to_string(k_); }
  std::shared_ptr<const Predictor> fit(const Dataset& data, std::uint64_t seed) const override;

 private:
  int k_;
};

// Least squares on an intercept plus x_j, x_j^2, x_j^3 for every j in a fixed
// feature subset.
class AdditiveCubicLearner final : public Learner {
 public:
  AdditiveCubicLearner(std::string id, std::vector<int> features);
  std::string id() const override { return id_; }
  const std::vector<int>& features() const { return features_; }
  std::shared_ptr<const Predictor> fit(const Dataset& data, std::uint64_t seed) const override;

 private:
  std::string id_;
  std::vector<int> features_;
};

// Fixed function of x, ignores the data. Handy in tests.
class FunctionLearner final : public Learner {
 public:
  FunctionLearner(std::string id, std::function<double(const Eigen::Ref<const Vector>&)> fn);
  std::string id() const override { return id_; }
  std::shared_ptr<const Predictor> fit(const Dataset& data, std::uint64_t seed) const override;

 private:
  std::string id_;
  std::function<double(const Eigen::Ref<const Vector>&)> fn_;
};

// ridge_cv, knn_5, knn_15 and `n_subsets` additive cubic learners, each on a
// random feature subset of size floor(min(sqrt(n), d/3)) (at least 1).
LearnerList default_learners(int features, Eigen::Index n, int n_subsets, std::uint64_t seed);

struct Split {
  Dataset train;
  Dataset aggregate;
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> aggregate_rows;
};

// Random partition: ceil(frac * n) rows for training, the rest for aggregation.
Split split_data(const Dataset& data, double frac, std::uint64_t seed);

// F(i, j) = predictors[j] at row i of x. Errors name the learner and row of a
// non-finite prediction. Columns are filled in parallel.
Matrix build_prediction_matrix(const std::vector<std::shared_ptr<const Predictor>>& predictors,
                               const std::vector<std::string>& ids, const Matrix& x);

namespace reference {
Matrix build_prediction_matrix_serial(const std::vector<std::shared_ptr<const Predictor>>& predictors,
                                      const std::vector<std::string>& ids, const Matrix& x);
}  // namespace reference

enum class AggregationMode { kConvex, kLinear };

AggregationMode parse_mode(const std::string& name);
std::string mode_name(AggregationMode mode);

struct AggregateConfig {
  AggregationMode mode = AggregationMode::kConvex;
  double split_frac = 0.75;
  double alpha = 1.0;
  double gamma = 2.0;
  int n_iter = 2000;
  int burn_in = 1000;
  double level = 0.95;  // credible level of the reported intervals
  std::uint64_t seed = 0;
};

// Point-estimate coefficients on the learners plus the refit learners.
// CA: posterior mean of lambda. LA: per-coordinate posterior median of theta.
struct AggregatedModel {
  AggregationMode mode;
  std::vector<std::string> learner_ids;
  Vector coefficients;
  std::vector<std::shared_ptr<const Predictor>> predictors;  // empty for matrix-only runs
  PosteriorSamples samples;
  std::vector<CoordinateSummary> summaries;
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> aggregate_rows;

  // sum_j coefficients_j * predictors_j(x).
  Vector predict(const Matrix& x) const;
  // Same combination applied to precomputed learner predictions.
  Vector combine(const Matrix& f) const;
  std::optional<SimplexWeights> simplex_weights() const;
};

// Stage-one fits on the training part, the prediction matrix on the
// aggregation part, and refits on all rows.
struct FittedLearners {
  Split split;
  std::vector<std::string> ids;
  Matrix f_aggregate;
  std::vector<std::shared_ptr<const Predictor>> refit;
};

// Learners are fitted in parallel; learner j uses derive_seed(seed, 100 + j)
// for both fits and the split uses derive_seed(seed, 1).
FittedLearners fit_learners(const Dataset& data, const LearnerList& learners, double split_frac,
                            std::uint64_t seed);

// split -> fit on train -> F on aggregation rows -> chain -> refit on all rows.
AggregatedModel aggregate(const Dataset& data, const LearnerList& learners, const AggregateConfig& config);

// Chain only, on an externally produced prediction matrix.
AggregatedModel aggregate_matrix(const Matrix& f, const Vector& y, const std::vector<std::string>& ids,
                                 const AggregateConfig& config);

// Independent sub-seed for component `stream` of a run keyed by `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace bagg
