#include "bagg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bagg/random.hpp"

namespace bagg {

Vector Predictor::predict_rows(const Matrix& x) const {
  Vector out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict(x.row(i).transpose());
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng rng = make_rng(seed, stream);
  return rng();
}

namespace {

// Column means and standard deviations; zero-variance columns get scale 1.
struct Standardizer {
  Vector mean;
  Vector scale;

  explicit Standardizer(const Matrix& x) : mean(x.colwise().mean().transpose()), scale(x.cols()) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double ss = (x.col(j).array() - mean(j)).square().sum();
      const double sd = x.rows() > 1 ? std::sqrt(ss / static_cast<double>(x.rows() - 1)) : 0.0;
      scale(j) = sd > 0.0 ? sd : 1.0;
    }
  }

  Matrix apply(const Matrix& x) const {
    return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  }
  Vector apply_row(const Eigen::Ref<const Vector>& x) const {
    return ((x - mean).array() / scale.array()).matrix();
  }
};

class LinearPredictor final : public Predictor {
 public:
  LinearPredictor(Standardizer z, Vector coef, double intercept)
      : z_(std::move(z)), coef_(std::move(coef)), intercept_(intercept) {}
  double predict(const Eigen::Ref<const Vector>& x) const override {
    return intercept_ + z_.apply_row(x).dot(coef_);
  }

 private:
  Standardizer z_;
  Vector coef_;
  double intercept_;
};

Vector ridge_solve(const Matrix& xs, const Vector& yc, double penalty) {
  Matrix gram = xs.transpose() * xs;
  gram.diagonal().array() += penalty;
  return gram.ldlt().solve(xs.transpose() * yc);
}

class KnnPredictor final : public Predictor {
 public:
  KnnPredictor(Standardizer z, Matrix xs, Vector y, int k)
      : z_(std::move(z)), xs_(std::move(xs)), y_(std::move(y)), k_(k) {}
  double predict(const Eigen::Ref<const Vector>& x) const override {
    const Vector q = z_.apply_row(x);
    std::vector<std::pair<double, Eigen::Index>> d(static_cast<std::size_t>(xs_.rows()));
    for (Eigen::Index i = 0; i < xs_.rows(); ++i) {
      d[static_cast<std::size_t>(i)] = {(xs_.row(i).transpose() - q).squaredNorm(), i};
    }
    const auto k = static_cast<std::size_t>(std::min<Eigen::Index>(k_, xs_.rows()));
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += y_(d[i].second);
    return acc / static_cast<double>(k);
  }

 private:
  Standardizer z_;
  Matrix xs_;
  Vector y_;
  int k_;
};

class CubicPredictor final : public Predictor {
 public:
  CubicPredictor(std::vector<int> features, Vector mean, Vector scale, Vector coef)
      : features_(std::move(features)), mean_(std::move(mean)), scale_(std::move(scale)), coef_(std::move(coef)) {}
  double predict(const Eigen::Ref<const Vector>& x) const override {
    double acc = coef_(0);
    for (std::size_t s = 0; s < features_.size(); ++s) {
      const auto k = static_cast<Eigen::Index>(s);
      const double t = (x(features_[s]) - mean_(k)) / scale_(k);
      acc += coef_(1 + 3 * k) * t + coef_(2 + 3 * k) * t * t + coef_(3 + 3 * k) * t * t * t;
    }
    return acc;
  }

 private:
  std::vector<int> features_;
  Vector mean_;
  Vector scale_;
  Vector coef_;
};

class FunctionPredictor final : public Predictor {
 public:
  explicit FunctionPredictor(std::function<double(const Eigen::Ref<const Vector>&)> fn) : fn_(std::move(fn)) {}
  double predict(const Eigen::Ref<const Vector>& x) const override { return fn_(x); }

 private:
  std::function<double(const Eigen::Ref<const Vector>&)> fn_;
};

void check_fit_data(const Dataset& data, Eigen::Index min_rows) {
  if (data.rows() < min_rows) {
    throw std::invalid_argument("need at least " + std::to_string(min_rows) + " rows to fit");
  }
  if (data.x.rows() != data.y.size()) throw std::invalid_argument("feature and response lengths differ");
}

}  // namespace

std::shared_ptr<const Predictor> RidgeCvLearner::fit(const Dataset& data, std::uint64_t seed) const {
  constexpr int kFolds = 5;
  static const double kGrid[] = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
  check_fit_data(data, kFolds);
  const Eigen::Index n = data.rows();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng = make_rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) fold[static_cast<std::size_t>(order[i])] = static_cast<int>(i % kFolds);

  double best_penalty = kGrid[0];
  double best_err = std::numeric_limits<double>::infinity();
  for (double penalty : kGrid) {
    double err = 0.0;
    for (int k = 0; k < kFolds; ++k) {
      std::vector<Eigen::Index> in, out;
      for (Eigen::Index i = 0; i < n; ++i) (fold[static_cast<std::size_t>(i)] == k ? out : in).push_back(i);
      const Dataset tr = data.subset(in);
      const Standardizer z(tr.x);
      const double ybar = tr.y.mean();
      const Vector coef = ridge_solve(z.apply(tr.x), tr.y.array() - ybar, penalty);
      for (Eigen::Index i : out) {
        const double r = data.y(i) - (ybar + z.apply_row(data.x.row(i).transpose()).dot(coef));
        err += r * r;
      }
    }
    if (err < best_err) {
      best_err = err;
      best_penalty = penalty;
    }
  }
  Standardizer z(data.x);
  const double ybar = data.y.mean();
  Vector coef = ridge_solve(z.apply(data.x), data.y.array() - ybar, best_penalty);
  return std::make_shared<LinearPredictor>(std::move(z), std::move(coef), ybar);
}

KnnLearner::KnnLearner(int k) : k_(k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
}

std::shared_ptr<const Predictor> KnnLearner::fit(const Dataset& data, std::uint64_t) const {
  check_fit_data(data, 1);
  Standardizer z(data.x);
  Matrix xs = z.apply(data.x);
  return std::make_shared<KnnPredictor>(std::move(z), std::move(xs), data.y, k_);
}

AdditiveCubicLearner::AdditiveCubicLearner(std::string id, std::vector<int> features)
    : id_(std::move(id)), features_(std::move(features)) {
  if (features_.empty()) throw std::invalid_argument("additive cubic learner needs at least one feature");
}

std::shared_ptr<const Predictor> AdditiveCubicLearner::fit(const Dataset& data, std::uint64_t) const {
  const auto p = static_cast<Eigen::Index>(features_.size());
  check_fit_data(data, 1 + 3 * p);
  for (int j : features_) {
    if (j < 0 || j >= data.features()) throw std::invalid_argument(id_ + ": feature index out of range");
  }
  Vector mean(p), scale(p);
  Matrix design(data.rows(), 1 + 3 * p);
  design.col(0).setOnes();
  for (Eigen::Index s = 0; s < p; ++s) {
    const auto col = data.x.col(features_[static_cast<std::size_t>(s)]);
    mean(s) = col.mean();
    const double ss = (col.array() - mean(s)).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(std::max<Eigen::Index>(data.rows() - 1, 1)));
    scale(s) = sd > 0.0 ? sd : 1.0;
    const Eigen::ArrayXd t = (col.array() - mean(s)) / scale(s);
    design.col(1 + 3 * s) = t.matrix();
    design.col(2 + 3 * s) = t.square().matrix();
    design.col(3 + 3 * s) = t.cube().matrix();
  }
  Vector coef = design.colPivHouseholderQr().solve(data.y);
  return std::make_shared<CubicPredictor>(features_, std::move(mean), std::move(scale), std::move(coef));
}

FunctionLearner::FunctionLearner(std::string id, std::function<double(const Eigen::Ref<const Vector>&)> fn)
    : id_(std::move(id)), fn_(std::move(fn)) {}

std::shared_ptr<const Predictor> FunctionLearner::fit(const Dataset&, std::uint64_t) const {
  return std::make_shared<FunctionPredictor>(fn_);
}

LearnerList default_learners(int features, Eigen::Index n, int n_subsets, std::uint64_t seed) {
  if (features < 1) throw std::invalid_argument("need at least one feature");
  LearnerList out;
  out.push_back(std::make_shared<RidgeCvLearner>());
  out.push_back(std::make_shared<KnnLearner>(5));
  out.push_back(std::make_shared<KnnLearner>(15));
  const double cap = std::min(std::sqrt(static_cast<double>(n)), static_cast<double>(features) / 3.0);
  const int size = std::max(1, static_cast<int>(std::floor(cap)));
  Rng rng = make_rng(seed, 7);
  std::vector<int> all(static_cast<std::size_t>(features));
  std::iota(all.begin(), all.end(), 0);
  for (int s = 0; s < n_subsets; ++s) {
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> pick(all.begin(), all.begin() + size);
    std::sort(pick.begin(), pick.end());
    out.push_back(std::make_shared<AdditiveCubicLearner>("cubic_" + std::to_string(s + 1), std::move(pick)));
  }
  return out;
}

Split split_data(const Dataset& data, double frac, std::uint64_t seed) {
  if (!(frac > 0.0 && frac < 1.0)) throw std::invalid_argument("split fraction must lie in (0, 1)");
  const Eigen::Index n = data.rows();
  const auto n_train = static_cast<Eigen::Index>(std::ceil(frac * static_cast<double>(n)));
  if (n_train < 2 || n - n_train < 2) {
    throw std::invalid_argument("split leaves a part with fewer than 2 rows");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng = make_rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  Split out;
  out.train_rows.assign(order.begin(), order.begin() + n_train);
  out.aggregate_rows.assign(order.begin() + n_train, order.end());
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.aggregate_rows.begin(), out.aggregate_rows.end());
  out.train = data.subset(out.train_rows);
  out.aggregate = data.subset(out.aggregate_rows);
  return out;
}

namespace {

void check_column(const Vector& col, const std::string& id) {
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    if (!std::isfinite(col(i))) {
      throw NumericFailure("learner " + id + " produced a non-finite prediction at row " + std::to_string(i));
    }
  }
}

void check_predictor_list(const std::vector<std::shared_ptr<const Predictor>>& predictors,
                          const std::vector<std::string>& ids) {
  if (predictors.size() != ids.size()) throw std::invalid_argument("one id per predictor is required");
  for (const auto& p : predictors) {
    if (!p) throw std::invalid_argument("null predictor");
  }
}

}  // namespace

namespace reference {

Matrix build_prediction_matrix_serial(const std::vector<std::shared_ptr<const Predictor>>& predictors,
                                      const std::vector<std::string>& ids, const Matrix& x) {
  check_predictor_list(predictors, ids);
  Matrix f(x.rows(), static_cast<Eigen::Index>(predictors.size()));
  for (std::size_t j = 0; j < predictors.size(); ++j) {
    const Vector col = predictors[j]->predict_rows(x);
    check_column(col, ids[j]);
    f.col(static_cast<Eigen::Index>(j)) = col;
  }
  return f;
}

}  // namespace reference

Matrix build_prediction_matrix(const std::vector<std::shared_ptr<const Predictor>>& predictors,
                               const std::vector<std::string>& ids, const Matrix& x) {
  check_predictor_list(predictors, ids);
  const auto m = static_cast<std::ptrdiff_t>(predictors.size());
  Matrix f(x.rows(), m);
  // First failing column in learner order wins, as in the serial version.
  std::vector<std::string> errors(predictors.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < m; ++j) {
    try {
      const Vector col = predictors[static_cast<std::size_t>(j)]->predict_rows(x);
      check_column(col, ids[static_cast<std::size_t>(j)]);
      f.col(j) = col;
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(j)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericFailure(e);
  }
  return f;
}

AggregationMode parse_mode(const std::string& name) {
  if (name == "ca") return AggregationMode::kConvex;
  if (name == "la") return AggregationMode::kLinear;
  throw std::invalid_argument("unknown aggregation mode '" + name + "' (expected ca or la)");
}

std::string mode_name(AggregationMode mode) { return mode == AggregationMode::kConvex ? "ca" : "la"; }

Vector AggregatedModel::combine(const Matrix& f) const {
  if (f.cols() != coefficients.size()) throw std::invalid_argument("prediction matrix has wrong column count");
  return f * coefficients;
}

Vector AggregatedModel::predict(const Matrix& x) const {
  if (predictors.empty()) throw std::logic_error("model was aggregated from a prediction matrix; use combine()");
  return combine(build_prediction_matrix(predictors, learner_ids, x));
}

std::optional<SimplexWeights> AggregatedModel::simplex_weights() const {
  if (mode != AggregationMode::kConvex) return std::nullopt;
  return SimplexWeights(std::vector<double>(coefficients.data(), coefficients.data() + coefficients.size()));
}

AggregatedModel aggregate_matrix(const Matrix& f, const Vector& y, const std::vector<std::string>& ids,
                                 const AggregateConfig& config) {
  if (static_cast<Eigen::Index>(ids.size()) != f.cols()) throw std::invalid_argument("one id per column is required");
  if (f.cols() < 2) throw std::invalid_argument("aggregation needs at least 2 learners");
  const int m = static_cast<int>(f.cols());
  const std::uint64_t chain_seed = derive_seed(config.seed, 2);

  AggregatedModel out;
  out.mode = config.mode;
  out.learner_ids = ids;
  if (config.mode == AggregationMode::kConvex) {
    CaHyper h = CaHyper::defaults(m);
    h.dirichlet = DirichletHyper(config.alpha, config.gamma, m);
    h.n_iter = config.n_iter;
    h.burn_in = config.burn_in;
    out.samples = run_chain_ca(y, f, h, chain_seed);
    // Renormalize away rounding so the mean is an exact simplex point.
    Vector mean = out.samples.mean();
    out.coefficients = mean / mean.sum();
  } else {
    LaHyper h = LaHyper::defaults(m);
    h.dirichlet = DirichletHyper(config.alpha, config.gamma, m);
    h.n_iter = config.n_iter;
    h.burn_in = config.burn_in;
    out.samples = run_chain_la(y, f, h, chain_seed);
    out.coefficients = posterior_medians(out.samples);
  }
  if (out.samples.size() >= 100) out.summaries = summarize_posterior(out.samples, config.level);
  return out;
}

FittedLearners fit_learners(const Dataset& data, const LearnerList& learners, double split_frac,
                            std::uint64_t seed) {
  if (learners.size() < 2) throw std::invalid_argument("aggregation needs at least 2 learners");
  data.validate();
  FittedLearners out;
  out.split = split_data(data, split_frac, derive_seed(seed, 1));
  for (const auto& l : learners) out.ids.push_back(l->id());
  const auto m = static_cast<std::ptrdiff_t>(learners.size());

  std::vector<std::shared_ptr<const Predictor>> stage1(learners.size());
  out.refit.resize(learners.size());
  std::vector<std::string> errors(learners.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < m; ++j) {
    const auto k = static_cast<std::size_t>(j);
    try {
      const std::uint64_t s = derive_seed(seed, 100 + k);
      stage1[k] = learners[k]->fit(out.split.train, s);
      out.refit[k] = learners[k]->fit(data, s);
    } catch (const std::exception& e) {
      errors[k] = "learner " + out.ids[k] + ": " + e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }
  out.f_aggregate = build_prediction_matrix(stage1, out.ids, out.split.aggregate.x);
  return out;
}

AggregatedModel aggregate(const Dataset& data, const LearnerList& learners, const AggregateConfig& config) {
  FittedLearners fitted = fit_learners(data, learners, config.split_frac, config.seed);
  AggregatedModel out = aggregate_matrix(fitted.f_aggregate, fitted.split.aggregate.y, fitted.ids, config);
  out.predictors = std::move(fitted.refit);
  out.train_rows = std::move(fitted.split.train_rows);
  out.aggregate_rows = std::move(fitted.split.aggregate_rows);
  return out;
}

}  // namespace bagg
