#include "bagg/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bagg {

DirichletHyper::DirichletHyper(double alpha_, double gamma_, int dim_)
    : alpha(alpha_), gamma(gamma_), dim(dim_) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be >= 0");
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  if (!(rho() > 0.0)) throw std::invalid_argument("concentration alpha / M^gamma underflows to 0");
}

double DirichletHyper::rho() const { return alpha / std::pow(static_cast<double>(dim), gamma); }

SimplexWeights::SimplexWeights(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("simplex weights must be non-empty");
  double total = 0.0;
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("simplex weights must be >= 0");
    total += v;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw std::invalid_argument("simplex weights sum to " + std::to_string(total));
  }
}

SimplexWeights SimplexWeights::uniform(int dim) {
  return SimplexWeights(std::vector<double>(static_cast<std::size_t>(dim), 1.0 / dim));
}

SimplexWeights SimplexWeights::vertex(int dim, int index) {
  if (index < 0 || index >= dim) throw std::invalid_argument("vertex index out of range");
  std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
  v[static_cast<std::size_t>(index)] = 1.0;
  return SimplexWeights(std::move(v));
}

SimplexWeights SimplexWeights::from_log_weights(std::span<const double> log_w) {
  const double top = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> w(log_w.size());
  double total = 0.0;
  for (std::size_t j = 0; j < log_w.size(); ++j) {
    w[j] = std::exp(log_w[j] - top);
    total += w[j];
  }
  for (double& v : w) v /= total;
  return SimplexWeights(std::move(w));
}

SignedCoefficients::SignedCoefficients(double scale, std::vector<double> direction)
    : scale_(scale), direction_(std::move(direction)) {
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw std::invalid_argument("scale must be positive");
  double l1 = 0.0;
  for (double d : direction_) l1 += std::abs(d);
  if (std::abs(l1 - 1.0) > SimplexWeights::kSumTolerance) {
    throw std::invalid_argument("direction must have unit l1 norm");
  }
}

std::vector<double> SignedCoefficients::coefficients() const {
  std::vector<double> out(direction_.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = scale_ * direction_[j];
  return out;
}

SimplexWeights SignedCoefficients::magnitudes() const {
  std::vector<double> mu(direction_.size());
  for (std::size_t j = 0; j < mu.size(); ++j) mu[j] = std::abs(direction_[j]);
  return SimplexWeights(std::move(mu));
}

double sample_log_gamma(Rng& rng, double shape) {
  if (shape >= 1.0) return std::log(gamma_rate(rng, shape, 1.0));
  const double boosted = std::log(gamma_rate(rng, shape + 1.0, 1.0));
  return boosted + std::log(uniform_open0(rng)) / shape;
}

namespace {

std::vector<double> sample_log_gammas(const DirichletHyper& hyper, Rng& rng) {
  const double rho = hyper.rho();
  std::vector<double> log_t(static_cast<std::size_t>(hyper.dim));
  for (double& u : log_t) u = sample_log_gamma(rng, rho);
  return log_t;
}

}  // namespace

SimplexWeights sample_symmetric_dirichlet(const DirichletHyper& hyper, Rng& rng) {
  const auto log_t = sample_log_gammas(hyper, rng);
  return SimplexWeights::from_log_weights(log_t);
}

double log_density_dirichlet(const SimplexWeights& lambda, const DirichletHyper& hyper) {
  if (lambda.size() != hyper.dim) throw std::invalid_argument("dimension mismatch");
  const double rho = hyper.rho();
  const int m = hyper.dim;
  double acc = 0.0;
  for (double v : lambda.values()) {
    if (!(v > 0.0)) throw std::domain_error("Dirichlet density evaluated on the simplex boundary");
    acc += std::log(v);
  }
  return std::lgamma(m * rho) - m * std::lgamma(rho) + (rho - 1.0) * acc;
}

std::vector<double> sample_double_dirichlet(const DirichletHyper& hyper, Rng& rng) {
  const auto mu = sample_symmetric_dirichlet(hyper, rng);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> eta(static_cast<std::size_t>(hyper.dim));
  for (std::size_t j = 0; j < eta.size(); ++j) eta[j] = coin(rng) ? mu[j] : -mu[j];
  return eta;
}

double tail_mass(const SimplexWeights& lambda, int s) {
  const int m = lambda.size();
  if (s < 1 || s > m) throw std::invalid_argument("sparsity level s must lie in [1, M]");
  std::vector<double> sorted(lambda.values().begin(), lambda.values().end());
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
  double tail = 0.0;
  for (int j = m - 1; j >= s; --j) tail += sorted[static_cast<std::size_t>(j)];
  return tail;
}

namespace {

constexpr std::int64_t kConcentrationBlock = 1024;

void check_concentration_args(const DirichletHyper& hyper, const SimplexWeights& lambda_star,
                              int s, double eps, std::int64_t n_draws) {
  if (lambda_star.size() != hyper.dim) throw std::invalid_argument("lambda* dimension mismatch");
  if (s < 1 || s > hyper.dim) throw std::invalid_argument("sparsity level s must lie in [1, M]");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (n_draws < 1000) throw std::invalid_argument("at least 1000 draws are required");
  const auto nonzero = std::count_if(lambda_star.values().begin(), lambda_star.values().end(),
                                     [](double v) { return v > 0.0; });
  if (nonzero > s) throw std::invalid_argument("lambda* has more than s nonzero entries");
}

struct Counts {
  std::int64_t ball = 0;
  std::int64_t tail = 0;
};

Counts concentration_block(const DirichletHyper& hyper, const SimplexWeights& lambda_star, int s,
                           double eps, std::int64_t block, std::int64_t n_draws,
                           std::uint64_t seed) {
  Rng rng = make_rng(seed, static_cast<std::uint64_t>(block));
  const std::int64_t begin = block * kConcentrationBlock;
  const std::int64_t end = std::min(n_draws, begin + kConcentrationBlock);
  Counts c;
  for (std::int64_t i = begin; i < end; ++i) {
    const auto lambda = sample_symmetric_dirichlet(hyper, rng);
    double dist2 = 0.0;
    for (int j = 0; j < hyper.dim; ++j) {
      const double d = lambda[static_cast<std::size_t>(j)] - lambda_star[static_cast<std::size_t>(j)];
      dist2 += d * d;
    }
    if (dist2 <= eps * eps) ++c.ball;
    if (s < hyper.dim && tail_mass(lambda, s) > eps) ++c.tail;
  }
  return c;
}

ConcentrationEstimate finish(Counts c, std::int64_t n_draws) {
  const double n = static_cast<double>(n_draws);
  ConcentrationEstimate e;
  e.draws_used = n_draws;
  e.p_ball = static_cast<double>(c.ball) / n;
  e.p_tail = static_cast<double>(c.tail) / n;
  e.se_ball = std::sqrt(e.p_ball * (1.0 - e.p_ball) / n);
  e.se_tail = std::sqrt(e.p_tail * (1.0 - e.p_tail) / n);
  return e;
}

std::int64_t block_count(std::int64_t n_draws) {
  return (n_draws + kConcentrationBlock - 1) / kConcentrationBlock;
}

}  // namespace

ConcentrationEstimate estimate_concentration(const DirichletHyper& hyper,
                                             const SimplexWeights& lambda_star, int s, double eps,
                                             std::int64_t n_draws, std::uint64_t seed) {
  check_concentration_args(hyper, lambda_star, s, eps, n_draws);
  const std::int64_t blocks = block_count(n_draws);
  std::int64_t ball = 0;
  std::int64_t tail = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : ball, tail)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const Counts c = concentration_block(hyper, lambda_star, s, eps, b, n_draws, seed);
    ball += c.ball;
    tail += c.tail;
  }
  return finish(Counts{ball, tail}, n_draws);
}

namespace reference {

ConcentrationEstimate estimate_concentration_serial(const DirichletHyper& hyper,
                                                    const SimplexWeights& lambda_star, int s,
                                                    double eps, std::int64_t n_draws,
                                                    std::uint64_t seed) {
  check_concentration_args(hyper, lambda_star, s, eps, n_draws);
  Counts total;
  for (std::int64_t b = 0; b < block_count(n_draws); ++b) {
    const Counts c = concentration_block(hyper, lambda_star, s, eps, b, n_draws, seed);
    total.ball += c.ball;
    total.tail += c.tail;
  }
  return finish(total, n_draws);
}

}  // namespace reference

namespace {

double gram_distance(const Vector& diff, const Matrix& gram) {
  return std::sqrt(std::max(0.0, diff.dot(gram * diff)));
}

Vector as_vector(std::span<const double> v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

SparseApproximation sparse_approximation(const SimplexWeights& lambda_star, int m,
                                         const Matrix& gram, Rng& rng, int n_trials) {
  const int dim = lambda_star.size();
  if (m < 1) throw std::invalid_argument("m must be positive");
  if (n_trials < 1) throw std::invalid_argument("n_trials must be positive");
  if (gram.rows() != dim || gram.cols() != dim) throw std::invalid_argument("gram must be M x M");
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("gram must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw std::invalid_argument("gram must be positive semidefinite");
  }

  const double kappa = gram.diagonal().maxCoeff();
  const double bound = std::sqrt(2.0 * kappa / m);
  const Vector target = as_vector(lambda_star.values());

  std::discrete_distribution<int> pick(lambda_star.values().begin(), lambda_star.values().end());
  std::vector<double> best;
  double best_error = std::numeric_limits<double>::infinity();
  for (int t = 0; t < n_trials; ++t) {
    std::vector<double> freq(static_cast<std::size_t>(dim), 0.0);
    for (int k = 0; k < m; ++k) freq[static_cast<std::size_t>(pick(rng))] += 1.0;
    for (double& f : freq) f /= m;
    const double err = gram_distance(as_vector(freq) - target, gram);
    if (err < best_error) {
      best_error = err;
      best = std::move(freq);
    }
  }
  if (best_error <= bound) return {SimplexWeights(std::move(best)), best_error, bound, false};

  std::vector<int> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return lambda_star[static_cast<std::size_t>(a)] > lambda_star[static_cast<std::size_t>(b)];
  });
  std::vector<double> top(static_cast<std::size_t>(dim), 0.0);
  double kept = 0.0;
  for (int k = 0; k < std::min(m, dim); ++k) {
    const auto j = static_cast<std::size_t>(order[static_cast<std::size_t>(k)]);
    top[j] = lambda_star[j];
    kept += top[j];
  }
  for (double& v : top) v /= kept;
  const double err = gram_distance(as_vector(top) - target, gram);
  if (err <= bound) return {SimplexWeights(std::move(top)), err, bound, true};
  throw NumericFailure("sparse approximation missed the bound sqrt(2 kappa / m) = " +
                       std::to_string(bound) + "; best error " + std::to_string(best_error));
}

}  // namespace bagg
