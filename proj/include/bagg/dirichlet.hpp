#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bagg/random.hpp"
#include "bagg/types.hpp"

namespace bagg {

// Symmetric Dirichlet hyperparameters with concentration rho = alpha / M^gamma.
struct DirichletHyper {
  DirichletHyper(double alpha, double gamma, int dim);

  double alpha;
  double gamma;
  int dim;

  double rho() const;
};

// A point on the (M-1)-simplex.
class SimplexWeights {
 public:
  static constexpr double kSumTolerance = 1e-10;

  explicit SimplexWeights(std::vector<double> values);

  static SimplexWeights uniform(int dim);
  static SimplexWeights vertex(int dim, int index);
  // exp(log_w) / sum(exp(log_w)), computed without overflow or underflow of the total.
  static SimplexWeights from_log_weights(std::span<const double> log_w);

  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  std::vector<double> values_;
};

// lambda = scale * direction with sum |direction_j| = 1 and scale > 0.
class SignedCoefficients {
 public:
  SignedCoefficients(double scale, std::vector<double> direction);

  double scale() const { return scale_; }
  std::span<const double> direction() const { return direction_; }
  std::vector<double> coefficients() const;
  // mu_j = |direction_j|
  SimplexWeights magnitudes() const;

 private:
  double scale_;
  std::vector<double> direction_;
};

struct ConcentrationEstimate {
  double p_ball = 0.0;
  double se_ball = 0.0;
  double p_tail = 0.0;
  double se_tail = 0.0;
  std::int64_t draws_used = 0;
};

// log of a Gamma(shape, 1) draw. Uses Gamma(shape) = Gamma(shape + 1) * U^(1/shape)
// in log form, so shapes far below 1e-3 never underflow to log(0).
double sample_log_gamma(Rng& rng, double shape);

SimplexWeights sample_symmetric_dirichlet(const DirichletHyper& hyper, Rng& rng);

// Log pdf of Diri(rho, ..., rho). Throws std::domain_error when some weight is 0.
double log_density_dirichlet(const SimplexWeights& lambda, const DirichletHyper& hyper);

// eta ~ DD(rho, ..., rho): |eta| is Dirichlet, signs are independent fair coins.
std::vector<double> sample_double_dirichlet(const DirichletHyper& hyper, Rng& rng);

// Sum of all but the s largest weights. Throws std::invalid_argument unless 1 <= s <= M.
double tail_mass(const SimplexWeights& lambda, int s);

// Monte Carlo estimates of P(||lambda - lambda*||_2 <= eps) and
// P(tail_mass(lambda, s) > eps) under Diri(rho, ..., rho). Draws are split into
// fixed blocks with their own random stream, so the result depends only on
// `seed`, never on the thread count.
ConcentrationEstimate estimate_concentration(const DirichletHyper& hyper,
                                             const SimplexWeights& lambda_star, int s, double eps,
                                             std::int64_t n_draws, std::uint64_t seed);

namespace reference {
// Single-threaded twin of estimate_concentration; identical output.
ConcentrationEstimate estimate_concentration_serial(const DirichletHyper& hyper,
                                                    const SimplexWeights& lambda_star, int s,
                                                    double eps, std::int64_t n_draws,
                                                    std::uint64_t seed);
}  // namespace reference

struct SparseApproximation {
  SimplexWeights weights;
  double error;  // sqrt((w - lambda*)' G (w - lambda*))
  double bound;  // sqrt(2 kappa / m)
  bool used_fallback;
};

// m-sparse approximation of lambda* from empirical frequencies of m multinomial
// draws; keeps the best of n_trials, then tries top-m truncation. Throws
// NumericFailure if neither meets the bound.
SparseApproximation sparse_approximation(const SimplexWeights& lambda_star, int m,
                                         const Matrix& gram, Rng& rng, int n_trials = 64);

}  // namespace bagg
