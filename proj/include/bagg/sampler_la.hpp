#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bagg/dirichlet.hpp"
#include "bagg/mcmc.hpp"
#include "bagg/sampler_ca.hpp"

namespace bagg {

// How a vector block (log T or the signs) is refreshed. kCoordinate runs one
// proposal and accept/reject per coordinate; kJoint proposes every
// coordinate at once and accepts or rejects them together.
enum class UpdateScheme { kCoordinate, kJoint };

// Linear aggregation y = F theta + N(0, 1/phi) with theta_j = A z_j lambda_j,
// A ~ Gamma(c0, d0), z_j fair signs, lambda ~ Diri(rho, ..., rho) via
// gamma augmentation, phi ~ Gamma(a0, b0).
struct LaHyper {
  DirichletHyper dirichlet{1.0, 2.0, 1};
  double a0 = 0.01;
  double b0 = 0.01;
  double c0 = 0.01;
  double d0 = 0.01;
  double beta_T = 0.5;  // initial step(s) of the log T random walk
  double beta_A = 0.5;  // initial step of the log A random walk
  double target_accept = 0.4;
  bool adapt = true;
  int tune_window = 50;  // iterations per step-size adaptation
  int n_iter = 2000;
  int burn_in = 1000;
  UpdateScheme sign_scheme = UpdateScheme::kCoordinate;
  TScheme t_scheme = TScheme::kJointThenCoordinate;
  // Test hook: with the likelihood switched off the chain targets the prior.
  bool use_likelihood = true;

  static LaHyper defaults(int dim);
  void validate() const;
};

struct LaChainState {
  std::vector<double> log_T;
  std::vector<int> signs;  // each +1 or -1
  double log_A;
  double phi;

  Vector coefficients() const;
  SignedCoefficients signed_coefficients() const;
};

// lambda uniform, z_j = sign(F_j' y), A the least-squares scale along the
// resulting direction, phi = 1 / var(y).
LaChainState initial_state_la(const Vector& y, const Matrix& f);

double gibbs_update_phi(const LaChainState& state, const Vector& y, const Matrix& f,
                        const LaHyper& hyper, Rng& rng);

double log_ratio_T(const LaChainState& state, std::span<const double> proposed_log_T,
                   const Vector& y, const Matrix& f, const LaHyper& hyper);
double log_ratio_A(const LaChainState& state, double proposed_log_A, const Vector& y,
                   const Matrix& f, const LaHyper& hyper);
double log_ratio_z(const LaChainState& state, std::span<const int> proposed_signs,
                   const Vector& y, const Matrix& f, const LaHyper& hyper);

struct SignSweep {
  int proposed = 0;
  int accepted = 0;
};

MhStep mh_update_T(LaChainState& state, const Vector& y, const Matrix& f, const LaHyper& hyper,
                   double beta, Rng& rng);
// One random-walk proposal per log T_j with its own step betas[j], each
// accepted or rejected on its own. Returns the per-coordinate accept flags.
std::vector<bool> mh_update_T_coordinate(LaChainState& state, const Vector& y, const Matrix& f,
                                         const LaHyper& hyper, std::span<const double> betas,
                                         Rng& rng);
// log A += beta * U(-0.5, 0.5); every theta_j rescales by the same factor.
MhStep mh_update_A(LaChainState& state, const Vector& y, const Matrix& f, const LaHyper& hyper,
                   double beta, Rng& rng);

MhStep mh_update_z_block(LaChainState& state, const Vector& y, const Matrix& f,
                         const LaHyper& hyper, Rng& rng);
SignSweep mh_update_z(LaChainState& state, const Vector& y, const Matrix& f, const LaHyper& hyper,
                      Rng& rng);

// Sweep order: Gibbs phi, MH T, MH A, MH z. Records theta after burn-in.
// Acceptance blocks: "T" (joint log T move), "T_coord" (per-coordinate log T
// sweep, one tuned step per coordinate), "A", "z".
PosteriorSamples run_chain_la(const Vector& y, const Matrix& f, const LaHyper& hyper,
                              std::uint64_t seed);

}  // namespace bagg
