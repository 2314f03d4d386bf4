#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bagg/dirichlet.hpp"
#include "bagg/mcmc.hpp"

namespace bagg {

// Log T refresh per iteration. kJoint is the single joint random-walk move;
// kCoordinate is a sweep of one-coordinate moves, each with its own step;
// kJointThenCoordinate runs the joint move followed by the sweep.
enum class TScheme { kJoint, kCoordinate, kJointThenCoordinate };

// Convex aggregation y = F lambda + N(0, 1/phi), lambda ~ Diri(rho, ..., rho)
// represented as lambda_j = T_j / sum_k T_k with T_j ~ Gamma(rho, 1), and
// phi ~ Gamma(a0, b0).
struct CaHyper {
  DirichletHyper dirichlet{1.0, 2.0, 2};
  double a0 = 0.01;
  double b0 = 0.01;
  double beta = 0.5;  // initial step of the log T random walk
  double target_accept = 0.4;
  bool adapt = true;  // tune beta during burn-in
  int tune_window = 50;
  TScheme t_scheme = TScheme::kJointThenCoordinate;
  int n_iter = 2000;
  int burn_in = 1000;

  static CaHyper defaults(int dim);
  void validate() const;
};

struct CaChainState {
  std::vector<double> log_T;
  double phi;

  Vector lambda() const;
};

struct GammaParams {
  double shape;
  double rate;
};

// lambda uniform, phi = 1 / var(y).
CaChainState initial_state_ca(const Vector& y, const Matrix& f);

// Full conditional of phi: Gamma(a0 + n/2, b0 + rss/2).
GammaParams phi_conditional(double rss, Eigen::Index n, double a0, double b0);

double gibbs_update_phi(const CaChainState& state, const Vector& y, const Matrix& f,
                        const CaHyper& hyper, Rng& rng);

// log R for moving log T to `proposed_log_T`: likelihood + Gamma(rho, 1) prior
// + log-scale proposal correction.
double log_ratio_T(const CaChainState& state, std::span<const double> proposed_log_T,
                   const Vector& y, const Matrix& f, const CaHyper& hyper);

// Joint random-walk update of every log T_j by beta * U(-0.5, 0.5).
MhStep mh_update_T(CaChainState& state, const Vector& y, const Matrix& f, const CaHyper& hyper,
                   double beta, Rng& rng);

// Per-coordinate sweep; betas[j] is the step for log T_j.
std::vector<bool> mh_update_T_coordinate(CaChainState& state, const Vector& y, const Matrix& f,
                                         const CaHyper& hyper, std::span<const double> betas,
                                         Rng& rng);

// Runs the burn-in sweeps from the initial state with adaptation toward
// `target` and returns the frozen step.
double tune_beta(double initial, double target, const Vector& y, const Matrix& f,
                 const CaHyper& hyper, std::uint64_t seed);

// Alternates Gibbs phi and the log T refresh for n_iter sweeps. Acceptance
// blocks: "T" (joint move) and "T_coord" (per-coordinate sweep).
PosteriorSamples run_chain_ca(const Vector& y, const Matrix& f, const CaHyper& hyper,
                              std::uint64_t seed);

}  // namespace bagg
