#include "bagg/sampler_ca.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "detail/augmentation.hpp"

namespace bagg {

CaHyper CaHyper::defaults(int dim) {
  CaHyper h;
  h.dirichlet = DirichletHyper(1.0, 2.0, dim);
  return h;
}

void CaHyper::validate() const {
  if (!(a0 > 0.0 && b0 > 0.0)) throw std::invalid_argument("a0 and b0 must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(target_accept > 0.0 && target_accept < 1.0)) {
    throw std::invalid_argument("target acceptance must lie in (0, 1)");
  }
  if (burn_in < 0 || burn_in >= n_iter) throw std::invalid_argument("need 0 <= burn_in < n_iter");
  if (tune_window < 1) throw std::invalid_argument("tuning window must be positive");
}

Vector CaChainState::lambda() const { return detail::normalized_weights(log_T); }

CaChainState initial_state_ca(const Vector& y, const Matrix& f) {
  const double mean = y.mean();
  const double var = (y.array() - mean).square().sum() / static_cast<double>(y.size() - 1);
  return {std::vector<double>(static_cast<std::size_t>(f.cols()), 0.0), var > 0.0 ? 1.0 / var : 1.0};
}

GammaParams phi_conditional(double rss, Eigen::Index n, double a0, double b0) {
  return {a0 + 0.5 * static_cast<double>(n), b0 + 0.5 * rss};
}

double gibbs_update_phi(const CaChainState& state, const Vector& y, const Matrix& f,
                        const CaHyper& hyper, Rng& rng) {
  const auto post = phi_conditional(residual_ss(y, f, state.lambda()), y.size(), hyper.a0, hyper.b0);
  return gamma_rate(rng, post.shape, post.rate);
}

double log_ratio_T(const CaChainState& state, std::span<const double> proposed_log_T,
                   const Vector& y, const Matrix& f, const CaHyper& hyper) {
  const double rho = hyper.dirichlet.rho();
  const double rss_old = residual_ss(y, f, state.lambda());
  const double rss_new = residual_ss(y, f, detail::normalized_weights(proposed_log_T));
  return -0.5 * state.phi * (rss_new - rss_old) + detail::log_T_target(proposed_log_T, rho) -
         detail::log_T_target(state.log_T, rho);
}

MhStep mh_update_T(CaChainState& state, const Vector& y, const Matrix& f, const CaHyper& hyper,
                   double beta, Rng& rng) {
  auto proposal = detail::propose_log_T(state.log_T, beta, rng);
  if (detail::beyond_prior_support(proposal)) return {false, -std::numeric_limits<double>::infinity()};
  const double lr = log_ratio_T(state, proposal, y, f, hyper);
  detail::require_finite(lr, "T");
  const bool accepted = mh_accept(lr, rng);
  if (accepted) state.log_T = std::move(proposal);
  return {accepted, lr};
}

std::vector<bool> mh_update_T_coordinate(CaChainState& state, const Vector& y, const Matrix& f,
                                         const CaHyper& hyper, std::span<const double> betas,
                                         Rng& rng) {
  return detail::coordinate_log_T_sweep(state.log_T, {}, 1.0, state.phi, hyper.dirichlet.rho(), y, f,
                                        true, betas, rng);
}

namespace {

void check_ca_inputs(const Vector& y, const Matrix& f, const CaHyper& hyper) {
  hyper.validate();
  check_regression_inputs(y, f);
  if (f.cols() < 2) throw std::invalid_argument("convex aggregation needs at least 2 predictors");
  if (f.cols() != hyper.dirichlet.dim) throw std::invalid_argument("prediction matrix has wrong column count");
}

}  // namespace

double tune_beta(double initial, double target, const Vector& y, const Matrix& f,
                 const CaHyper& hyper, std::uint64_t seed) {
  check_ca_inputs(y, f, hyper);
  Rng rng = make_rng(seed);
  CaChainState state = initial_state_ca(y, f);
  StepTuner tuner(initial, target, hyper.tune_window);
  for (int it = 0; it < hyper.burn_in; ++it) {
    state.phi = gibbs_update_phi(state, y, f, hyper, rng);
    tuner.record(mh_update_T(state, y, f, hyper, tuner.step(), rng).accepted);
  }
  return tuner.step();
}

PosteriorSamples run_chain_ca(const Vector& y, const Matrix& f, const CaHyper& hyper,
                              std::uint64_t seed) {
  check_ca_inputs(y, f, hyper);
  Rng rng = make_rng(seed);
  CaChainState state = initial_state_ca(y, f);
  detail::LogTRefresh refresh(hyper.t_scheme != TScheme::kCoordinate, hyper.t_scheme != TScheme::kJoint,
                              state.log_T.size(), hyper.beta, hyper.target_accept, hyper.tune_window,
                              hyper.adapt);

  const int kept = hyper.n_iter - hyper.burn_in;
  PosteriorSamples out;
  out.seed = seed;
  out.draws.resize(kept, f.cols());
  out.phi.reserve(static_cast<std::size_t>(kept));

  for (int it = 0; it < hyper.n_iter; ++it) {
    if (it == hyper.burn_in) refresh.freeze();
    const bool record = it >= hyper.burn_in;
    state.phi = gibbs_update_phi(state, y, f, hyper, rng);
    refresh.run([&](double beta) { return mh_update_T(state, y, f, hyper, beta, rng).accepted; },
                [&](const std::vector<double>& steps) {
                  return mh_update_T_coordinate(state, y, f, hyper, steps, rng);
                },
                record);
    if (record) {
      out.draws.row(it - hyper.burn_in) = state.lambda().transpose();
      out.phi.push_back(state.phi);
    }
  }
  refresh.append_blocks(out.acceptance);
  return out;
}

}  // namespace bagg
