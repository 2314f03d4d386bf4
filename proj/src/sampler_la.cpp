#include "bagg/sampler_la.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "detail/augmentation.hpp"

namespace bagg {

LaHyper LaHyper::defaults(int dim) {
  LaHyper h;
  h.dirichlet = DirichletHyper(1.0, 2.0, dim);
  return h;
}

void LaHyper::validate() const {
  if (!(a0 > 0.0 && b0 > 0.0 && c0 > 0.0 && d0 > 0.0)) {
    throw std::invalid_argument("a0, b0, c0, d0 must be positive");
  }
  if (!(beta_T > 0.0 && beta_A > 0.0)) throw std::invalid_argument("step sizes must be positive");
  if (!(target_accept > 0.0 && target_accept < 1.0)) {
    throw std::invalid_argument("target acceptance must lie in (0, 1)");
  }
  if (burn_in < 0 || burn_in >= n_iter) throw std::invalid_argument("need 0 <= burn_in < n_iter");
  if (tune_window < 1) throw std::invalid_argument("tuning window must be positive");
}

namespace {

Vector theta_from(std::span<const double> log_t, std::span<const int> signs, double log_a) {
  Vector w = detail::normalized_weights(log_t);
  const double a = std::exp(log_a);
  for (Eigen::Index j = 0; j < w.size(); ++j) w(j) *= a * signs[static_cast<std::size_t>(j)];
  return w;
}

double likelihood_delta(const LaHyper& hyper, double phi, double rss_new, double rss_old) {
  return hyper.use_likelihood ? -0.5 * phi * (rss_new - rss_old) : 0.0;
}

}  // namespace

Vector LaChainState::coefficients() const { return theta_from(log_T, signs, log_A); }

SignedCoefficients LaChainState::signed_coefficients() const {
  const Vector w = detail::normalized_weights(log_T);
  std::vector<double> direction(static_cast<std::size_t>(w.size()));
  for (std::size_t j = 0; j < direction.size(); ++j) {
    direction[j] = signs[j] * w(static_cast<Eigen::Index>(j));
  }
  return SignedCoefficients(std::exp(log_A), std::move(direction));
}

LaChainState initial_state_la(const Vector& y, const Matrix& f) {
  const auto m = static_cast<std::size_t>(f.cols());
  LaChainState s;
  s.log_T.assign(m, 0.0);
  s.signs.resize(m);
  const Vector corr = f.transpose() * y;
  Vector direction(f.cols());
  for (std::size_t j = 0; j < m; ++j) {
    s.signs[j] = corr(static_cast<Eigen::Index>(j)) >= 0.0 ? 1 : -1;
    direction(static_cast<Eigen::Index>(j)) = s.signs[j] / static_cast<double>(m);
  }
  const Vector g = f * direction;
  const double scale = g.squaredNorm() > 0.0 ? g.dot(y) / g.squaredNorm() : 1.0;
  s.log_A = std::log(scale > 0.0 && std::isfinite(scale) ? scale : 1.0);
  const double mean = y.mean();
  const double var = (y.array() - mean).square().sum() / static_cast<double>(y.size() - 1);
  s.phi = var > 0.0 ? 1.0 / var : 1.0;
  return s;
}

double gibbs_update_phi(const LaChainState& state, const Vector& y, const Matrix& f,
                        const LaHyper& hyper, Rng& rng) {
  if (!hyper.use_likelihood) return gamma_rate(rng, hyper.a0, hyper.b0);
  const auto post =
      phi_conditional(residual_ss(y, f, state.coefficients()), y.size(), hyper.a0, hyper.b0);
  return gamma_rate(rng, post.shape, post.rate);
}

double log_ratio_T(const LaChainState& state, std::span<const double> proposed_log_T,
                   const Vector& y, const Matrix& f, const LaHyper& hyper) {
  const double rho = hyper.dirichlet.rho();
  double lr = detail::log_T_target(proposed_log_T, rho) - detail::log_T_target(state.log_T, rho);
  if (hyper.use_likelihood) {
    const double rss_old = residual_ss(y, f, state.coefficients());
    const double rss_new = residual_ss(y, f, theta_from(proposed_log_T, state.signs, state.log_A));
    lr += likelihood_delta(hyper, state.phi, rss_new, rss_old);
  }
  return lr;
}

double log_ratio_A(const LaChainState& state, double proposed_log_A, const Vector& y,
                   const Matrix& f, const LaHyper& hyper) {
  const double a_old = std::exp(state.log_A);
  const double a_new = std::exp(proposed_log_A);
  // Gamma(c0, d0) log prior plus the log-scale proposal correction log A^P - log A^O.
  double lr = (hyper.c0 * proposed_log_A - hyper.d0 * a_new) - (hyper.c0 * state.log_A - hyper.d0 * a_old);
  if (hyper.use_likelihood) {
    const Vector theta = state.coefficients();
    const double rss_old = residual_ss(y, f, theta);
    const double rss_new = residual_ss(y, f, theta * (a_new / a_old));
    lr += likelihood_delta(hyper, state.phi, rss_new, rss_old);
  }
  return lr;
}

double log_ratio_z(const LaChainState& state, std::span<const int> proposed_signs,
                   const Vector& y, const Matrix& f, const LaHyper& hyper) {
  if (!hyper.use_likelihood) return 0.0;
  const double rss_old = residual_ss(y, f, state.coefficients());
  const double rss_new = residual_ss(y, f, theta_from(state.log_T, proposed_signs, state.log_A));
  return likelihood_delta(hyper, state.phi, rss_new, rss_old);
}

MhStep mh_update_T(LaChainState& state, const Vector& y, const Matrix& f, const LaHyper& hyper,
                   double beta, Rng& rng) {
  auto proposal = detail::propose_log_T(state.log_T, beta, rng);
  if (detail::beyond_prior_support(proposal)) return {false, -std::numeric_limits<double>::infinity()};
  const double lr = log_ratio_T(state, proposal, y, f, hyper);
  detail::require_finite(lr, "T");
  const bool accepted = mh_accept(lr, rng);
  if (accepted) state.log_T = std::move(proposal);
  return {accepted, lr};
}

std::vector<bool> mh_update_T_coordinate(LaChainState& state, const Vector& y, const Matrix& f,
                                         const LaHyper& hyper, std::span<const double> betas,
                                         Rng& rng) {
  return detail::coordinate_log_T_sweep(state.log_T, state.signs, std::exp(state.log_A), state.phi,
                                        hyper.dirichlet.rho(), y, f, hyper.use_likelihood, betas,
                                        rng);
}

MhStep mh_update_A(LaChainState& state, const Vector& y, const Matrix& f, const LaHyper& hyper,
                   double beta, Rng& rng) {
  const double proposal = state.log_A + beta * std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
  const double lr = log_ratio_A(state, proposal, y, f, hyper);
  detail::require_finite(lr, "A");
  const bool accepted = mh_accept(lr, rng);
  if (accepted) state.log_A = proposal;
  return {accepted, lr};
}

MhStep mh_update_z_block(LaChainState& state, const Vector& y, const Matrix& f,
                         const LaHyper& hyper, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<int> proposal = state.signs;
  for (int& z : proposal) {
    if (coin(rng)) z = -z;
  }
  const double lr = log_ratio_z(state, proposal, y, f, hyper);
  detail::require_finite(lr, "z");
  const bool accepted = mh_accept(lr, rng);
  if (accepted) state.signs = std::move(proposal);
  return {accepted, lr};
}

SignSweep mh_update_z(LaChainState& state, const Vector& y, const Matrix& f, const LaHyper& hyper,
                      Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  const Vector theta = state.coefficients();
  Vector resid = y - f * theta;
  SignSweep sweep;
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    if (!coin(rng)) continue;
    ++sweep.proposed;
    // Flipping theta_j moves the residual by 2 theta_j F_j.
    const double shift = 2.0 * theta(j);
    double lr = 0.0;
    if (hyper.use_likelihood) {
      const double delta_rss = 2.0 * shift * resid.dot(f.col(j)) + shift * shift * f.col(j).squaredNorm();
      lr = -0.5 * state.phi * delta_rss;
    }
    detail::require_finite(lr, "z");
    if (mh_accept(lr, rng)) {
      ++sweep.accepted;
      state.signs[static_cast<std::size_t>(j)] = -state.signs[static_cast<std::size_t>(j)];
      if (hyper.use_likelihood) resid += shift * f.col(j);
    }
  }
  return sweep;
}

PosteriorSamples run_chain_la(const Vector& y, const Matrix& f, const LaHyper& hyper,
                              std::uint64_t seed) {
  hyper.validate();
  check_regression_inputs(y, f);
  if (f.cols() != hyper.dirichlet.dim) throw std::invalid_argument("prediction matrix has wrong column count");

  Rng rng = make_rng(seed);
  LaChainState state = initial_state_la(y, f);
  detail::LogTRefresh refresh(hyper.t_scheme != TScheme::kCoordinate, hyper.t_scheme != TScheme::kJoint,
                              state.log_T.size(), hyper.beta_T, hyper.target_accept, hyper.tune_window,
                              hyper.adapt);
  auto tune_a = make_tuners(1, hyper.beta_A, hyper.target_accept, hyper.tune_window, hyper.adapt);

  const int kept = hyper.n_iter - hyper.burn_in;
  PosteriorSamples out;
  out.seed = seed;
  out.draws.resize(kept, f.cols());
  out.phi.reserve(static_cast<std::size_t>(kept));
  BlockAcceptance a_block{"A"};
  BlockAcceptance z_block{"z"};

  for (int it = 0; it < hyper.n_iter; ++it) {
    if (it == hyper.burn_in) {
      refresh.freeze();
      freeze_all(tune_a);
    }
    const bool record = it >= hyper.burn_in;
    state.phi = gibbs_update_phi(state, y, f, hyper, rng);

    refresh.run([&](double beta) { return mh_update_T(state, y, f, hyper, beta, rng).accepted; },
                [&](const std::vector<double>& steps) {
                  return mh_update_T_coordinate(state, y, f, hyper, steps, rng);
                },
                record);

    const bool a_ok = mh_update_A(state, y, f, hyper, tune_a[0].step(), rng).accepted;
    tune_a[0].record(a_ok);

    SignSweep z_sweep;
    if (hyper.sign_scheme == UpdateScheme::kJoint) {
      z_sweep.proposed = 1;
      z_sweep.accepted = mh_update_z_block(state, y, f, hyper, rng).accepted ? 1 : 0;
    } else {
      z_sweep = mh_update_z(state, y, f, hyper, rng);
    }

    if (record) {
      ++a_block.proposed;
      a_block.accepted += a_ok ? 1 : 0;
      z_block.proposed += z_sweep.proposed;
      z_block.accepted += z_sweep.accepted;
      out.draws.row(it - hyper.burn_in) = state.coefficients().transpose();
      out.phi.push_back(state.phi);
    }
  }
  a_block.steps = current_steps(tune_a);
  refresh.append_blocks(out.acceptance);
  out.acceptance.push_back(a_block);
  out.acceptance.push_back(z_block);
  return out;
}

}  // namespace bagg
