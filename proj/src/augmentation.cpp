#include <algorithm>
#include <cmath>

#include "detail/augmentation.hpp"
#include "bagg/mcmc.hpp"

namespace bagg::detail {

std::vector<bool> coordinate_log_T_sweep(std::vector<double>& log_t, std::span<const int> signs,
                                         double scale, double phi, double rho, const Vector& y,
                                         const Matrix& f, bool use_likelihood,
                                         std::span<const double> betas, Rng& rng) {
  const auto m = static_cast<Eigen::Index>(log_t.size());
  double ref = *std::max_element(log_t.begin(), log_t.end());
  auto sign = [&](Eigen::Index j) { return signs.empty() ? 1.0 : static_cast<double>(signs[static_cast<std::size_t>(j)]); };

  // T_j relative to exp(ref); entries far below the maximum underflow to 0,
  // which is exact to double precision for the fit.
  Vector rel(m);
  for (Eigen::Index j = 0; j < m; ++j) rel(j) = std::exp(log_t[static_cast<std::size_t>(j)] - ref);
  double total = rel.sum();
  Vector unnorm(f.rows());
  auto rebuild = [&] {
    Vector signed_rel(m);
    for (Eigen::Index j = 0; j < m; ++j) signed_rel(j) = sign(j) * rel(j);
    unnorm = f * signed_rel;
    total = rel.sum();
  };
  rebuild();
  double rss = use_likelihood ? (y - (scale / total) * unnorm).squaredNorm() : 0.0;

  std::uniform_real_distribution<double> step(-0.5, 0.5);
  Vector candidate(f.rows());
  std::vector<bool> accepted(static_cast<std::size_t>(m), false);
  for (Eigen::Index j = 0; j < m; ++j) {
    auto& u = log_t[static_cast<std::size_t>(j)];
    const double proposal = u + betas[static_cast<std::size_t>(j)] * step(rng);
    // Gamma(rho, 1) puts no representable mass beyond exp(700).
    if (proposal > kMaxLogT) continue;
    if (proposal - ref > 300.0) {
      // Keep exp(proposal - ref) representable.
      const double shift = proposal - ref;
      rel *= std::exp(-shift);
      ref = proposal;
      rebuild();
    }
    double rel_new = std::exp(proposal - ref);
    double delta = rel_new - rel(j);
    double total_new = total + delta;
    // Moving the dominant coordinate far down leaves the running sums to
    // cancellation; re-anchor on the new maximum and rebuild exactly.
    const bool reanchor = total_new < 1e-3;
    double ref_new = ref;
    Vector rel_re;
    Vector unnorm_new;
    if (reanchor) {
      ref_new = proposal;
      for (Eigen::Index k = 0; k < m; ++k) {
        if (k != j) ref_new = std::max(ref_new, log_t[static_cast<std::size_t>(k)]);
      }
      rel_re.resize(m);
      for (Eigen::Index k = 0; k < m; ++k) {
        rel_re(k) = std::exp((k == j ? proposal : log_t[static_cast<std::size_t>(k)]) - ref_new);
      }
      total_new = rel_re.sum();
      Vector signed_rel(m);
      for (Eigen::Index k = 0; k < m; ++k) signed_rel(k) = sign(k) * rel_re(k);
      if (use_likelihood) unnorm_new = f * signed_rel;
    } else if (use_likelihood) {
      unnorm_new = unnorm + (sign(j) * delta) * f.col(j);
    }
    double lr = rho * (proposal - u) - (std::exp(proposal) - std::exp(u));
    double rss_new = rss;
    if (use_likelihood) {
      candidate = y - (scale / total_new) * unnorm_new;
      rss_new = candidate.squaredNorm();
      lr += -0.5 * phi * (rss_new - rss);
    }
    require_finite(lr, "T");
    if (mh_accept(lr, rng)) {
      accepted[static_cast<std::size_t>(j)] = true;
      u = proposal;
      if (reanchor) {
        ref = ref_new;
        rel = std::move(rel_re);
      } else {
        rel(j) = rel_new;
      }
      total = total_new;
      if (use_likelihood) unnorm = std::move(unnorm_new);
      rss = rss_new;
    }
  }
  return accepted;
}

}  // namespace bagg::detail
