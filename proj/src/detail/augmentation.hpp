#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "bagg/mcmc.hpp"
#include "bagg/random.hpp"
#include "bagg/types.hpp"

namespace bagg::detail {

constexpr double kMaxLogT = 700.0;

// sum_j (rho - 1) u_j - exp(u_j) + u_j: the Gamma(rho, 1) log prior of T = exp(u)
// plus the log-scale proposal correction. Normalizing constants cancel in ratios.
inline double log_T_target(std::span<const double> log_t, double rho) {
  double acc = 0.0;
  for (double u : log_t) {
    if (u > kMaxLogT) throw NumericFailure("log T exceeded " + std::to_string(kMaxLogT));
    acc += rho * u - std::exp(u);
  }
  return acc;
}

// T_j / sum_k T_k evaluated from log T.
inline Vector normalized_weights(std::span<const double> log_t) {
  double top = log_t[0];
  for (double u : log_t) top = std::max(top, u);
  Vector w(static_cast<Eigen::Index>(log_t.size()));
  for (std::size_t j = 0; j < log_t.size(); ++j) w(static_cast<Eigen::Index>(j)) = std::exp(log_t[j] - top);
  return w / w.sum();
}

// True when some coordinate lies beyond kMaxLogT, where the prior density underflows.
inline bool beyond_prior_support(std::span<const double> log_t) {
  for (double u : log_t) {
    if (u > kMaxLogT) return true;
  }
  return false;
}

inline std::vector<double> propose_log_T(std::span<const double> log_t, double beta, Rng& rng) {
  std::vector<double> out(log_t.begin(), log_t.end());
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (double& v : out) v += beta * u(rng);
  return out;
}

inline void require_finite(double log_ratio, const char* block) {
  if (!std::isfinite(log_ratio)) {
    throw NumericFailure(std::string("non-finite log acceptance ratio in ") + block + " update");
  }
}

}  // namespace bagg::detail

namespace bagg::detail {

// Coordinate-wise random-walk sweep over log T for a model with fitted values
// scale * F (signs .* T) / sum(T). Empty `signs` means all +1. Each proposal
// log T_j + betas[j] * U(-0.5, 0.5) is accepted or rejected on its own; the
// unnormalized fit is updated in O(n) per coordinate. Returns one accept flag
// per coordinate.
std::vector<bool> coordinate_log_T_sweep(std::vector<double>& log_t, std::span<const int> signs,
                                         double scale, double phi, double rho, const Vector& y,
                                         const Matrix& f, bool use_likelihood,
                                         std::span<const double> betas, Rng& rng);

// Log T refresh shared by both samplers: an optional joint move with one
// tuned step (block "T") followed by an optional coordinate sweep with one
// tuned step per coordinate (block "T_coord"). Counts cover recorded
// iterations only.
class LogTRefresh {
 public:
  LogTRefresh(bool joint, bool coordinate, std::size_t dim, double initial, double target,
              int window, bool adapt)
      : joint_(joint), coordinate_(coordinate),
        joint_tuner_(make_tuners(1, initial, target, window, adapt)),
        coord_tuners_(make_tuners(coordinate ? dim : 0, initial, target, window, adapt)) {}

  // joint_move(beta) -> bool; sweep(steps) -> std::vector<bool>.
  template <class JointMove, class Sweep>
  void run(JointMove&& joint_move, Sweep&& sweep, bool record) {
    if (joint_) {
      const bool ok = joint_move(joint_tuner_[0].step());
      joint_tuner_[0].record(ok);
      if (record) {
        ++joint_block_.proposed;
        joint_block_.accepted += ok ? 1 : 0;
      }
    }
    if (coordinate_) {
      const auto flags = sweep(current_steps(coord_tuners_));
      for (std::size_t j = 0; j < flags.size(); ++j) {
        coord_tuners_[j].record(static_cast<bool>(flags[j]));
        if (record) {
          ++coord_block_.proposed;
          coord_block_.accepted += flags[j] ? 1 : 0;
        }
      }
    }
  }

  void freeze() {
    freeze_all(joint_tuner_);
    freeze_all(coord_tuners_);
  }

  void append_blocks(std::vector<BlockAcceptance>& out) const {
    if (joint_) {
      BlockAcceptance b = joint_block_;
      b.steps = current_steps(joint_tuner_);
      out.push_back(std::move(b));
    }
    if (coordinate_) {
      BlockAcceptance b = coord_block_;
      b.steps = current_steps(coord_tuners_);
      out.push_back(std::move(b));
    }
  }

 private:
  bool joint_;
  bool coordinate_;
  std::vector<StepTuner> joint_tuner_;
  std::vector<StepTuner> coord_tuners_;
  BlockAcceptance joint_block_{"T"};
  BlockAcceptance coord_block_{"T_coord"};
};

}  // namespace bagg::detail
