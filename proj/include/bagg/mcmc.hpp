#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bagg/random.hpp"
#include "bagg/types.hpp"

namespace bagg {

struct BlockAcceptance {
  std::string block;
  std::int64_t accepted = 0;
  std::int64_t proposed = 0;
  std::vector<double> steps{};  // frozen step size(s) used after burn-in

  double rate() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
  friend bool operator==(const BlockAcceptance&, const BlockAcceptance&) = default;
};

// Post-burn-in draws of a chain. Rows of `draws` are coefficient vectors
// (simplex weights for convex aggregation, signed coefficients for linear).
// Acceptance counts cover the post-burn-in iterations only.
struct PosteriorSamples {
  Matrix draws;
  std::vector<double> phi;
  std::vector<BlockAcceptance> acceptance;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(draws.rows()); }
  int dim() const { return static_cast<int>(draws.cols()); }
  const BlockAcceptance& block(const std::string& name) const;
  Vector mean() const;
};

bool operator==(const PosteriorSamples& a, const PosteriorSamples& b);

struct CoordinateSummary {
  double mean;
  double median;
  double lo;
  double hi;
};

// Empirical quantile with linear interpolation between order statistics
// (h = (N - 1) p). `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double p);

// Per-coordinate mean, median and equal-tailed `level` credible interval.
// Requires at least 100 draws.
std::vector<CoordinateSummary> summarize_posterior(const PosteriorSamples& samples, double level);

Vector posterior_medians(const PosteriorSamples& samples);

// Windowed stochastic-approximation tuning of a random-walk step: after every
// `window` iterations, step *= exp(gain * (rate - target)) where rate is the
// acceptance frequency of the proposals made in that window.
class StepTuner {
 public:
  explicit StepTuner(double initial, double target = 0.4, int window = 50, double gain = 1.0);

  void record(bool accepted) { record(accepted ? 1 : 0, 1); }
  // One iteration that made `proposed` proposals.
  void record(int accepted, int proposed);
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  double step() const { return step_; }

 private:
  double step_;
  double target_;
  int window_;
  double gain_;
  int seen_ = 0;
  long accepted_ = 0;
  long proposed_ = 0;
  bool frozen_ = false;
};

struct MhStep {
  bool accepted;
  double log_ratio;
};

// One tuner per coordinate, all starting from `initial`.
std::vector<StepTuner> make_tuners(std::size_t count, double initial, double target, int window,
                                   bool adapt);
std::vector<double> current_steps(const std::vector<StepTuner>& tuners);
void freeze_all(std::vector<StepTuner>& tuners);

// Accept with probability min(1, exp(log_ratio)).
bool mh_accept(double log_ratio, Rng& rng);

// Residual sum of squares of y - F * coef.
double residual_ss(const Vector& y, const Matrix& f, const Vector& coef);

void check_regression_inputs(const Vector& y, const Matrix& f);

}  // namespace bagg
