#include "bagg/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bagg {

const BlockAcceptance& PosteriorSamples::block(const std::string& name) const {
  for (const auto& b : acceptance) {
    if (b.block == name) return b;
  }
  throw std::out_of_range("no acceptance record for block " + name);
}

Vector PosteriorSamples::mean() const { return draws.colwise().mean().transpose(); }

bool operator==(const PosteriorSamples& a, const PosteriorSamples& b) {
  return a.seed == b.seed && a.draws.rows() == b.draws.rows() && a.draws.cols() == b.draws.cols() &&
         a.draws == b.draws && a.phi == b.phi && a.acceptance == b.acceptance;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<CoordinateSummary> summarize_posterior(const PosteriorSamples& samples, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  if (samples.size() < 100) throw std::invalid_argument("at least 100 stored draws are required");
  const double tail = (1.0 - level) / 2.0;
  std::vector<CoordinateSummary> out;
  out.reserve(static_cast<std::size_t>(samples.dim()));
  std::vector<double> column(static_cast<std::size_t>(samples.size()));
  for (int j = 0; j < samples.dim(); ++j) {
    for (int t = 0; t < samples.size(); ++t) column[static_cast<std::size_t>(t)] = samples.draws(t, j);
    const double mean = samples.draws.col(j).mean();
    std::sort(column.begin(), column.end());
    out.push_back({mean, quantile_sorted(column, 0.5), quantile_sorted(column, tail),
                   quantile_sorted(column, 1.0 - tail)});
  }
  return out;
}

Vector posterior_medians(const PosteriorSamples& samples) {
  if (samples.size() < 1) throw std::invalid_argument("no stored draws");
  Vector med(samples.dim());
  std::vector<double> column(static_cast<std::size_t>(samples.size()));
  for (int j = 0; j < samples.dim(); ++j) {
    for (int t = 0; t < samples.size(); ++t) column[static_cast<std::size_t>(t)] = samples.draws(t, j);
    std::sort(column.begin(), column.end());
    med(j) = quantile_sorted(column, 0.5);
  }
  return med;
}

StepTuner::StepTuner(double initial, double target, int window, double gain)
    : step_(initial), target_(target), window_(window), gain_(gain) {
  if (!(initial > 0.0)) throw std::invalid_argument("initial step must be positive");
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target rate must lie in (0, 1)");
  if (window < 1) throw std::invalid_argument("tuning window must be positive");
}

void StepTuner::record(int accepted, int proposed) {
  if (frozen_) return;
  ++seen_;
  accepted_ += accepted;
  proposed_ += proposed;
  if (seen_ == window_) {
    if (proposed_ > 0) {
      const double rate = static_cast<double>(accepted_) / static_cast<double>(proposed_);
      step_ *= std::exp(gain_ * (rate - target_));
    }
    seen_ = 0;
    accepted_ = 0;
    proposed_ = 0;
  }
}

std::vector<StepTuner> make_tuners(std::size_t count, double initial, double target, int window,
                                   bool adapt) {
  std::vector<StepTuner> out(count, StepTuner(initial, target, window));
  if (!adapt) freeze_all(out);
  return out;
}

std::vector<double> current_steps(const std::vector<StepTuner>& tuners) {
  std::vector<double> out;
  out.reserve(tuners.size());
  for (const auto& t : tuners) out.push_back(t.step());
  return out;
}

void freeze_all(std::vector<StepTuner>& tuners) {
  for (auto& t : tuners) t.freeze();
}

bool mh_accept(double log_ratio, Rng& rng) {
  if (log_ratio >= 0.0) return true;
  return std::log(uniform_open0(rng)) < log_ratio;
}

double residual_ss(const Vector& y, const Matrix& f, const Vector& coef) {
  return (y - f * coef).squaredNorm();
}

void check_regression_inputs(const Vector& y, const Matrix& f) {
  if (f.rows() != y.size()) throw std::invalid_argument("prediction matrix rows must match response length");
  if (f.rows() < 2) throw std::invalid_argument("at least 2 observations are required");
  if (f.cols() < 1) throw std::invalid_argument("at least 1 predictor is required");
  if (!y.allFinite()) throw std::invalid_argument("response contains non-finite values");
  if (!f.allFinite()) throw std::invalid_argument("prediction matrix contains non-finite values");
}

}  // namespace bagg
