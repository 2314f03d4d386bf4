#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bagg/mcmc.hpp"
#include "bagg/simgen.hpp"

namespace bagg {

// Root mean squared error; lengths must agree and be >= 1.
double rmse(const Vector& predictions, const Vector& truth);

struct ReplicateScore {
  int replicate = 0;
  std::uint64_t data_hash = 0;
  std::optional<double> rmse;  // absent when the method failed
  std::string error;

  friend bool operator==(const ReplicateScore&, const ReplicateScore&) = default;
};

struct MethodReport {
  std::string method;
  std::vector<ReplicateScore> replicates;
  int failures = 0;
  double mean = 0.0;
  std::optional<double> sd;  // denominator (count - 1); absent below 2 successes

  std::vector<double> values() const;  // successful RMSEs in replicate order
  friend bool operator==(const MethodReport&, const MethodReport&) = default;
};

// Recomputes failures, mean and sd from the per-replicate scores.
MethodReport summarize_method(std::string method, std::vector<ReplicateScore> replicates);

struct RmseReport {
  std::vector<MethodReport> methods;
  double seconds = 0.0;  // wall clock; kept out of the CSV files

  const MethodReport& method(const std::string& name) const;
  // Equality ignores `seconds`.
  friend bool operator==(const RmseReport& a, const RmseReport& b) { return a.methods == b.methods; }
};

// Per-replicate rows: method,replicate,data_hash,rmse,status.
std::string report_to_csv(const RmseReport& report);
RmseReport report_from_csv(const std::string& text);
// One row per method: method,replicates,failures,mean,sd.
std::string summary_to_csv(const RmseReport& report);

// Predictions made elsewhere for the test rows of each replicate, keyed by
// method then replicate. CSV header: method,replicate,row,prediction.
using ExternalPredictions = std::map<std::string, std::map<int, Vector>>;
ExternalPredictions read_external_predictions(const std::filesystem::path& path);

struct BenchmarkConfig {
  SimSpec sim;  // sim.seed is ignored; replicate r uses seed + r
  // Linear models: la, ca. Nonlinear model: ca, la, best, voting.
  std::vector<std::string> methods{"la"};
  int replicates = 20;
  std::uint64_t seed = 1;
  double alpha = 1.0;
  double gamma = 2.0;
  int n_iter = 2000;
  int burn_in = 1000;
  int learner_subsets = 20;  // additive cubic learners in the nonlinear pipeline
  double split_frac = 0.75;
  ExternalPredictions external;

  void validate() const;
};

// Data for replicate r: sim with seed = config.seed + r.
SimData replicate_data(const BenchmarkConfig& config, int replicate);

// Replicates run in parallel; results do not depend on the thread count.
RmseReport run_benchmark(const BenchmarkConfig& config);

// Linear-model LA chain for one replicate, as used by run_benchmark.
PosteriorSamples replicate_chain_la(const BenchmarkConfig& config, const SimData& data, int replicate);

struct GammaSweep {
  std::vector<double> gammas;
  std::vector<RmseReport> reports;  // one per gamma, same data stream

  // Mean and standard error of the per-replicate differences
  // rmse(gamma a) - rmse(gamma b) for `method`, over replicates where both succeeded.
  std::pair<double, double> paired_difference(const std::string& method, double a, double b) const;
};

GammaSweep gamma_sensitivity(const BenchmarkConfig& config, const std::vector<double>& gammas);

// Rows gamma,method,replicate,data_hash,rmse,status.
std::string gamma_sweep_to_csv(const GammaSweep& sweep);
// Rows gamma,method,replicates,failures,mean,sd,diff_vs_ref,paired_se against `reference_gamma`.
std::string gamma_summary_to_csv(const GammaSweep& sweep, double reference_gamma);

struct ContractionConfig {
  SimModel model = SimModel::kSparse;
  int dim = 100;
  int sparsity = 5;  // nonzero coefficients the model is expected to have
  std::vector<int> ns{100, 200, 400, 800};
  int replicates = 20;
  std::uint64_t seed = 1;
  double alpha = 1.0;
  double gamma = 2.0;
  int n_iter = 2000;
  int burn_in = 1000;
  bool disable_noise = false;  // test hook

  void validate() const;
};

struct ContractionResult {
  std::vector<int> ns;
  // errors[k][r]: mean over draws of ||F (theta - theta*)|| / sqrt(n) at ns[k], replicate r.
  std::vector<std::vector<double>> errors;
  std::vector<double> mean_error;
  std::vector<double> se_error;
  double slope = 0.0;  // least squares of log mean_error on log n
};

// Posterior prediction error of LA draws, one entry per draw.
std::vector<double> posterior_prediction_errors(const PosteriorSamples& samples, const Matrix& f,
                                                const Vector& truth);

ContractionResult contraction_study(const ContractionConfig& config);

std::string contraction_to_csv(const ContractionResult& result);
std::string contraction_summary_to_csv(const ContractionResult& result);

// Least-squares slope of y on x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// trace.csv (coordinate,iteration,value), intervals.csv
// (coordinate,lo,median,hi,mean) and acceptance.csv
// (block,accepted,proposed,rate). Files are replaced atomically.
void export_diagnostics(const PosteriorSamples& samples, const std::vector<std::string>& names,
                        const std::filesystem::path& dir, double level = 0.95);

namespace reference {
RmseReport run_benchmark_serial(const BenchmarkConfig& config);
ContractionResult contraction_study_serial(const ContractionConfig& config);
}  // namespace reference

}  // namespace bagg
