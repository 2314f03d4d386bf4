#include "bagg/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bagg/io.hpp"
#include "bagg/pipeline.hpp"
#include "bagg/sampler_ca.hpp"
#include "bagg/sampler_la.hpp"

namespace bagg {

double rmse(const Vector& predictions, const Vector& truth) {
  if (predictions.size() != truth.size()) throw std::invalid_argument("rmse: length mismatch");
  if (predictions.size() < 1) throw std::invalid_argument("rmse: empty input");
  return std::sqrt((predictions - truth).squaredNorm() / static_cast<double>(truth.size()));
}

std::vector<double> MethodReport::values() const {
  std::vector<double> out;
  for (const auto& r : replicates) {
    if (r.rmse) out.push_back(*r.rmse);
  }
  return out;
}

MethodReport summarize_method(std::string method, std::vector<ReplicateScore> replicates) {
  MethodReport m;
  m.method = std::move(method);
  m.replicates = std::move(replicates);
  const auto v = m.values();
  m.failures = static_cast<int>(m.replicates.size() - v.size());
  if (!v.empty()) m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() >= 2) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return m;
}

const MethodReport& RmseReport::method(const std::string& name) const {
  for (const auto& m : methods) {
    if (m.method == name) return m;
  }
  throw std::out_of_range("no results for method " + name);
}

namespace {

// Keeps messages on one CSV field.
std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  }
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument(std::string("cannot parse ") + what + " '" + s + "'");
  }
  return v;
}

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::uint64_t pair_hash(const SimData& d) {
  std::uint64_t h = d.train.hash();
  h ^= d.test.hash() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

bool is_linear(SimModel m) { return m != SimModel::kNonlinear; }

}  // namespace

std::string report_to_csv(const RmseReport& report) {
  std::string out = "method,replicate,data_hash,rmse,status\n";
  for (const auto& m : report.methods) {
    for (const auto& r : m.replicates) {
      out += m.method + "," + std::to_string(r.replicate) + "," + std::to_string(r.data_hash) + "," +
             optional_field(r.rmse) + "," + (r.rmse ? std::string("ok") : "failed: " + sanitize(r.error)) + "\n";
    }
  }
  return out;
}

RmseReport report_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "method,replicate,data_hash,rmse,status") {
    throw std::invalid_argument("unexpected report header");
  }
  std::vector<std::string> order;
  std::map<std::string, std::vector<ReplicateScore>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != 5) throw std::invalid_argument("report row has " + std::to_string(f.size()) + " fields");
    ReplicateScore s;
    s.replicate = parse_number<int>(f[1], "replicate");
    s.data_hash = parse_number<std::uint64_t>(f[2], "data hash");
    if (f[4] == "ok") {
      s.rmse = parse_number<double>(f[3], "rmse");
    } else if (f[4].rfind("failed: ", 0) == 0) {
      s.error = f[4].substr(8);
    } else {
      throw std::invalid_argument("unknown status '" + f[4] + "'");
    }
    if (!rows.count(f[0])) order.push_back(f[0]);
    rows[f[0]].push_back(std::move(s));
  }
  RmseReport report;
  for (const auto& name : order) report.methods.push_back(summarize_method(name, rows[name]));
  return report;
}

std::string summary_to_csv(const RmseReport& report) {
  std::string out = "method,replicates,failures,mean,sd\n";
  for (const auto& m : report.methods) {
    const bool any = m.failures < static_cast<int>(m.replicates.size());
    out += m.method + "," + std::to_string(m.replicates.size()) + "," + std::to_string(m.failures) + "," +
           (any ? format_double(m.mean) : std::string()) + "," + optional_field(m.sd) + "\n";
  }
  return out;
}

ExternalPredictions read_external_predictions(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "method,replicate,row,prediction") {
    throw std::invalid_argument(path.string() + ": expected header method,replicate,row,prediction");
  }
  std::map<std::string, std::map<int, std::map<int, double>>> raw;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != 4) throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": expected 4 fields");
    const int rep = parse_number<int>(f[1], "replicate");
    const int row = parse_number<int>(f[2], "row");
    if (row < 0) throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": negative row");
    raw[f[0]][rep][row] = parse_number<double>(f[3], "prediction");
  }
  ExternalPredictions out;
  for (const auto& [method, reps] : raw) {
    for (const auto& [rep, rows] : reps) {
      Vector v(static_cast<Eigen::Index>(rows.size()));
      int expect = 0;
      for (const auto& [row, value] : rows) {
        if (row != expect++) throw std::invalid_argument(path.string() + ": rows for " + method + " are not 0..n-1");
        v(row) = value;
      }
      out[method][rep] = std::move(v);
    }
  }
  return out;
}

void BenchmarkConfig::validate() const {
  sim.validate();
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (methods.empty() && external.empty()) throw std::invalid_argument("no methods to run");
  DirichletHyper(alpha, gamma, std::max(sim.dim, 1));
  if (burn_in < 0 || burn_in >= n_iter) throw std::invalid_argument("need 0 <= burn_in < iters");
  for (const auto& m : methods) {
    const bool known = is_linear(sim.model) ? (m == "la" || m == "ca")
                                            : (m == "la" || m == "ca" || m == "best" || m == "voting");
    if (!known) {
      throw std::invalid_argument("method '" + m + "' is not available for model " + model_name(sim.model));
    }
    if (external.count(m)) throw std::invalid_argument("external method name '" + m + "' clashes with a built-in");
  }
}

SimData replicate_data(const BenchmarkConfig& config, int replicate) {
  SimSpec spec = config.sim;
  spec.seed = config.seed + static_cast<std::uint64_t>(replicate);
  return generate(spec);
}

PosteriorSamples replicate_chain_la(const BenchmarkConfig& config, const SimData& data, int replicate) {
  const int m = static_cast<int>(data.train.features());
  LaHyper h = LaHyper::defaults(m);
  h.dirichlet = DirichletHyper(config.alpha, config.gamma, m);
  h.n_iter = config.n_iter;
  h.burn_in = config.burn_in;
  return run_chain_la(data.train.y, data.train.x, h, derive_seed(config.seed + static_cast<std::uint64_t>(replicate), 2));
}

namespace {

std::vector<std::string> all_methods(const BenchmarkConfig& config) {
  std::vector<std::string> out = config.methods;
  for (const auto& [name, _] : config.external) out.push_back(name);
  return out;
}

// Scores every method on replicate r; failures are captured per method.
std::vector<ReplicateScore> run_replicate(const BenchmarkConfig& config, int r) {
  const auto methods = all_methods(config);
  std::vector<ReplicateScore> scores(methods.size());
  for (auto& s : scores) s.replicate = r;
  SimData data;
  try {
    data = replicate_data(config, r);
  } catch (const std::exception& e) {
    for (auto& s : scores) s.error = sanitize(std::string("data generation: ") + e.what());
    return scores;
  }
  const std::uint64_t hash = pair_hash(data);
  for (auto& s : scores) s.data_hash = hash;
  const std::uint64_t rep_seed = config.seed + static_cast<std::uint64_t>(r);

  // Nonlinear pipeline: learners are fitted once and shared by all methods.
  std::optional<FittedLearners> fitted;
  Matrix f_test;
  std::string fit_error;
  if (!is_linear(config.sim.model) && !config.methods.empty()) {
    try {
      const auto learners = default_learners(static_cast<int>(data.train.features()), data.train.rows(),
                                             config.learner_subsets, rep_seed);
      fitted = fit_learners(data.train, learners, config.split_frac, rep_seed);
      f_test = build_prediction_matrix(fitted->refit, fitted->ids, data.test.x);
    } catch (const std::exception& e) {
      fit_error = std::string("learners: ") + e.what();
    }
  }

  for (std::size_t k = 0; k < methods.size(); ++k) {
    const std::string& name = methods[k];
    try {
      Vector pred;
      if (config.external.count(name)) {
        const auto& reps = config.external.at(name);
        const auto it = reps.find(r);
        if (it == reps.end()) throw std::invalid_argument("no external predictions for this replicate");
        if (it->second.size() != data.test.rows()) {
          throw std::invalid_argument("external predictions have " + std::to_string(it->second.size()) +
                                      " rows, test set has " + std::to_string(data.test.rows()));
        }
        pred = it->second;
      } else if (is_linear(config.sim.model)) {
        const int m = static_cast<int>(data.train.features());
        if (name == "la") {
          pred = data.test.x * posterior_medians(replicate_chain_la(config, data, r));
        } else {
          CaHyper h = CaHyper::defaults(m);
          h.dirichlet = DirichletHyper(config.alpha, config.gamma, m);
          h.n_iter = config.n_iter;
          h.burn_in = config.burn_in;
          pred = data.test.x * run_chain_ca(data.train.y, data.train.x, h, derive_seed(rep_seed, 2)).mean();
        }
      } else {
        if (!fitted) throw std::runtime_error(fit_error);
        if (name == "best") {
          double best = std::numeric_limits<double>::infinity();
          for (Eigen::Index j = 0; j < f_test.cols(); ++j) best = std::min(best, rmse(f_test.col(j), data.test.y));
          scores[k].rmse = best;
          continue;
        }
        if (name == "voting") {
          pred = f_test.rowwise().mean();
        } else {
          AggregateConfig ac;
          ac.mode = parse_mode(name);
          ac.alpha = config.alpha;
          ac.gamma = config.gamma;
          ac.n_iter = config.n_iter;
          ac.burn_in = config.burn_in;
          ac.seed = rep_seed;
          pred = aggregate_matrix(fitted->f_aggregate, fitted->split.aggregate.y, fitted->ids, ac).combine(f_test);
        }
      }
      scores[k].rmse = rmse(pred, data.test.y);
    } catch (const std::exception& e) {
      scores[k].error = sanitize(e.what());
    }
  }
  return scores;
}

RmseReport assemble(const BenchmarkConfig& config, const std::vector<std::vector<ReplicateScore>>& per_rep) {
  const auto methods = all_methods(config);
  RmseReport report;
  for (std::size_t k = 0; k < methods.size(); ++k) {
    std::vector<ReplicateScore> col;
    col.reserve(per_rep.size());
    for (const auto& rep : per_rep) col.push_back(rep[k]);
    report.methods.push_back(summarize_method(methods[k], std::move(col)));
  }
  return report;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

RmseReport run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<ReplicateScore>> per_rep(static_cast<std::size_t>(config.replicates));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < config.replicates; ++r) per_rep[static_cast<std::size_t>(r)] = run_replicate(config, r);
  RmseReport report = assemble(config, per_rep);
  report.seconds = seconds_since(start);
  return report;
}

namespace reference {

RmseReport run_benchmark_serial(const BenchmarkConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<ReplicateScore>> per_rep;
  for (int r = 0; r < config.replicates; ++r) per_rep.push_back(run_replicate(config, r));
  RmseReport report = assemble(config, per_rep);
  report.seconds = seconds_since(start);
  return report;
}

}  // namespace reference

GammaSweep gamma_sensitivity(const BenchmarkConfig& config, const std::vector<double>& gammas) {
  if (gammas.empty()) throw std::invalid_argument("gamma grid is empty");
  GammaSweep sweep;
  for (double g : gammas) {
    if (std::find(sweep.gammas.begin(), sweep.gammas.end(), g) != sweep.gammas.end()) {
      throw std::invalid_argument("gamma grid has duplicates");
    }
    BenchmarkConfig c = config;
    c.gamma = g;
    sweep.gammas.push_back(g);
    sweep.reports.push_back(run_benchmark(c));
  }
  return sweep;
}

std::pair<double, double> GammaSweep::paired_difference(const std::string& method, double a, double b) const {
  auto find = [&](double g) -> const MethodReport& {
    for (std::size_t k = 0; k < gammas.size(); ++k) {
      if (gammas[k] == g) return reports[k].method(method);
    }
    throw std::out_of_range("gamma " + format_double(g) + " is not in the sweep");
  };
  const auto& ra = find(a);
  const auto& rb = find(b);
  std::vector<double> d;
  for (std::size_t r = 0; r < std::min(ra.replicates.size(), rb.replicates.size()); ++r) {
    if (ra.replicates[r].rmse && rb.replicates[r].rmse) d.push_back(*ra.replicates[r].rmse - *rb.replicates[r].rmse);
  }
  if (d.size() < 2) throw std::invalid_argument("fewer than 2 paired replicates");
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(d.size() - 1));
  return {mean, sd / std::sqrt(static_cast<double>(d.size()))};
}

std::string gamma_sweep_to_csv(const GammaSweep& sweep) {
  std::string out = "gamma,method,replicate,data_hash,rmse,status\n";
  for (std::size_t k = 0; k < sweep.gammas.size(); ++k) {
    for (const auto& m : sweep.reports[k].methods) {
      for (const auto& r : m.replicates) {
        out += format_double(sweep.gammas[k]) + "," + m.method + "," + std::to_string(r.replicate) + "," +
               std::to_string(r.data_hash) + "," + optional_field(r.rmse) + "," +
               (r.rmse ? std::string("ok") : "failed: " + sanitize(r.error)) + "\n";
      }
    }
  }
  return out;
}

std::string gamma_summary_to_csv(const GammaSweep& sweep, double reference_gamma) {
  const bool has_ref = std::find(sweep.gammas.begin(), sweep.gammas.end(), reference_gamma) != sweep.gammas.end();
  std::string out = "gamma,method,replicates,failures,mean,sd,diff_vs_ref,paired_se\n";
  for (std::size_t k = 0; k < sweep.gammas.size(); ++k) {
    for (const auto& m : sweep.reports[k].methods) {
      std::string diff, se;
      if (has_ref && sweep.gammas[k] != reference_gamma) {
        try {
          const auto [d, s] = sweep.paired_difference(m.method, sweep.gammas[k], reference_gamma);
          diff = format_double(d);
          se = format_double(s);
        } catch (const std::invalid_argument&) {
          // Too few paired successes; leave the fields empty.
        }
      }
      const bool any = m.failures < static_cast<int>(m.replicates.size());
      out += format_double(sweep.gammas[k]) + "," + m.method + "," + std::to_string(m.replicates.size()) + "," +
             std::to_string(m.failures) + "," + (any ? format_double(m.mean) : std::string()) + "," +
             optional_field(m.sd) + "," + diff + "," + se + "\n";
    }
  }
  return out;
}

void ContractionConfig::validate() const {
  if (!is_linear(model)) throw std::invalid_argument("contraction study needs a linear model");
  if (ns.size() < 4) throw std::invalid_argument("contraction study needs at least 4 sample sizes");
  for (int n : ns) {
    if (n < 4) throw std::invalid_argument("sample sizes must be >= 4");
  }
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (burn_in < 0 || burn_in >= n_iter) throw std::invalid_argument("need 0 <= burn_in < iters");
  DirichletHyper(alpha, gamma, dim);
  SimSpec probe;
  probe.model = model;
  probe.dim = dim;
  probe.validate();
  Vector truth = model == SimModel::kSparse ? sparse_coefficients(dim)
                 : model == SimModel::kNonSparse1 ? ns1_coefficients(dim)
                                                  : ns2_coefficients(dim);
  const auto nnz = (truth.array() != 0.0).count();
  if (nnz != sparsity) {
    throw std::invalid_argument("model " + model_name(model) + " at M=" + std::to_string(dim) + " has " +
                                std::to_string(nnz) + " nonzero coefficients, not " + std::to_string(sparsity));
  }
}

std::vector<double> posterior_prediction_errors(const PosteriorSamples& samples, const Matrix& f,
                                                const Vector& truth) {
  if (f.cols() != samples.dim() || truth.size() != samples.dim()) {
    throw std::invalid_argument("dimension mismatch in prediction error");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(f.rows()));
  const Matrix diff = f * (samples.draws.transpose().colwise() - truth);
  std::vector<double> out(static_cast<std::size_t>(samples.size()));
  for (int t = 0; t < samples.size(); ++t) out[static_cast<std::size_t>(t)] = scale * diff.col(t).norm();
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("slope undefined for constant x");
  return sxy / sxx;
}

namespace {

double contraction_cell(const ContractionConfig& config, std::size_t k, int r) {
  SimSpec spec;
  spec.model = config.model;
  spec.dim = config.dim;
  spec.n_train = config.ns[k];
  spec.n_test = 1;
  spec.disable_noise = config.disable_noise;
  spec.seed = config.seed + static_cast<std::uint64_t>(r) + 1000003ull * k;
  const SimData data = generate(spec);
  LaHyper h = LaHyper::defaults(config.dim);
  h.dirichlet = DirichletHyper(config.alpha, config.gamma, config.dim);
  h.n_iter = config.n_iter;
  h.burn_in = config.burn_in;
  const auto samples = run_chain_la(data.train.y, data.train.x, h, derive_seed(spec.seed, 2));
  const auto e = posterior_prediction_errors(samples, data.train.x, data.coefficients);
  return std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
}

ContractionResult finish_contraction(const ContractionConfig& config, std::vector<std::vector<double>> errors) {
  ContractionResult out;
  out.ns = config.ns;
  out.errors = std::move(errors);
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < out.ns.size(); ++k) {
    const auto& e = out.errors[k];
    const double mean = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
    double ss = 0.0;
    for (double v : e) ss += (v - mean) * (v - mean);
    const double se = e.size() > 1 ? std::sqrt(ss / static_cast<double>(e.size() - 1) / static_cast<double>(e.size())) : 0.0;
    out.mean_error.push_back(mean);
    out.se_error.push_back(se);
    lx.push_back(std::log(static_cast<double>(out.ns[k])));
    ly.push_back(std::log(mean));
  }
  out.slope = fit_slope(lx, ly);
  return out;
}

}  // namespace

ContractionResult contraction_study(const ContractionConfig& config) {
  config.validate();
  const auto kn = config.ns.size();
  const auto reps = static_cast<std::size_t>(config.replicates);
  std::vector<std::vector<double>> errors(kn, std::vector<double>(reps));
  const auto cells = static_cast<std::ptrdiff_t>(kn * reps);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < cells; ++c) {
    // Largest n first so the long cells do not end up last.
    const auto k = kn - 1 - static_cast<std::size_t>(c) / reps;
    const auto r = static_cast<std::size_t>(c) % reps;
    errors[k][r] = contraction_cell(config, k, static_cast<int>(r));
  }
  return finish_contraction(config, std::move(errors));
}

namespace reference {

ContractionResult contraction_study_serial(const ContractionConfig& config) {
  config.validate();
  std::vector<std::vector<double>> errors(config.ns.size());
  for (std::size_t k = 0; k < config.ns.size(); ++k) {
    for (int r = 0; r < config.replicates; ++r) errors[k].push_back(contraction_cell(config, k, r));
  }
  return finish_contraction(config, std::move(errors));
}

}  // namespace reference

std::string contraction_to_csv(const ContractionResult& result) {
  std::string out = "n,replicate,error\n";
  for (std::size_t k = 0; k < result.ns.size(); ++k) {
    for (std::size_t r = 0; r < result.errors[k].size(); ++r) {
      out += std::to_string(result.ns[k]) + "," + std::to_string(r) + "," + format_double(result.errors[k][r]) + "\n";
    }
  }
  return out;
}

std::string contraction_summary_to_csv(const ContractionResult& result) {
  std::string out = "n,mean_error,se,slope\n";
  for (std::size_t k = 0; k < result.ns.size(); ++k) {
    out += std::to_string(result.ns[k]) + "," + format_double(result.mean_error[k]) + "," +
           format_double(result.se_error[k]) + "," + format_double(result.slope) + "\n";
  }
  return out;
}

void export_diagnostics(const PosteriorSamples& samples, const std::vector<std::string>& names,
                        const std::filesystem::path& dir, double level) {
  if (samples.size() < 1) throw std::invalid_argument("no draws to export");
  if (!names.empty() && static_cast<int>(names.size()) != samples.dim()) {
    throw std::invalid_argument("one name per coordinate is required");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw std::runtime_error("cannot create directory " + dir.string());
  auto name = [&](int j) { return names.empty() ? std::to_string(j + 1) : names[static_cast<std::size_t>(j)]; };

  std::string trace = "coordinate,iteration,value\n";
  for (int j = 0; j < samples.dim(); ++j) {
    for (int t = 0; t < samples.size(); ++t) {
      trace += name(j) + "," + std::to_string(t) + "," + format_double(samples.draws(t, j)) + "\n";
    }
  }
  write_file_atomic(dir / "trace.csv", trace);

  std::string intervals = "coordinate,lo,median,hi,mean\n";
  if (samples.size() >= 100) {
    const auto s = summarize_posterior(samples, level);
    for (int j = 0; j < samples.dim(); ++j) {
      const auto& c = s[static_cast<std::size_t>(j)];
      intervals += name(j) + "," + format_double(c.lo) + "," + format_double(c.median) + "," + format_double(c.hi) +
                   "," + format_double(c.mean) + "\n";
    }
  }
  write_file_atomic(dir / "intervals.csv", intervals);

  std::string acceptance = "block,accepted,proposed,rate\n";
  for (const auto& b : samples.acceptance) {
    acceptance += b.block + "," + std::to_string(b.accepted) + "," + std::to_string(b.proposed) + "," +
                  format_double(b.rate()) + "\n";
  }
  write_file_atomic(dir / "acceptance.csv", acceptance);
}

}  // namespace bagg
