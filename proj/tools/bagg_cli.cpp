// Command-line front end: aggregate, bench, gamma-sweep, contract,
// concentration, simulate.
// Results go to CSV files with headers; failures print one JSON line on stderr
// and exit nonzero.
#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "bagg/bench.hpp"
#include "bagg/dirichlet.hpp"
#include "bagg/io.hpp"
#include "bagg/pipeline.hpp"
#include "bagg/simgen.hpp"

namespace fs = std::filesystem;
using namespace bagg;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

void emit_error(const std::string& command, const std::string& kind, const std::string& message) {
  nlohmann::json j{{"status", "error"}, {"command", command}, {"kind", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad value in ") + what + ": '" + item + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + " is empty");
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (double v : parse_double_list(text, what)) {
    if (v != static_cast<int>(v)) throw std::invalid_argument(std::string(what) + " must hold integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw std::runtime_error("cannot create output directory " + dir);
  return p;
}

// Wall clock lives outside the CSVs so reruns stay byte-identical.
void write_timing(const fs::path& out, double seconds) {
  write_file_atomic(out / "timing.txt", "seconds " + format_double(seconds) + "\n");
}

struct Common {
  std::uint64_t seed = 1;
  int threads = omp_get_num_procs();
  double alpha = 1.0;
  double gamma = 2.0;
  int iters = 2000;
  int burnin = 1000;
  std::string out = ".";
};

void add_common(CLI::App* app, Common& c, bool with_out = true) {
  app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--alpha", c.alpha, "Dirichlet alpha")->capture_default_str();
  app->add_option("--gamma", c.gamma, "Dirichlet gamma (rho = alpha / M^gamma)")->capture_default_str();
  app->add_option("--iters", c.iters, "MCMC iterations")->capture_default_str();
  app->add_option("--burnin", c.burnin, "Burn-in iterations")->capture_default_str();
  if (with_out) app->add_option("--out", c.out, "Output directory")->capture_default_str();
}

struct SimOptions {
  std::string model = "s";
  int dim = 100;
  int n = 100;
  int ntest = 1000;
  int replicates = 20;
  std::string methods;
  int subsets = 20;
  std::string external;
};

void add_sim(CLI::App* app, SimOptions& s) {
  app->add_option("--model", s.model, "s | ns1 | ns2 | nonlin")->capture_default_str();
  app->add_option("--M,-d", s.dim, "Predictors (linear) or features (nonlin)")->capture_default_str();
  app->add_option("--n", s.n, "Training rows")->capture_default_str();
  app->add_option("--ntest", s.ntest, "Test rows")->capture_default_str();
  app->add_option("--replicates", s.replicates, "Replicates")->capture_default_str();
  app->add_option("--methods", s.methods, "Comma list; default la (linear) or ca,la,best,voting (nonlin)");
  app->add_option("--subsets", s.subsets, "Additive cubic learners (nonlin)")->capture_default_str();
  app->add_option("--external", s.external, "CSV method,replicate,row,prediction for extra methods");
}

BenchmarkConfig bench_config(const SimOptions& s, const Common& c) {
  BenchmarkConfig b;
  b.sim.model = parse_model(s.model);
  b.sim.dim = s.dim;
  b.sim.n_train = s.n;
  b.sim.n_test = s.ntest;
  b.replicates = s.replicates;
  b.seed = c.seed;
  b.alpha = c.alpha;
  b.gamma = c.gamma;
  b.n_iter = c.iters;
  b.burn_in = c.burnin;
  b.learner_subsets = s.subsets;
  if (!s.methods.empty()) {
    b.methods = parse_name_list(s.methods);
  } else if (b.sim.model == SimModel::kNonlinear) {
    b.methods = {"ca", "la", "best", "voting"};
  }
  if (!s.external.empty()) b.external = read_external_predictions(s.external);
  b.validate();
  return b;
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct AggregateOptions {
  std::string mode = "ca";
  std::string data;
  std::string pred_matrix;
  std::string test_matrix;
  double split = 0.75;
  int subsets = 20;
};

void run_aggregate(const AggregateOptions& o, const Common& c) {
  if (o.data.empty() == o.pred_matrix.empty()) {
    throw std::invalid_argument("give exactly one of --data or --pred-matrix");
  }
  if (!o.test_matrix.empty() && o.pred_matrix.empty()) {
    throw std::invalid_argument("--test-matrix goes with --pred-matrix");
  }
  const fs::path out = prepare_out(c.out);
  const auto start = std::chrono::steady_clock::now();
  AggregateConfig cfg;
  cfg.mode = parse_mode(o.mode);
  cfg.split_frac = o.split;
  cfg.alpha = c.alpha;
  cfg.gamma = c.gamma;
  cfg.n_iter = c.iters;
  cfg.burn_in = c.burnin;
  cfg.seed = c.seed;

  AggregatedModel model;
  std::string predictions = "id,prediction\n";
  if (!o.data.empty()) {
    const Dataset data = read_dataset_csv(o.data);
    const auto learners = default_learners(static_cast<int>(data.features()), data.rows(), o.subsets, c.seed);
    model = aggregate(data, learners, cfg);
    predictions = "id,y,prediction\n";
    const Vector fitted = model.predict(data.x);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      predictions += std::to_string(i) + "," + format_double(data.y(i)) + "," + format_double(fitted(i)) + "\n";
    }
    std::string split = "id,part\n";
    std::vector<std::string> part(static_cast<std::size_t>(data.rows()));
    for (auto i : model.train_rows) part[static_cast<std::size_t>(i)] = "train";
    for (auto i : model.aggregate_rows) part[static_cast<std::size_t>(i)] = "aggregate";
    for (std::size_t i = 0; i < part.size(); ++i) split += std::to_string(i) + "," + part[i] + "\n";
    write_file_atomic(out / "split.csv", split);
  } else {
    const auto rows = read_prediction_csv(o.pred_matrix);
    model = aggregate_matrix(rows.f, rows.y, rows.learners, cfg);
    if (!o.test_matrix.empty()) {
      const auto test = read_test_csv(o.test_matrix);
      if (test.learners != rows.learners) throw std::invalid_argument("test matrix columns differ from the prediction matrix");
      const auto ids = read_numeric_csv(o.test_matrix).values.col(0);
      const Vector pred = model.combine(test.f);
      for (Eigen::Index i = 0; i < pred.size(); ++i) {
        predictions += format_double(ids(i)) + "," + format_double(pred(i)) + "\n";
      }
    }
  }

  std::string weights = "learner,coefficient,mean,median,lo,hi\n";
  for (std::size_t j = 0; j < model.learner_ids.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    weights += model.learner_ids[j] + "," + format_double(model.coefficients(k));
    if (j < model.summaries.size()) {
      const auto& s = model.summaries[j];
      weights += "," + format_double(s.mean) + "," + format_double(s.median) + "," + format_double(s.lo) + "," +
                 format_double(s.hi);
    } else {
      weights += ",,,,";
    }
    weights += "\n";
  }
  write_file_atomic(out / "weights.csv", weights);
  if (!o.data.empty() || !o.test_matrix.empty()) write_file_atomic(out / "predictions.csv", predictions);
  export_diagnostics(model.samples, model.learner_ids, out);
  write_timing(out, elapsed(start));
}

void run_bench(const SimOptions& s, const Common& c) {
  const BenchmarkConfig cfg = bench_config(s, c);
  const fs::path out = prepare_out(c.out);
  const RmseReport report = run_benchmark(cfg);
  write_file_atomic(out / "rmse.csv", report_to_csv(report));
  write_file_atomic(out / "summary.csv", summary_to_csv(report));
  write_timing(out, report.seconds);
}

void run_gamma_sweep(const SimOptions& s, const Common& c, const std::string& gammas, double reference) {
  const BenchmarkConfig cfg = bench_config(s, c);
  const auto grid = parse_double_list(gammas, "--gammas");
  const fs::path out = prepare_out(c.out);
  const auto start = std::chrono::steady_clock::now();
  const GammaSweep sweep = gamma_sensitivity(cfg, grid);
  write_file_atomic(out / "gamma_sweep.csv", gamma_sweep_to_csv(sweep));
  write_file_atomic(out / "gamma_summary.csv", gamma_summary_to_csv(sweep, reference));
  write_timing(out, elapsed(start));
}

void run_contract(const std::string& model, int dim, int s, const std::string& ns, int replicates, const Common& c) {
  ContractionConfig cfg;
  cfg.model = parse_model(model);
  cfg.dim = dim;
  cfg.sparsity = s;
  cfg.ns = parse_int_list(ns, "--ns");
  cfg.replicates = replicates;
  cfg.seed = c.seed;
  cfg.alpha = c.alpha;
  cfg.gamma = c.gamma;
  cfg.n_iter = c.iters;
  cfg.burn_in = c.burnin;
  cfg.validate();
  const fs::path out = prepare_out(c.out);
  const auto start = std::chrono::steady_clock::now();
  const ContractionResult res = contraction_study(cfg);
  write_file_atomic(out / "contraction.csv", contraction_to_csv(res));
  write_file_atomic(out / "contraction_summary.csv", contraction_summary_to_csv(res));
  write_timing(out, elapsed(start));
}

void run_concentration(int dim, double alpha, double gamma, int s, double eps, std::int64_t draws,
                       std::uint64_t seed, const std::string& out) {
  const DirichletHyper hyper(alpha, gamma, dim);
  if (s < 1 || s > dim) throw std::invalid_argument("--s must lie in [1, M]");
  // lambda* spreads its mass evenly over the first s coordinates.
  std::vector<double> star(static_cast<std::size_t>(dim), 0.0);
  for (int j = 0; j < s; ++j) star[static_cast<std::size_t>(j)] = 1.0 / s;
  const auto est = estimate_concentration(hyper, SimplexWeights(star), s, eps, draws, seed);
  std::string csv = "M,alpha,gamma,rho,s,eps,draws,p_ball,se_ball,p_tail,se_tail\n";
  csv += std::to_string(dim) + "," + format_double(alpha) + "," + format_double(gamma) + "," +
         format_double(hyper.rho()) + "," + std::to_string(s) + "," + format_double(eps) + "," +
         std::to_string(est.draws_used) + "," + format_double(est.p_ball) + "," + format_double(est.se_ball) + "," +
         format_double(est.p_tail) + "," + format_double(est.se_tail) + "\n";
  if (out.empty()) {
    std::cout << csv;
  } else {
    const fs::path dir = prepare_out(out);
    write_file_atomic(dir / "concentration.csv", csv);
  }
}

std::string dataset_csv(const Dataset& d) {
  std::string csv;
  for (Eigen::Index j = 0; j < d.features(); ++j) csv += "x" + std::to_string(j + 1) + ",";
  csv += "y\n";
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.features(); ++j) csv += format_double(d.x(i, j)) + ",";
    csv += format_double(d.y(i)) + "\n";
  }
  return csv;
}

void run_simulate(const SimOptions& s, std::uint64_t seed, const std::string& out_dir) {
  SimSpec spec;
  spec.model = parse_model(s.model);
  spec.dim = s.dim;
  spec.n_train = s.n;
  spec.n_test = s.ntest;
  spec.seed = seed;
  const SimData data = generate(spec);
  const fs::path out = prepare_out(out_dir);
  write_file_atomic(out / "train.csv", dataset_csv(data.train));
  write_file_atomic(out / "test.csv", dataset_csv(data.test));
  if (data.coefficients.size() > 0) {
    std::string coef = "coordinate,coefficient\n";
    for (Eigen::Index j = 0; j < data.coefficients.size(); ++j) {
      coef += std::to_string(j + 1) + "," + format_double(data.coefficients(j)) + "\n";
    }
    write_file_atomic(out / "coefficients.csv", coef);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian convex and linear aggregation"};
  app.require_subcommand(1);

  Common agg_c;
  AggregateOptions agg_o;
  auto* agg = app.add_subcommand("aggregate", "Aggregate learners on a dataset or a prediction matrix");
  add_common(agg, agg_c);
  agg->add_option("--mode", agg_o.mode, "ca | la")->capture_default_str();
  agg->add_option("--data", agg_o.data, "Dataset CSV, response in the last column");
  agg->add_option("--pred-matrix", agg_o.pred_matrix, "CSV id,f_1..f_M,y of aggregation rows");
  agg->add_option("--test-matrix", agg_o.test_matrix, "CSV id,f_1..f_M of rows to predict");
  agg->add_option("--split", agg_o.split, "Training fraction of the split")->capture_default_str();
  agg->add_option("--subsets", agg_o.subsets, "Additive cubic learners")->capture_default_str();

  Common bench_c;
  SimOptions bench_s;
  auto* bench = app.add_subcommand("bench", "Replicated RMSE benchmark on simulated data");
  add_common(bench, bench_c);
  add_sim(bench, bench_s);

  Common sweep_c;
  SimOptions sweep_s;
  std::string gammas = "0,0.5,1,2,3,4";
  double reference_gamma = 2.0;
  auto* sweep = app.add_subcommand("gamma-sweep", "Paired RMSE comparison across gamma");
  add_common(sweep, sweep_c);
  add_sim(sweep, sweep_s);
  sweep->add_option("--gammas", gammas, "Comma list of gamma values")->capture_default_str();
  sweep->add_option("--reference", reference_gamma, "Gamma the paired differences are taken against")
      ->capture_default_str();

  Common con_c;
  std::string con_model = "s";
  int con_dim = 100;
  int con_s = 5;
  std::string con_ns = "100,200,400,800";
  int con_reps = 20;
  auto* contract = app.add_subcommand("contract", "Posterior prediction error against sample size");
  add_common(contract, con_c);
  contract->add_option("--model", con_model, "s | ns1 | ns2")->capture_default_str();
  contract->add_option("--M", con_dim, "Predictors")->capture_default_str();
  contract->add_option("--s", con_s, "Nonzero coefficients of the model")->capture_default_str();
  contract->add_option("--ns", con_ns, "Comma list of training sizes")->capture_default_str();
  contract->add_option("--replicates", con_reps, "Replicates per size")->capture_default_str();

  int cc_dim = 50;
  double cc_alpha = 1.0;
  double cc_gamma = 2.0;
  int cc_s = 1;
  double cc_eps = 0.1;
  std::int64_t cc_draws = 100000;
  std::uint64_t cc_seed = 1;
  int cc_threads = omp_get_num_procs();
  std::string cc_out;
  auto* conc = app.add_subcommand("concentration", "Monte Carlo Dirichlet concentration estimate");
  conc->add_option("--M", cc_dim, "Dimension")->capture_default_str();
  conc->add_option("--alpha", cc_alpha, "Dirichlet alpha")->capture_default_str();
  conc->add_option("--gamma", cc_gamma, "Dirichlet gamma")->capture_default_str();
  conc->add_option("--s", cc_s, "Sparsity level")->capture_default_str();
  conc->add_option("--eps", cc_eps, "Radius / tail threshold")->capture_default_str();
  conc->add_option("--draws", cc_draws, "Monte Carlo draws")->capture_default_str();
  conc->add_option("--seed", cc_seed, "Seed")->capture_default_str();
  conc->add_option("--threads", cc_threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  conc->add_option("--out", cc_out, "Output directory (stdout when omitted)");

  SimOptions sim_s;
  std::uint64_t sim_seed = 1;
  std::string sim_out = ".";
  auto* simulate = app.add_subcommand("simulate", "Write one simulated train/test pair as dataset CSVs");
  simulate->add_option("--model", sim_s.model, "s | ns1 | ns2 | nonlin")->capture_default_str();
  simulate->add_option("--M,-d", sim_s.dim, "Predictors (linear) or features (nonlin)")->capture_default_str();
  simulate->add_option("--n", sim_s.n, "Training rows")->capture_default_str();
  simulate->add_option("--ntest", sim_s.ntest, "Test rows")->capture_default_str();
  simulate->add_option("--seed", sim_seed, "Seed")->capture_default_str();
  simulate->add_option("--out", sim_out, "Output directory")->capture_default_str();

  std::string command = argc > 1 ? argv[1] : "";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error(command, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (agg->parsed()) {
      omp_set_num_threads(agg_c.threads);
      run_aggregate(agg_o, agg_c);
    } else if (bench->parsed()) {
      omp_set_num_threads(bench_c.threads);
      run_bench(bench_s, bench_c);
    } else if (sweep->parsed()) {
      omp_set_num_threads(sweep_c.threads);
      run_gamma_sweep(sweep_s, sweep_c, gammas, reference_gamma);
    } else if (contract->parsed()) {
      omp_set_num_threads(con_c.threads);
      run_contract(con_model, con_dim, con_s, con_ns, con_reps, con_c);
    } else if (conc->parsed()) {
      omp_set_num_threads(cc_threads);
      run_concentration(cc_dim, cc_alpha, cc_gamma, cc_s, cc_eps, cc_draws, cc_seed, cc_out);
    } else if (simulate->parsed()) {
      run_simulate(sim_s, sim_seed, sim_out);
    }
  } catch (const std::invalid_argument& e) {
    emit_error(command, "invalid_argument", e.what());
    return kExitUsage;
  } catch (const NumericFailure& e) {
    emit_error(command, "numeric_failure", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    emit_error(command, "runtime_error", e.what());
    return kExitRuntime;
  }
  return 0;
}
