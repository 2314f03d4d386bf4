#include <cmath>
#include <fstream>
#include <sstream>

#include "bagg/bench.hpp"
#include "bagg/io.hpp"
#include "doctest.h"
#include "test_paths.hpp"

using namespace bagg;

namespace {

BenchmarkConfig small_config() {
  BenchmarkConfig c;
  c.sim.model = SimModel::kSparse;
  c.sim.dim = 10;
  c.sim.n_train = 50;
  c.sim.n_test = 200;
  c.methods = {"la", "ca"};
  c.replicates = 3;
  c.seed = 100;
  c.n_iter = 400;
  c.burn_in = 200;
  return c;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char ch : text) n += ch == '\n';
  return n;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    rows.push_back(f);
  }
  return rows;
}

}  // namespace

TEST_CASE("rmse") {
  Vector a(2), b(2);
  a << 1.0, 2.0;
  CHECK(rmse(a, a) == 0.0);
  b << 4.0, 6.0;
  CHECK(rmse(a, b) == doctest::Approx(std::sqrt(12.5)));
  CHECK_THROWS_AS(rmse(a, Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(rmse(Vector(), Vector()), std::invalid_argument);

  // Predicting the mean on noise-free data scores the population sd of y.
  SimSpec s;
  s.model = SimModel::kSparse;
  s.dim = 5;
  s.n_test = 20000;
  s.disable_noise = true;
  const auto d = generate(s);
  const double sd = sparse_coefficients(5).norm();
  CHECK(std::abs(rmse(Vector::Constant(d.test.rows(), d.test.y.mean()), d.test.y) - sd) < 0.05);
}

TEST_CASE("report arithmetic") {
  std::vector<ReplicateScore> reps{{0, 11, 0.5, ""}, {1, 12, std::nullopt, "boom"}, {2, 13, 0.7, ""}, {3, 14, 0.9, ""}};
  const auto m = summarize_method("la", reps);
  CHECK(m.failures == 1);
  CHECK(m.mean == doctest::Approx(0.7));
  REQUIRE(m.sd.has_value());
  CHECK(*m.sd == doctest::Approx(0.2));
  CHECK(m.values() == std::vector<double>{0.5, 0.7, 0.9});
  CHECK(m.mean >= 0.5);
  CHECK(m.mean <= 0.9);

  const auto one = summarize_method("ca", {{0, 1, 0.4, ""}});
  CHECK_FALSE(one.sd.has_value());
  CHECK(one.mean == 0.4);

  RmseReport report{{m, one}, 1.5};
  const auto back = report_from_csv(report_to_csv(report));
  CHECK(back == report);
  CHECK(back.method("la").failures == 1);
  CHECK_THROWS_AS(back.method("best"), std::out_of_range);
  CHECK_THROWS_AS(report_from_csv("bad header\n"), std::invalid_argument);

  const auto rows = csv_rows(summary_to_csv(RmseReport{{one}, 0.0}));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"method", "replicates", "failures", "mean", "sd"});
  CHECK(rows[1] == std::vector<std::string>{"ca", "1", "0", "0.4", ""});
}

TEST_CASE("failure messages cannot break the csv") {
  RmseReport report{{summarize_method("ca", {{0, 1, std::nullopt, "bad, worse\nworst"}})}, 0.0};
  const auto text = report_to_csv(report);
  CHECK(count_lines(text) == 2);
  const auto back = report_from_csv(text);
  CHECK(back.method("ca").failures == 1);
}

TEST_CASE("benchmark runs") {
  const auto cfg = small_config();
  const auto report = run_benchmark(cfg);
  REQUIRE(report.methods.size() == 2);
  for (const auto& m : report.methods) {
    CHECK(m.replicates.size() == 3);
    CHECK(m.failures == 0);
    CHECK(m.mean > 0.4);
    CHECK(m.mean < 1.5);
  }
  SUBCASE("methods see identical data per replicate") {
    for (int r = 0; r < 3; ++r) {
      const auto h = report.method("la").replicates[static_cast<std::size_t>(r)].data_hash;
      CHECK(h == report.method("ca").replicates[static_cast<std::size_t>(r)].data_hash);
      CHECK(h != 0);
    }
    CHECK(report.method("la").replicates[0].data_hash != report.method("la").replicates[1].data_hash);
  }
  SUBCASE("parallel, serial and reruns agree") {
    CHECK(reference::run_benchmark_serial(cfg) == report);
    CHECK(run_benchmark(cfg) == report);
    CHECK(report_to_csv(run_benchmark(cfg)) == report_to_csv(report));
  }
  SUBCASE("one replicate leaves sd absent") {
    auto c = cfg;
    c.replicates = 1;
    c.methods = {"la"};
    const auto r = run_benchmark(c);
    CHECK_FALSE(r.method("la").sd.has_value());
    CHECK(r.method("la").replicates[0] == report.method("la").replicates[0]);
  }
}

TEST_CASE("benchmark validation") {
  auto c = small_config();
  c.methods = {"best"};
  CHECK_THROWS_AS(run_benchmark(c), std::invalid_argument);
  c = small_config();
  c.replicates = 0;
  CHECK_THROWS_AS(run_benchmark(c), std::invalid_argument);
  c = small_config();
  c.methods = {};
  CHECK_THROWS_AS(run_benchmark(c), std::invalid_argument);
  c = small_config();
  c.external["la"][0] = Vector::Zero(200);
  CHECK_THROWS_AS(run_benchmark(c), std::invalid_argument);
}

TEST_CASE("external predictions") {
  const auto dir = test_dir("external");
  auto cfg = small_config();
  cfg.methods = {"la"};
  cfg.replicates = 2;
  std::string text = "method,replicate,row,prediction\n";
  std::vector<double> expected;
  for (int r = 0; r < 2; ++r) {
    const auto data = replicate_data(cfg, r);
    for (Eigen::Index i = 0; i < data.test.rows(); ++i) {
      text += "oracle," + std::to_string(r) + "," + std::to_string(i) + "," +
              format_double(data.truth(data.test.x.row(i).transpose())) + "\n";
    }
    Vector truth(data.test.rows());
    for (Eigen::Index i = 0; i < truth.size(); ++i) truth(i) = data.truth(data.test.x.row(i).transpose());
    expected.push_back(rmse(truth, data.test.y));
  }
  // Replicate 2 has no rows: that replicate fails, the rest still run.
  write_file_atomic(dir / "ext.csv", text);
  cfg.external = read_external_predictions(dir / "ext.csv");
  cfg.replicates = 3;
  const auto report = run_benchmark(cfg);
  const auto& oracle = report.method("oracle");
  CHECK(*oracle.replicates[0].rmse == expected[0]);
  CHECK(*oracle.replicates[1].rmse == expected[1]);
  CHECK_FALSE(oracle.replicates[2].rmse.has_value());
  CHECK(oracle.failures == 1);
  CHECK(report.method("la").failures == 0);
  CHECK(oracle.replicates[0].data_hash == report.method("la").replicates[0].data_hash);

  write_file_atomic(dir / "gap.csv", "method,replicate,row,prediction\nx,0,0,1\nx,0,2,1\n");
  CHECK_THROWS_AS(read_external_predictions(dir / "gap.csv"), std::invalid_argument);
  write_file_atomic(dir / "hdr.csv", "m,r,i,p\n");
  CHECK_THROWS_AS(read_external_predictions(dir / "hdr.csv"), std::invalid_argument);
}

TEST_CASE("gamma sweeps are paired") {
  auto cfg = small_config();
  cfg.methods = {"la"};
  const auto sweep = gamma_sensitivity(cfg, {0.0, 2.0});
  REQUIRE(sweep.reports.size() == 2);
  const auto& a = sweep.reports[0].method("la");
  const auto& b = sweep.reports[1].method("la");
  std::vector<double> d;
  for (int r = 0; r < 3; ++r) {
    CHECK(a.replicates[static_cast<std::size_t>(r)].data_hash == b.replicates[static_cast<std::size_t>(r)].data_hash);
    d.push_back(*a.replicates[static_cast<std::size_t>(r)].rmse - *b.replicates[static_cast<std::size_t>(r)].rmse);
  }
  const double mean = (d[0] + d[1] + d[2]) / 3.0;
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const auto [diff, se] = sweep.paired_difference("la", 0.0, 2.0);
  CHECK(diff == doctest::Approx(mean));
  CHECK(se == doctest::Approx(std::sqrt(ss / 2.0 / 3.0)));

  const auto rows = csv_rows(gamma_summary_to_csv(sweep, 2.0));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "0");
  CHECK(rows[1][6] == format_double(diff));
  CHECK(rows[2][6].empty());
  CHECK(count_lines(gamma_sweep_to_csv(sweep)) == 1 + 2 * 3);

  const auto single = gamma_sensitivity(cfg, {2.0});
  CHECK(csv_rows(gamma_summary_to_csv(single, 2.0)).size() == 2);
  CHECK(single.reports[0] == sweep.reports[1]);
  CHECK_THROWS_AS(gamma_sensitivity(cfg, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(gamma_sensitivity(cfg, {}), std::invalid_argument);
  CHECK_THROWS_AS(sweep.paired_difference("la", 0.0, 3.0), std::out_of_range);
}

TEST_CASE("contraction study") {
  ContractionConfig c;
  c.dim = 10;
  c.ns = {40, 80, 160, 320};
  c.replicates = 2;
  c.n_iter = 600;
  c.burn_in = 300;
  SUBCASE("noise-free data with the truth in span") {
    c.disable_noise = true;
    const auto r = contraction_study(c);
    REQUIRE(r.mean_error.size() == 4);
    for (double e : r.mean_error) CHECK(e < 0.02);
  }
  SUBCASE("errors shrink with n; parallel equals serial") {
    const auto r = contraction_study(c);
    CHECK(r.mean_error.back() < r.mean_error.front());
    CHECK(r.slope < 0.0);
    const auto s = reference::contraction_study_serial(c);
    CHECK(s.errors == r.errors);
    CHECK(s.slope == r.slope);
    CHECK(count_lines(contraction_to_csv(r)) == 1 + 4 * 2);
    CHECK(count_lines(contraction_summary_to_csv(r)) == 1 + 4);
  }
  SUBCASE("validation") {
    c.sparsity = 4;
    CHECK_THROWS_AS(contraction_study(c), std::invalid_argument);
    c.sparsity = 5;
    c.ns = {40, 80, 160};
    CHECK_THROWS_AS(contraction_study(c), std::invalid_argument);
    c.ns = {40, 80, 160, 320};
    c.model = SimModel::kNonlinear;
    CHECK_THROWS_AS(contraction_study(c), std::invalid_argument);
  }
}

TEST_CASE("posterior prediction error and slopes") {
  Matrix f(4, 2);
  f << 1, 0, 0, 1, 1, 1, 2, 0;
  Vector truth(2);
  truth << 0.5, -0.5;
  PosteriorSamples s;
  s.draws.resize(2, 2);
  s.draws.row(0) = truth.transpose();
  s.draws.row(1) << 1.5, -0.5;  // off by 1 in the first coordinate
  const auto e = posterior_prediction_errors(s, f, truth);
  CHECK(e[0] == 0.0);
  CHECK(e[1] == doctest::Approx(f.col(0).norm() / 2.0));
  CHECK_THROWS_AS(posterior_prediction_errors(s, f.leftCols(1), truth), std::invalid_argument);

  CHECK(fit_slope({1, 2, 3, 4}, {2.5, 2.0, 1.5, 1.0}) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(fit_slope({1}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(fit_slope({2, 2}, {1, 3}), std::invalid_argument);
}

TEST_CASE("diagnostics export") {
  const auto dir = test_dir("diag");
  PosteriorSamples s;
  s.draws.resize(1000, 3);
  Rng rng = make_rng(1);
  for (int i = 0; i < 1000; ++i) {
    for (int j = 0; j < 3; ++j) s.draws(i, j) = j + std_normal(rng);
  }
  s.acceptance = {{"T", 400, 1000}, {"A", 350, 1000}};
  export_diagnostics(s, {"a", "b", "c"}, dir / "out");

  const auto trace = csv_rows(read_text(dir / "out" / "trace.csv"));
  CHECK(trace[0] == std::vector<std::string>{"coordinate", "iteration", "value"});
  CHECK(trace.size() == 1 + 3000);
  int b_rows = 0;
  for (const auto& r : trace) b_rows += r[0] == "b";
  CHECK(b_rows == 1000);

  const auto iv = csv_rows(read_text(dir / "out" / "intervals.csv"));
  REQUIRE(iv.size() == 4);
  for (std::size_t k = 1; k < iv.size(); ++k) {
    const double lo = std::stod(iv[k][1]), med = std::stod(iv[k][2]), hi = std::stod(iv[k][3]);
    CHECK(lo <= med);
    CHECK(med <= hi);
  }
  const auto acc = csv_rows(read_text(dir / "out" / "acceptance.csv"));
  REQUIRE(acc.size() == 3);
  CHECK(acc[1] == std::vector<std::string>{"T", "400", "1000", "0.4"});

  // Fewer than 100 draws: traces only, the interval file keeps its header.
  s.draws.conservativeResize(50, 3);
  export_diagnostics(s, {}, dir / "few");
  CHECK(count_lines(read_text(dir / "few" / "intervals.csv")) == 1);
  CHECK(csv_rows(read_text(dir / "few" / "trace.csv"))[1][0] == "1");

  write_file_atomic(dir / "file", "x");
  CHECK_THROWS_AS(export_diagnostics(s, {}, dir / "file" / "sub"), std::runtime_error);
  CHECK_THROWS_AS(export_diagnostics(s, {"a"}, dir / "x"), std::invalid_argument);
}
