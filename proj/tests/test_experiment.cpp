#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ngl/errors.hpp"
#include "ngl/experiment.hpp"
#include "test_support.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace ngl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / ("ngl_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string results_text(const std::vector<ResultRow> &rows) {
  std::ostringstream out;
  write_results_csv(out, rows);
  return out.str();
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.p = 12;
  cfg.n_over_p = {5.0, 20.0};
  cfg.lambdas = {0.0, 0.3};
  cfg.n_realizations = 3;
  cfg.base_seed = 99;
  cfg.record_timing = false;
  return cfg;
}

} // namespace

TEST_CASE("config JSON round trip and validation") {
  ExperimentConfig cfg = small_config();
  cfg.graph = GraphKind::Modular;
  cfg.modular.p_intra = 0.4;
  cfg.penalty = "scad";
  cfg.gamma = 3.7;
  cfg.solver.step_policy = StepPolicy::Retain;
  cfg.solver.max_inner = 123;
  cfg.init = InitStrategy::Star;
  cfg.lambda_auto_scale = 0.5;
  const auto back = config_from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(back.modular.p_intra == 0.4);
  CHECK(back.solver.step_policy == StepPolicy::Retain);
  CHECK(back.lambda_auto_scale.value() == 0.5);

  const auto single = config_from_json(nlohmann::json::parse(R"({"lambda": 0.7, "p": 9})"));
  CHECK(single.lambdas == std::vector<double>{0.7});
  CHECK(single.p == 9);

  CHECK_THROWS(config_from_json(nlohmann::json::parse(R"({"penalty": "ridge"})")));
  CHECK_THROWS(config_from_json(nlohmann::json::parse(R"({"p": 1})")));
  CHECK_THROWS(config_from_json(nlohmann::json::parse(R"({"n_realizations": 0})")));
}

TEST_CASE("sweep layout and determinism across thread counts") {
  ExperimentConfig cfg = small_config();
  const auto rows = run_synthetic(cfg);
  REQUIRE(rows.size() == 3 * 2 * 2);
  CHECK(rows[0].realization == 0);
  CHECK(rows[0].n_over_p == 5.0);
  CHECK(rows[1].lambda == 0.3);
  CHECK(rows[2].n_over_p == 20.0);
  CHECK(rows.back().realization == 2);
  for (const auto &r : rows) {
    CHECK(r.status == "converged");
    CHECK(r.ms == 0.0);
    CHECK(r.n_edges >= 11);
  }

  const std::string one = results_text(rows);
  cfg.threads = 2;
  CHECK(results_text(run_synthetic(cfg)) == one);
  cfg.threads = 3;
  CHECK(results_text(run_synthetic(cfg)) == one);

  CHECK(one.substr(0, one.find('\n')) ==
        "realization,lambda,n_over_p,n_edges,re,fs,outer_iters,inner_iters,status,ms");
  std::istringstream in(one);
  CHECK(results_text(read_results_csv(in)) == one);
}

TEST_CASE("edge count grows with the l1 penalty within a realization") {
  ExperimentConfig cfg;
  cfg.p = 15;
  cfg.n_over_p = {100.0};
  cfg.lambdas = {0.0, 0.1, 10.0};
  cfg.penalty = "l1";
  cfg.n_realizations = 2;
  cfg.record_timing = false;
  const auto rows = run_synthetic(cfg);
  REQUIRE(rows.size() == 6);
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(rows[3 * r].n_edges <= rows[3 * r + 1].n_edges);
    CHECK(rows[3 * r + 1].n_edges <= rows[3 * r + 2].n_edges);
    CHECK(rows[3 * r + 2].n_edges == 105);
  }
}

TEST_CASE("a failing cell is recorded and does not stop the sweep") {
  ExperimentConfig cfg = small_config();
  const auto g = generate_ba_tree(cfg.p, {}, 1);
  Matrix S = sample_lgmrf(g, 100, 2).S;
  S(3, 4) = S(4, 3) = std::numeric_limits<double>::quiet_NaN();
  const ResultRow bad = fit_cell(cfg, g, S, 0.3);
  CHECK(bad.status == "numerical_failure");
  CHECK(std::isnan(bad.re));
  CHECK(std::isnan(bad.fs));

  const ResultRow good = fit_cell(cfg, g, sample_lgmrf(g, 100, 2).S, 0.3);
  CHECK(good.status == "converged");

  cfg.gamma = 0.5; // invalid for MCP, rejected inside the cell
  CHECK(fit_cell(cfg, g, sample_lgmrf(g, 100, 2).S, 0.3).status == "numerical_failure");

  ResultRow failed = bad;
  failed.realization = 1;
  const auto agg = aggregate({good, failed, good});
  REQUIRE(agg.size() == 1);
  CHECK(agg[0].count == 2);
  CHECK(agg[0].failures == 1);
  CHECK(agg[0].re.mean == good.re);
  std::ostringstream text;
  write_results_csv(text, {failed});
  CHECK(text.str().find(",nan,nan,") != std::string::npos);
}

TEST_CASE("aggregate matches an independent two-pass computation") {
  Rng rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ResultRow> rows;
  for (int r = 0; r < 100; ++r)
    for (double ratio : {10.0, 30.0})
      for (double lambda : {0.1, 0.5, 1.0}) {
        ResultRow row;
        row.realization = r;
        row.lambda = lambda;
        row.n_over_p = ratio;
        row.n_edges = 40 + static_cast<Index>(20 * u(rng));
        row.re = u(rng);
        row.fs = u(rng);
        row.outer_iters = 1 + r % 7;
        row.inner_iters = 100 + r;
        row.status = "converged";
        rows.push_back(row);
      }
  rows[5].status = "numerical_failure";

  // oracle: Welford's running mean and variance per key
  struct Acc {
    int n = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double x) {
      ++n;
      const double d = x - mean;
      mean += d / n;
      m2 += d * (x - mean);
    }
  };
  std::map<std::pair<double, double>, Acc> re_acc;
  for (const auto &r : rows)
    if (r.status != "numerical_failure")
      re_acc[{r.n_over_p, r.lambda}].add(r.re);

  const auto agg = aggregate(rows);
  REQUIRE(agg.size() == 6);
  for (const auto &a : agg) {
    const Acc &o = re_acc.at({a.n_over_p, a.lambda});
    CHECK(a.count == o.n);
    CHECK(std::abs(a.re.mean - o.mean) < 1e-12);
    CHECK(std::abs(a.re.std - std::sqrt(o.m2 / (o.n - 1))) < 1e-12);
    CHECK(a.fs.std >= 0.0);
  }
  CHECK(agg[0].n_over_p == 10.0);
  CHECK(agg[0].lambda == 0.1);
  CHECK(agg[0].failures == 0);

  const fs::path dir = scratch_dir("plots");
  const auto paths = emit_plot_tables(rows, dir.string());
  CHECK(paths.size() == 6);
  const std::string re_table = slurp(dir / "re_vs_lambda.csv");
  CHECK(re_table.rfind("n_over_p,lambda,count,mean,std\n", 0) == 0);
  CHECK(std::count(re_table.begin(), re_table.end(), '\n') == 7);
  CHECK(slurp(dir / "fs_vs_n_over_p.csv").rfind("lambda,n_over_p,count,mean,std\n", 0) == 0);

  // a single row gives one-row tables with zero spread
  const auto one_dir = scratch_dir("plots_one");
  emit_plot_tables({rows[0]}, one_dir.string());
  const std::string single = slurp(one_dir / "edges_vs_lambda.csv");
  CHECK(std::count(single.begin(), single.end(), '\n') == 2);
  CHECK(single.substr(single.size() - 3) == ",0\n");
}

TEST_CASE("p = 2 data fit matches the closed form 1 / (L*S + lambda)") {
  Rng rng(2);
  std::normal_distribution<double> noise(0.0, 0.05);
  Matrix X(2, 400);
  for (Index t = 0; t < X.cols(); ++t) {
    const double common = noise(rng) * 20.0;
    X(0, t) = common + noise(rng);
    X(1, t) = common + noise(rng);
  }
  DataFitOptions opts;
  opts.penalty = PenaltySpec::l1(0.01);
  // the optimum is near 65 where the curvature 1/w^2 is tiny, so allow long steps
  opts.solver.eta0 = 1e4;
  opts.solver.tol_inner = 1e-12;
  const auto fit = fit_data(X, opts);
  const Matrix S = sample_covariance(X);
  const double closed = 1.0 / (S(0, 0) + S(1, 1) - 2.0 * S(0, 1) + 0.01);
  CHECK(fit.report.w_hat[0] == doctest::Approx(closed).epsilon(1e-6));
  CHECK(fit.report.w_hat[0] > 10.0);
}

TEST_CASE("orientation flag transposes the interpretation") {
  Rng rng(3);
  const Matrix A = testing::random_matrix(8, 8, rng);
  DataFitOptions rows_vars;
  DataFitOptions rows_obs;
  rows_obs.orientation = Orientation::RowsAreObservations;
  const fs::path dir = scratch_dir("orient");
  auto write = [&](const Matrix &M, const fs::path &path) {
    std::ofstream out(path);
    for (Index i = 0; i < M.rows(); ++i)
      for (Index j = 0; j < M.cols(); ++j)
        out << format_double(M(i, j)) << (j + 1 < M.cols() ? ',' : '\n');
  };
  write(A, dir / "a.csv");
  write(A.transpose(), dir / "at.csv");
  const auto f1 = fit_data(read_matrix_csv((dir / "a.csv").string(), rows_vars.orientation), rows_vars);
  const auto f2 = fit_data(read_matrix_csv((dir / "at.csv").string(), rows_obs.orientation), rows_obs);
  CHECK(f1.report.w_hat.values() == f2.report.w_hat.values());
}

TEST_CASE("white noise: weights are uniform and shrink like 2 / (p lambda)") {
  // with isotropic covariance every edge is exchangeable, and the model keeps
  // the graph connected, so the fit is a near-uniform complete graph
  Rng rng(5);
  const Index p = 10;
  const Matrix X = testing::random_matrix(p, 50 * p, rng);
  DataFitOptions opts;
  opts.penalty = PenaltySpec::mcp(20.0);
  const auto fit = fit_data(X, opts);
  CHECK(fit.report.status == SolveStatus::Converged);
  const double scale = 2.0 / (double(p) * 20.0);
  CHECK(fit.report.w_hat.values().maxCoeff() < 1.1 * scale);
  std::ostringstream edges;
  write_edge_list(edges, fit.report.w_hat, 0.05);
  CHECK(edges.str() == "i,j,weight\n");
}

TEST_CASE("edge lists") {
  const auto g = generate_ba_tree(6, {}, 3);
  const fs::path dir = scratch_dir("edges");
  {
    std::ofstream out(dir / "g.csv");
    write_edge_list(out, g.w_star, 0.0);
  }
  const auto back = read_edge_list((dir / "g.csv").string());
  CHECK(back.w_star.values() == g.w_star.values());
  {
    std::ofstream out(dir / "bad.csv");
    out << "1,2,1.0\n3,4,1.0\n";
  }
  CHECK_THROWS_AS(read_edge_list((dir / "bad.csv").string()), ModelError);
}

#ifdef NGL_CLI_PATH
TEST_CASE("CLI: synthetic runs are byte-identical and fit writes its outputs") {
  const fs::path dir = scratch_dir("cli");
  const std::string cli = NGL_CLI_PATH;
  auto run = [&](const std::string &args) {
    return std::system((cli + " " + args + " 2>/dev/null").c_str());
  };
  const std::string common = "synthetic --p 10 --n-over-p 10 30 --lambda 0 0.2 --realizations 2 "
                             "--seed 7 --no-timing --output ";
  REQUIRE(run(common + (dir / "a.csv").string()) == 0);
  REQUIRE(run(common + (dir / "b.csv").string() + " --threads 2") == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(fs::exists(dir / "a_summary.csv"));

  REQUIRE(run("plot-tables --results " + (dir / "a.csv").string() + " --out-dir " +
              (dir / "plots").string() + " > /dev/null") == 0);
  CHECK(fs::exists(dir / "plots" / "fs_vs_n_over_p.csv"));

  const auto g = generate_ba_tree(8, {}, 1);
  const auto s = sample_lgmrf(g, 800, 2);
  {
    std::ofstream out(dir / "data.csv");
    out << "v1,v2,v3,v4,v5,v6,v7,v8\n";
    for (Index t = 0; t < s.X.cols(); ++t)
      for (Index i = 0; i < 8; ++i)
        out << format_double(s.X(i, t)) << (i < 7 ? ',' : '\n');
  }
  REQUIRE(run("fit --input " + (dir / "data.csv").string() +
              " --orientation rows-are-observations --lambda 0.25 --edges " +
              (dir / "edges.csv").string() + " --summary " + (dir / "summary.json").string()) == 0);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["p"] == 8);
  CHECK(summary["n"] == 800);
  CHECK(summary["status"] == "converged");
  const auto learned = read_edge_list((dir / "edges.csv").string(), 8);
  CHECK(evaluate(learned.w_star, g.w_star, 0.0).f_score == 1.0);

  CHECK(run("fit --input " + (dir / "missing.csv").string()) != 0);
  CHECK(run("synthetic --penalty ridge --output " + (dir / "c.csv").string()) != 0);
}
#endif
