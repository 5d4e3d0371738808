// ngl: learn sparse graph Laplacians from data and run synthetic sweeps.

#include "ngl/errors.hpp"
#include "ngl/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct SolverFlags {
  CLI::Option *eta0, *beta, *tol_inner, *max_inner, *tol_outer, *max_outer, *threshold, *policy,
      *init;
  std::string policy_name, init_name;

  void add(CLI::App &app, ngl::SolverOptions &opts) {
    eta0 = app.add_option("--eta0", opts.eta0, "Initial step size")->capture_default_str();
    beta = app.add_option("--beta", opts.beta, "Backtracking shrink factor in (0, 1)")
               ->capture_default_str();
    tol_inner = app.add_option("--tol-inner", opts.tol_inner, "Inner relative-change tolerance")
                    ->capture_default_str();
    max_inner =
        app.add_option("--max-inner", opts.max_inner, "Inner iteration cap")->capture_default_str();
    tol_outer = app.add_option("--tol-outer", opts.tol_outer, "Outer relative-change tolerance")
                    ->capture_default_str();
    max_outer =
        app.add_option("--max-outer", opts.max_outer, "Outer iteration cap")->capture_default_str();
    threshold = app.add_option("--edge-threshold", opts.edge_threshold,
                               "Weights above this count as edges")
                    ->capture_default_str();
    policy = app.add_option("--step-policy", policy_name, "Step size carry-over: expand | retain")
                 ->default_str("expand");
    init = app.add_option("--init", init_name, "Initial point: spanning-tree | star | uniform")
               ->default_str("spanning-tree");
  }
};

int run_synthetic(const std::string &config_path, ngl::ExperimentConfig &flags,
                  CLI::App &sub, SolverFlags &solver_flags, const std::string &graph_name,
                  double weight_lo, double weight_hi, bool no_timing,
                  const std::string &plot_dir, bool print_config) {
  ngl::ExperimentConfig cfg;
  if (!config_path.empty())
    cfg = ngl::load_config(config_path);

  auto given = [&](const char *name) { return sub.get_option(name)->count() > 0; };
  if (given("--graph"))
    cfg.graph = ngl::parse_graph_kind(graph_name);
  if (given("--p"))
    cfg.p = flags.p;
  if (given("--graph-file"))
    cfg.graph_file = flags.graph_file;
  if (given("--weight-lo"))
    cfg.weights.lo = weight_lo;
  if (given("--weight-hi"))
    cfg.weights.hi = weight_hi;
  if (given("--modules"))
    cfg.modular.n_modules = flags.modular.n_modules;
  if (given("--p-intra"))
    cfg.modular.p_intra = flags.modular.p_intra;
  if (given("--p-inter"))
    cfg.modular.p_inter = flags.modular.p_inter;
  if (given("--n-over-p"))
    cfg.n_over_p = flags.n_over_p;
  if (given("--lambda"))
    cfg.lambdas = flags.lambdas;
  if (given("--lambda-auto"))
    cfg.lambda_auto_scale = flags.lambda_auto_scale;
  if (given("--penalty"))
    cfg.penalty = flags.penalty;
  if (given("--gamma"))
    cfg.gamma = flags.gamma;
  if (given("--realizations"))
    cfg.n_realizations = flags.n_realizations;
  if (given("--seed"))
    cfg.base_seed = flags.base_seed;
  if (given("--threads"))
    cfg.threads = flags.threads;
  if (given("--output"))
    cfg.output_path = flags.output_path;
  if (no_timing)
    cfg.record_timing = false;

  if (solver_flags.eta0->count())
    cfg.solver.eta0 = flags.solver.eta0;
  if (solver_flags.beta->count())
    cfg.solver.beta = flags.solver.beta;
  if (solver_flags.tol_inner->count())
    cfg.solver.tol_inner = flags.solver.tol_inner;
  if (solver_flags.max_inner->count())
    cfg.solver.max_inner = flags.solver.max_inner;
  if (solver_flags.tol_outer->count())
    cfg.solver.tol_outer = flags.solver.tol_outer;
  if (solver_flags.max_outer->count())
    cfg.solver.max_outer = flags.solver.max_outer;
  if (solver_flags.threshold->count())
    cfg.solver.edge_threshold = flags.solver.edge_threshold;
  if (solver_flags.policy->count())
    cfg.solver.step_policy = ngl::parse_step_policy(solver_flags.policy_name);
  if (solver_flags.init->count())
    cfg.init = ngl::parse_init_strategy(solver_flags.init_name);
  cfg.modular.weights = cfg.weights;
  cfg.validate();

  if (print_config) {
    std::cout << ngl::to_json(cfg).dump(2) << '\n';
    return 0;
  }

  const auto rows = ngl::run_synthetic(cfg);
  {
    std::ofstream out(cfg.output_path);
    if (!out)
      throw ngl::ArgumentError("cannot write '" + cfg.output_path + "'");
    ngl::write_results_csv(out, rows);
  }
  {
    std::ofstream out(ngl::summary_path(cfg.output_path));
    ngl::write_aggregate_csv(out, ngl::aggregate(rows));
  }
  std::cerr << "wrote " << rows.size() << " rows to " << cfg.output_path << " and "
            << ngl::summary_path(cfg.output_path) << '\n';
  if (!plot_dir.empty())
    for (const auto &path : ngl::emit_plot_tables(rows, plot_dir))
      std::cerr << "wrote " << path << '\n';
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Sparse graph Laplacian learning under the Laplacian-constrained Gaussian "
               "graphical model (l1, MCP and SCAD penalties)"};
  app.require_subcommand(1);

  // synthetic
  auto *syn = app.add_subcommand("synthetic", "Monte Carlo sweep over lambda and n/p on "
                                              "generated graphs");
  ngl::ExperimentConfig sflags;
  std::string config_path, graph_name = "ba_tree", plot_dir;
  double weight_lo = 2.0, weight_hi = 5.0;
  bool no_timing = false, print_config = false;
  SolverFlags syn_solver;
  syn->add_option("--config", config_path, "JSON config; flags override its fields")
      ->check(CLI::ExistingFile);
  syn->add_option("--graph", graph_name, "ba_tree | modular | from_file")->capture_default_str();
  syn->add_option("--p", sflags.p, "Number of nodes")->capture_default_str();
  syn->add_option("--graph-file", sflags.graph_file, "Ground-truth edge list (i,j,weight)");
  syn->add_option("--weight-lo", weight_lo, "Lower edge weight")->capture_default_str();
  syn->add_option("--weight-hi", weight_hi, "Upper edge weight")->capture_default_str();
  syn->add_option("--modules", sflags.modular.n_modules, "Modules of a modular graph")
      ->capture_default_str();
  syn->add_option("--p-intra", sflags.modular.p_intra, "Intra-module edge probability")
      ->capture_default_str();
  syn->add_option("--p-inter", sflags.modular.p_inter, "Inter-module edge probability")
      ->capture_default_str();
  syn->add_option("--n-over-p", sflags.n_over_p, "Sample size ratios n/p")->capture_default_str();
  syn->add_option("--lambda", sflags.lambdas, "Regularization parameters")->capture_default_str();
  syn->add_option("--lambda-auto", sflags.lambda_auto_scale,
                  "Use lambda = SCALE * sqrt(log p / n) instead of --lambda (heuristic)");
  syn->add_option("--penalty", sflags.penalty, "l1 | mcp | scad")->capture_default_str();
  syn->add_option("--gamma", sflags.gamma, "Concavity (default 1.01 MCP, 2.01 SCAD)");
  syn->add_option("--realizations", sflags.n_realizations, "Monte Carlo realizations")
      ->capture_default_str();
  syn->add_option("--seed", sflags.base_seed, "Base seed")->capture_default_str();
  syn->add_option("--threads", sflags.threads, "Worker threads across realizations")
      ->capture_default_str();
  syn->add_option("--output", sflags.output_path, "Results CSV")->capture_default_str();
  syn->add_option("--plot-dir", plot_dir, "Also write per-figure tables into this directory");
  syn->add_flag("--no-timing", no_timing, "Write ms = 0 so output is byte-reproducible");
  syn->add_flag("--print-config", print_config, "Print the effective config as JSON and exit");
  syn_solver.add(*syn, sflags.solver);

  // fit
  auto *fit = app.add_subcommand("fit", "Learn a graph from a numeric CSV");
  std::string input, orientation = "rows-are-variables", edges_out = "edges.csv",
                     summary_out = "summary.json", penalty = "mcp";
  double lambda = 0.1, gamma = 0.0, lambda_auto = 0.0;
  bool use_correlation = false, center = false;
  ngl::DataFitOptions fit_opts;
  SolverFlags fit_solver;
  fit->add_option("--input", input, "Data CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--orientation", orientation, "rows-are-variables | rows-are-observations")
      ->capture_default_str();
  fit->add_flag("--correlation", use_correlation, "Fit the sample correlation matrix");
  fit->add_flag("--center", center, "Subtract each variable's mean first");
  fit->add_option("--penalty", penalty, "l1 | mcp | scad")->capture_default_str();
  fit->add_option("--lambda", lambda, "Regularization parameter")->capture_default_str();
  fit->add_option("--lambda-auto", lambda_auto,
                  "Use lambda = SCALE * sqrt(log p / n) instead of --lambda (heuristic)");
  fit->add_option("--gamma", gamma, "Concavity (default 1.01 MCP, 2.01 SCAD)");
  fit->add_option("--edges", edges_out, "Edge list output (i,j,weight)")->capture_default_str();
  fit->add_option("--summary", summary_out, "JSON run summary output")->capture_default_str();
  fit_solver.add(*fit, fit_opts.solver);

  // plot-tables
  auto *plot = app.add_subcommand("plot-tables", "Per-figure mean/std tables from a results CSV");
  std::string results_in, out_dir = ".";
  plot->add_option("--results", results_in, "Results CSV from `synthetic`")
      ->required()
      ->check(CLI::ExistingFile);
  plot->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*syn)
      return run_synthetic(config_path, sflags, *syn, syn_solver, graph_name, weight_lo, weight_hi,
                           no_timing, plot_dir, print_config);

    if (*fit) {
      fit_opts.orientation = ngl::parse_orientation(orientation);
      fit_opts.use_correlation = use_correlation;
      fit_opts.center = center;
      if (fit_solver.policy->count())
        fit_opts.solver.step_policy = ngl::parse_step_policy(fit_solver.policy_name);
      if (fit_solver.init->count())
        fit_opts.init = ngl::parse_init_strategy(fit_solver.init_name);
      const ngl::Matrix X = ngl::read_matrix_csv(input, fit_opts.orientation);
      if (fit->get_option("--lambda-auto")->count())
        lambda = ngl::lambda_heuristic(X.rows(), X.cols(), lambda_auto);
      fit_opts.penalty = ngl::make_penalty(penalty, lambda, gamma);

      const auto result = ngl::fit_data(X, fit_opts);
      {
        std::ofstream out(edges_out);
        ngl::write_edge_list(out, result.report.w_hat, fit_opts.solver.edge_threshold);
      }
      {
        std::ofstream out(summary_out);
        out << ngl::run_summary(result, fit_opts).dump(2) << '\n';
      }
      std::cerr << "p = " << result.p << ", n = " << result.n << ", "
                << ngl::count_edges(result.report.w_hat, fit_opts.solver.edge_threshold)
                << " edges, status " << ngl::to_string(result.report.status) << '\n';
      return result.report.status == ngl::SolveStatus::NumericalFailure ? 2 : 0;
    }

    if (*plot) {
      std::ifstream in(results_in);
      for (const auto &path : ngl::emit_plot_tables(ngl::read_results_csv(in), out_dir))
        std::cout << path << '\n';
      return 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
