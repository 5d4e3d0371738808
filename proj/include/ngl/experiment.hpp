#pragma once

#include "ngl/csv.hpp"
#include "ngl/metrics.hpp"
#include "ngl/model.hpp"
#include "ngl/penalty.hpp"
#include "ngl/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ngl {

enum class GraphKind { BaTree, Modular, FromFile };

GraphKind parse_graph_kind(std::string_view name);
std::string to_string(GraphKind kind);

/// Regularization proportional to sqrt(log p / n). A heuristic: the constant
/// in front is data-dependent and must be tuned.
double lambda_heuristic(Index p, Index n, double scale);

struct ExperimentConfig {
  GraphKind graph = GraphKind::BaTree;
  Index p = 50;
  std::string graph_file; // edge list (i,j,weight), for GraphKind::FromFile
  WeightRange weights;
  ModularOptions modular;

  std::vector<double> n_over_p{100.0};
  std::vector<double> lambdas{0.25};
  /// When set, lambda = scale * sqrt(log p / n) replaces `lambdas`.
  std::optional<double> lambda_auto_scale;
  std::string penalty = "mcp";
  double gamma = 0.0; // <= 0 selects the penalty's default

  int n_realizations = 1;
  std::uint64_t base_seed = 1;
  SolverOptions solver;
  InitStrategy init = InitStrategy::SpanningTree;

  std::string output_path = "results.csv";
  int threads = 1;
  /// Write wall-clock times; off makes output byte-reproducible.
  bool record_timing = true;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json &j);
nlohmann::json to_json(const ExperimentConfig &cfg);
ExperimentConfig load_config(const std::string &path);

struct ResultRow {
  int realization = 0;
  double lambda = 0.0;
  double n_over_p = 0.0;
  Index n_edges = 0;
  double re = 0.0;
  double fs = 0.0;
  int outer_iters = 0;
  int inner_iters = 0;
  std::string status;
  double ms = 0.0;
};

/// Reads a ground-truth edge list: rows "i,j,weight" with 1-based nodes and an
/// optional header. p is the largest node id unless `p` is given.
GroundTruthGraph read_edge_list(const std::string &path, Index p = 0);

/// Seeds of realization r: graph and, per n/p index, samples.
std::uint64_t graph_seed(std::uint64_t base_seed, int realization);
std::uint64_t sample_seed(std::uint64_t base_seed, int realization, std::size_t ratio_index);

/// Fits one (graph, S, lambda) cell. Any exception becomes a row with status
/// numerical_failure and NaN metrics; realization and n_over_p are left 0.
ResultRow fit_cell(const ExperimentConfig &cfg, const GroundTruthGraph &g, const Matrix &S,
                   double lambda);

/// One row per (realization, n/p, lambda), ordered by realization, then n/p,
/// then lambda as listed in the config. A failed fit is recorded in the row's
/// status and does not stop the sweep.
std::vector<ResultRow> run_synthetic(const ExperimentConfig &cfg);

void write_results_csv(std::ostream &out, const std::vector<ResultRow> &rows);
std::vector<ResultRow> read_results_csv(std::istream &in);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0; // sample standard deviation, 0 for a single row
};

struct AggregateRow {
  double lambda = 0.0;
  double n_over_p = 0.0;
  int count = 0; // rows that did not fail numerically
  int failures = 0;
  MetricSummary n_edges, re, fs, outer_iters, inner_iters;
};

/// Mean and standard deviation per (lambda, n/p), sorted by n/p then lambda.
std::vector<AggregateRow> aggregate(const std::vector<ResultRow> &rows);
void write_aggregate_csv(std::ostream &out, const std::vector<AggregateRow> &agg);

/// Writes {edges,re,fs}_vs_{lambda,n_over_p}.csv into `dir`; returns the paths.
std::vector<std::string> emit_plot_tables(const std::vector<ResultRow> &rows,
                                          const std::string &dir);

/// Path of the aggregate table written next to a results file.
std::string summary_path(const std::string &results_path);

struct DataFitOptions {
  Orientation orientation = Orientation::RowsAreVariables;
  bool use_correlation = false;
  bool center = false;
  PenaltySpec penalty = PenaltySpec::mcp(0.1);
  SolverOptions solver;
  InitStrategy init = InitStrategy::SpanningTree;
};

struct DataFitResult {
  Index p = 0;
  Index n = 0;
  SolveReport report;
  double ms = 0.0;
};

/// Fits a graph to a p x n data matrix (variables x observations).
DataFitResult fit_data(const Matrix &X, const DataFitOptions &opts);

/// "i,j,weight" rows for every edge above the threshold, 1-based, i > j.
void write_edge_list(std::ostream &out, const WeightVector &w, double edge_threshold);
nlohmann::json run_summary(const DataFitResult &fit, const DataFitOptions &opts);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

} // namespace ngl
