#include "ngl/experiment.hpp"
#include "ngl/errors.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace ngl {

GraphKind parse_graph_kind(std::string_view name) {
  if (name == "ba_tree")
    return GraphKind::BaTree;
  if (name == "modular")
    return GraphKind::Modular;
  if (name == "from_file")
    return GraphKind::FromFile;
  throw ArgumentError("unknown graph '" + std::string(name) +
                      "' (expected ba_tree, modular or from_file)");
}

std::string to_string(GraphKind kind) {
  switch (kind) {
  case GraphKind::BaTree:
    return "ba_tree";
  case GraphKind::Modular:
    return "modular";
  case GraphKind::FromFile:
    return "from_file";
  }
  return "?";
}

double lambda_heuristic(Index p, Index n, double scale) {
  if (p < 2 || n < 1)
    throw ArgumentError("lambda_heuristic: need p >= 2 and n >= 1");
  return scale * std::sqrt(std::log(double(p)) / double(n));
}

std::string format_double(double v) {
  if (std::isnan(v))
    return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  if (graph != GraphKind::FromFile && p < 2)
    throw ArgumentError("config: p must be >= 2");
  if (graph == GraphKind::FromFile && graph_file.empty())
    throw ArgumentError("config: graph_file is required for graph = from_file");
  if (n_over_p.empty())
    throw ArgumentError("config: n_over_p must be nonempty");
  if (lambdas.empty() && !lambda_auto_scale)
    throw ArgumentError("config: lambda must be nonempty");
  for (double r : n_over_p)
    if (!(r > 0.0))
      throw ArgumentError("config: n_over_p entries must be > 0");
  for (double l : lambdas)
    if (!(l >= 0.0))
      throw ArgumentError("config: lambda entries must be >= 0");
  if (n_realizations < 1)
    throw ArgumentError("config: n_realizations must be >= 1");
  if (threads < 1)
    throw ArgumentError("config: threads must be >= 1");
  make_penalty(penalty, 0.0, gamma);
  solver.validate();
}

namespace {

template <class T> void read_if(const nlohmann::json &j, const char *key, T &out) {
  if (j.contains(key))
    out = j.at(key).get<T>();
}

std::vector<double> number_list(const nlohmann::json &j) {
  if (j.is_number())
    return {j.get<double>()};
  return j.get<std::vector<double>>();
}

} // namespace

ExperimentConfig config_from_json(const nlohmann::json &j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("graph"))
      cfg.graph = parse_graph_kind(j.at("graph").get<std::string>());
    read_if(j, "p", cfg.p);
    read_if(j, "graph_file", cfg.graph_file);
    if (j.contains("weight_range")) {
      const auto r = j.at("weight_range").get<std::vector<double>>();
      if (r.size() != 2)
        throw ArgumentError("config: weight_range must be [lo, hi]");
      cfg.weights = {r[0], r[1]};
    }
    cfg.modular.weights = cfg.weights;
    if (j.contains("modular")) {
      const auto &m = j.at("modular");
      read_if(m, "n_modules", cfg.modular.n_modules);
      read_if(m, "p_intra", cfg.modular.p_intra);
      read_if(m, "p_inter", cfg.modular.p_inter);
    }
    if (j.contains("n_over_p"))
      cfg.n_over_p = number_list(j.at("n_over_p"));
    if (j.contains("lambda"))
      cfg.lambdas = number_list(j.at("lambda"));
    if (j.contains("lambda_auto_scale") && !j.at("lambda_auto_scale").is_null())
      cfg.lambda_auto_scale = j.at("lambda_auto_scale").get<double>();
    read_if(j, "penalty", cfg.penalty);
    read_if(j, "gamma", cfg.gamma);
    read_if(j, "n_realizations", cfg.n_realizations);
    read_if(j, "base_seed", cfg.base_seed);
    if (j.contains("solver")) {
      const auto &s = j.at("solver");
      read_if(s, "eta0", cfg.solver.eta0);
      read_if(s, "beta", cfg.solver.beta);
      read_if(s, "tol_inner", cfg.solver.tol_inner);
      read_if(s, "max_inner", cfg.solver.max_inner);
      read_if(s, "tol_outer", cfg.solver.tol_outer);
      read_if(s, "max_outer", cfg.solver.max_outer);
      read_if(s, "edge_threshold", cfg.solver.edge_threshold);
      if (s.contains("step_policy"))
        cfg.solver.step_policy = parse_step_policy(s.at("step_policy").get<std::string>());
    }
    if (j.contains("init"))
      cfg.init = parse_init_strategy(j.at("init").get<std::string>());
    read_if(j, "output_path", cfg.output_path);
    read_if(j, "threads", cfg.threads);
    read_if(j, "record_timing", cfg.record_timing);
  } catch (const nlohmann::json::exception &e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig &cfg) {
  nlohmann::json j;
  j["graph"] = to_string(cfg.graph);
  j["p"] = cfg.p;
  if (!cfg.graph_file.empty())
    j["graph_file"] = cfg.graph_file;
  j["weight_range"] = {cfg.weights.lo, cfg.weights.hi};
  j["modular"] = {{"n_modules", cfg.modular.n_modules},
                  {"p_intra", cfg.modular.p_intra},
                  {"p_inter", cfg.modular.p_inter}};
  j["n_over_p"] = cfg.n_over_p;
  j["lambda"] = cfg.lambdas;
  j["lambda_auto_scale"] =
      cfg.lambda_auto_scale ? nlohmann::json(*cfg.lambda_auto_scale) : nlohmann::json(nullptr);
  j["penalty"] = cfg.penalty;
  j["gamma"] = cfg.gamma;
  j["n_realizations"] = cfg.n_realizations;
  j["base_seed"] = cfg.base_seed;
  j["solver"] = {{"eta0", cfg.solver.eta0},
                 {"beta", cfg.solver.beta},
                 {"tol_inner", cfg.solver.tol_inner},
                 {"max_inner", cfg.solver.max_inner},
                 {"tol_outer", cfg.solver.tol_outer},
                 {"max_outer", cfg.solver.max_outer},
                 {"edge_threshold", cfg.solver.edge_threshold},
                 {"step_policy", to_string(cfg.solver.step_policy)}};
  j["init"] = to_string(cfg.init);
  j["output_path"] = cfg.output_path;
  j["threads"] = cfg.threads;
  j["record_timing"] = cfg.record_timing;
  return j;
}

ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ArgumentError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw ArgumentError("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------- graphs

GroundTruthGraph read_edge_list(const std::string &path, Index p) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open edge list '" + path + "'");
  struct Edge {
    Index i, j;
    double w;
  };
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  Index max_node = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    const auto f = split_csv_line(line);
    if (line_no == 1 && !f.empty() && f[0] == "i")
      continue;
    if (f.size() != 3)
      throw DataError("edge list line " + std::to_string(line_no) + ": expected i,j,weight");
    try {
      Edge e{std::stoll(f[0]), std::stoll(f[1]), std::stod(f[2])};
      if (e.i == e.j || e.i < 1 || e.j < 1 || !(e.w >= 0.0))
        throw DataError("");
      if (e.i < e.j)
        std::swap(e.i, e.j);
      max_node = std::max(max_node, e.i);
      edges.push_back(e);
    } catch (const std::exception &) {
      throw DataError("edge list line " + std::to_string(line_no) + ": invalid edge '" + line +
                      "'");
    }
  }
  if (p == 0)
    p = max_node;
  if (max_node > p)
    throw DataError("edge list references node " + std::to_string(max_node) + " > p");
  WeightVector w = WeightVector::zeros(p);
  for (const auto &e : edges)
    w[edge_index(e.i, e.j, p) - 1] = e.w;
  auto g = make_ground_truth(std::move(w));
  if (const auto f = is_feasible(g.w_star); !f.feasible)
    throw ModelError("edge list '" + path + "': " + f.diagnostic);
  return g;
}

std::uint64_t graph_seed(std::uint64_t base_seed, int realization) {
  return derive_seed(base_seed, static_cast<std::uint64_t>(realization));
}

std::uint64_t sample_seed(std::uint64_t base_seed, int realization, std::size_t ratio_index) {
  return derive_seed(graph_seed(base_seed, realization), 1 + ratio_index);
}

// ---------------------------------------------------------------- sweeps

namespace {

ResultRow failed_row(double lambda) {
  ResultRow row;
  row.lambda = lambda;
  row.re = std::numeric_limits<double>::quiet_NaN();
  row.fs = std::numeric_limits<double>::quiet_NaN();
  row.status = to_string(SolveStatus::NumericalFailure);
  return row;
}

} // namespace

ResultRow fit_cell(const ExperimentConfig &cfg, const GroundTruthGraph &g, const Matrix &S,
                   double lambda) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultRow row;
  try {
    const PenaltySpec pen = make_penalty(cfg.penalty, lambda, cfg.gamma);
    const WeightVector w0 = default_initial_point(S, g.nodes(), cfg.init);
    const SolveReport rep = ngl::ngl(S, pen, cfg.solver, w0);
    const EvalResult ev = evaluate(rep.w_hat, g.w_star, cfg.solver.edge_threshold);
    row.lambda = lambda;
    row.n_edges = ev.n_edges_hat;
    row.re = ev.relative_error;
    row.fs = ev.f_score;
    row.outer_iters = rep.outer_iters;
    row.inner_iters = rep.total_inner_iters();
    row.status = to_string(rep.status);
  } catch (const std::exception &) {
    row = failed_row(lambda);
  }
  if (cfg.record_timing)
    row.ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

namespace {

std::vector<ResultRow> run_realization(const ExperimentConfig &cfg, int r,
                                       const std::optional<GroundTruthGraph> &fixed_graph) {
  GroundTruthGraph g;
  switch (cfg.graph) {
  case GraphKind::BaTree:
    g = generate_ba_tree(cfg.p, cfg.weights, graph_seed(cfg.base_seed, r));
    break;
  case GraphKind::Modular: {
    auto mod = cfg.modular;
    mod.weights = cfg.weights;
    g = generate_modular(cfg.p, mod, graph_seed(cfg.base_seed, r));
    break;
  }
  case GraphKind::FromFile:
    g = *fixed_graph;
    break;
  }
  const Index p = g.nodes();

  std::vector<ResultRow> rows;
  for (std::size_t ri = 0; ri < cfg.n_over_p.size(); ++ri) {
    const double ratio = cfg.n_over_p[ri];
    const auto n = std::max<Index>(1, static_cast<Index>(std::llround(ratio * double(p))));
    std::vector<double> lambdas = cfg.lambdas;
    if (cfg.lambda_auto_scale)
      lambdas = {lambda_heuristic(p, n, *cfg.lambda_auto_scale)};

    std::optional<SampleSet> samples;
    try {
      samples = sample_lgmrf(g, n, sample_seed(cfg.base_seed, r, ri));
    } catch (const std::exception &) {
    }
    for (double lambda : lambdas) {
      ResultRow row = samples ? fit_cell(cfg, g, samples->S, lambda) : failed_row(lambda);
      row.realization = r;
      row.n_over_p = ratio;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

} // namespace

std::vector<ResultRow> run_synthetic(const ExperimentConfig &cfg) {
  cfg.validate();
  std::optional<GroundTruthGraph> fixed_graph;
  if (cfg.graph == GraphKind::FromFile)
    fixed_graph = read_edge_list(cfg.graph_file);

  std::vector<std::vector<ResultRow>> per_realization(static_cast<std::size_t>(cfg.n_realizations));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < cfg.n_realizations; r = next++)
      per_realization[static_cast<std::size_t>(r)] = run_realization(cfg, r, fixed_graph);
  };
  const int n_threads = std::min(cfg.threads, cfg.n_realizations);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back(worker);
  }

  std::vector<ResultRow> rows;
  for (auto &chunk : per_realization)
    for (auto &row : chunk)
      rows.push_back(std::move(row));
  return rows;
}

// ---------------------------------------------------------------- tables

namespace {

constexpr const char *kResultsHeader =
    "realization,lambda,n_over_p,n_edges,re,fs,outer_iters,inner_iters,status,ms";

double parse_field(const std::string &s, std::size_t line_no) {
  if (s == "nan")
    return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw DataError("results line " + std::to_string(line_no) + ": cannot parse '" + s + "'");
  return v;
}

MetricSummary summarize(const std::vector<double> &xs) {
  MetricSummary m;
  if (xs.empty()) {
    m.mean = m.std = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  double sum = 0.0;
  for (double x : xs)
    sum += x;
  m.mean = sum / double(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs)
      ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / double(xs.size() - 1));
  }
  return m;
}

} // namespace

void write_results_csv(std::ostream &out, const std::vector<ResultRow> &rows) {
  out << kResultsHeader << '\n';
  for (const auto &r : rows) {
    out << r.realization << ',' << format_double(r.lambda) << ',' << format_double(r.n_over_p)
        << ',' << r.n_edges << ',' << format_double(r.re) << ',' << format_double(r.fs) << ','
        << r.outer_iters << ',' << r.inner_iters << ',' << r.status << ','
        << format_double(r.ms) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream &in) {
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    if (line_no == 1) {
      if (line != kResultsHeader)
        throw DataError("results file: unexpected header '" + line + "'");
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 10)
      throw DataError("results line " + std::to_string(line_no) + ": expected 10 fields");
    ResultRow r;
    r.realization = static_cast<int>(parse_field(f[0], line_no));
    r.lambda = parse_field(f[1], line_no);
    r.n_over_p = parse_field(f[2], line_no);
    r.n_edges = static_cast<Index>(parse_field(f[3], line_no));
    r.re = parse_field(f[4], line_no);
    r.fs = parse_field(f[5], line_no);
    r.outer_iters = static_cast<int>(parse_field(f[6], line_no));
    r.inner_iters = static_cast<int>(parse_field(f[7], line_no));
    r.status = f[8];
    r.ms = parse_field(f[9], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<ResultRow> &rows) {
  struct Bucket {
    std::vector<double> edges, re, fs, outer, inner;
    int failures = 0;
  };
  std::map<std::pair<double, double>, Bucket> buckets; // keyed by (n/p, lambda)
  for (const auto &r : rows) {
    auto &b = buckets[{r.n_over_p, r.lambda}];
    if (r.status == to_string(SolveStatus::NumericalFailure)) {
      ++b.failures;
      continue;
    }
    b.edges.push_back(double(r.n_edges));
    b.re.push_back(r.re);
    b.fs.push_back(r.fs);
    b.outer.push_back(r.outer_iters);
    b.inner.push_back(r.inner_iters);
  }
  std::vector<AggregateRow> out;
  for (const auto &[key, b] : buckets) {
    AggregateRow a;
    a.n_over_p = key.first;
    a.lambda = key.second;
    a.count = static_cast<int>(b.edges.size());
    a.failures = b.failures;
    a.n_edges = summarize(b.edges);
    a.re = summarize(b.re);
    a.fs = summarize(b.fs);
    a.outer_iters = summarize(b.outer);
    a.inner_iters = summarize(b.inner);
    out.push_back(a);
  }
  return out;
}

void write_aggregate_csv(std::ostream &out, const std::vector<AggregateRow> &agg) {
  out << "lambda,n_over_p,count,failures,n_edges_mean,n_edges_std,re_mean,re_std,fs_mean,fs_std,"
         "outer_iters_mean,outer_iters_std,inner_iters_mean,inner_iters_std\n";
  for (const auto &a : agg) {
    out << format_double(a.lambda) << ',' << format_double(a.n_over_p) << ',' << a.count << ','
        << a.failures;
    for (const auto *m : {&a.n_edges, &a.re, &a.fs, &a.outer_iters, &a.inner_iters})
      out << ',' << format_double(m->mean) << ',' << format_double(m->std);
    out << '\n';
  }
}

std::vector<std::string> emit_plot_tables(const std::vector<ResultRow> &rows,
                                          const std::string &dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto agg = aggregate(rows); // sorted by (n/p, lambda)
  auto by_ratio = agg;
  std::stable_sort(by_ratio.begin(), by_ratio.end(), [](const auto &a, const auto &b) {
    return std::pair(a.lambda, a.n_over_p) < std::pair(b.lambda, b.n_over_p);
  });

  struct Metric {
    const char *name;
    MetricSummary AggregateRow::*field;
  };
  const Metric metrics[] = {{"edges", &AggregateRow::n_edges},
                            {"re", &AggregateRow::re},
                            {"fs", &AggregateRow::fs}};

  std::vector<std::string> paths;
  for (const auto &m : metrics) {
    {
      const auto path = (fs::path(dir) / (std::string(m.name) + "_vs_lambda.csv")).string();
      std::ofstream out(path);
      out << "n_over_p,lambda,count,mean,std\n";
      for (const auto &a : agg)
        out << format_double(a.n_over_p) << ',' << format_double(a.lambda) << ',' << a.count
            << ',' << format_double((a.*m.field).mean) << ',' << format_double((a.*m.field).std)
            << '\n';
      paths.push_back(path);
    }
    {
      const auto path = (fs::path(dir) / (std::string(m.name) + "_vs_n_over_p.csv")).string();
      std::ofstream out(path);
      out << "lambda,n_over_p,count,mean,std\n";
      for (const auto &a : by_ratio)
        out << format_double(a.lambda) << ',' << format_double(a.n_over_p) << ',' << a.count
            << ',' << format_double((a.*m.field).mean) << ',' << format_double((a.*m.field).std)
            << '\n';
      paths.push_back(path);
    }
  }
  return paths;
}

std::string summary_path(const std::string &results_path) {
  std::filesystem::path path(results_path);
  const auto stem = path.stem().string();
  return (path.parent_path() / (stem + "_summary.csv")).string();
}

// ---------------------------------------------------------------- data

DataFitResult fit_data(const Matrix &X, const DataFitOptions &opts) {
  if (X.rows() < 2)
    throw DataError("need at least two variables, found " + std::to_string(X.rows()));
  const Matrix data = opts.center ? center_rows(X) : X;
  const Matrix S = opts.use_correlation ? correlation_matrix(data) : sample_covariance(data);

  DataFitResult out;
  out.p = X.rows();
  out.n = X.cols();
  const auto t0 = std::chrono::steady_clock::now();
  out.report = ngl::ngl(S, opts.penalty, opts.solver, default_initial_point(S, out.p, opts.init));
  out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void write_edge_list(std::ostream &out, const WeightVector &w, double edge_threshold) {
  const EdgeIndexMap map(w.nodes());
  out << "i,j,weight\n";
  for (Index k = 0; k < w.size(); ++k) {
    if (!(w[k] > edge_threshold))
      continue;
    const auto [i, j] = map.pair(k);
    out << i + 1 << ',' << j + 1 << ',' << format_double(w[k]) << '\n';
  }
}

nlohmann::json run_summary(const DataFitResult &fit, const DataFitOptions &opts) {
  const auto &rep = fit.report;
  nlohmann::json j;
  j["p"] = fit.p;
  j["n"] = fit.n;
  j["penalty"] = {{"kind", to_string(opts.penalty.kind)},
                  {"lambda", opts.penalty.lambda},
                  {"gamma", opts.penalty.gamma}};
  j["use_correlation"] = opts.use_correlation;
  j["center"] = opts.center;
  j["init"] = to_string(opts.init);
  j["status"] = to_string(rep.status);
  if (!rep.message.empty())
    j["message"] = rep.message;
  j["outer_iters"] = rep.outer_iters;
  j["inner_iters"] = rep.inner_iters;
  j["n_edges"] = count_edges(rep.w_hat, opts.solver.edge_threshold);
  j["edge_threshold"] = opts.solver.edge_threshold;
  j["objective_trace"] = rep.objective_trace;
  j["final_objective"] = rep.objective_trace.empty() ? nlohmann::json(nullptr)
                                                     : nlohmann::json(rep.objective_trace.back());
  j["ms"] = fit.ms;
  return j;
}

} // namespace ngl
