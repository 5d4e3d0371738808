#pragma once

#include "ngl/graph_core.hpp"
#include "ngl/penalty.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ngl {

/// How the step size carries over between inner iterations. Retain starts
/// each backtracking search from the last accepted step; Expand first tries
/// min(eta0, eta / beta).
enum class StepPolicy { Expand, Retain };

StepPolicy parse_step_policy(std::string_view name);
std::string to_string(StepPolicy policy);

struct SolverOptions {
  double eta0 = 1.0;
  double beta = 0.5;
  double tol_inner = 1e-7;
  int max_inner = 5000;
  double tol_outer = 1e-6;
  int max_outer = 50;
  double edge_threshold = 1e-5;
  StepPolicy step_policy = StepPolicy::Expand;
  /// Store every accepted inner iterate in SolveReport::iterates.
  bool keep_iterates = false;

  void validate() const;
};

enum class SolveStatus { Converged, MaxIter, NumericalFailure };

std::string to_string(SolveStatus status);

struct SolveReport {
  WeightVector w_hat;
  /// Objective of each inner solve: its starting value, then one entry per
  /// accepted iterate. Segment k holds inner_iters[k] + 1 values.
  std::vector<double> objective_trace;
  /// Accepted step size of every inner iteration, concatenated.
  std::vector<double> step_trace;
  std::vector<int> inner_iters;
  int outer_iters = 0;
  SolveStatus status = SolveStatus::Converged;
  std::string message;
  std::vector<Vector> iterates;

  int total_inner_iters() const;
};

/// One MM subproblem: minimize -log det(Lw + J) + tr(S Lw) + <z, w> over w >= 0.
struct SubproblemSpec {
  Matrix S;
  Vector z;
  WeightVector w0;
};

/// -log det(Lw + J) + <L*S, w> + <z, w>; +inf when Lw + J is not PD.
double objective(const WeightVector &w, const Matrix &S, const Vector &z);

/// -L*((Lw + J)^{-1}) + L*S + z. Throws NumericalError if Lw + J is not PD.
Vector gradient(const WeightVector &w, const Matrix &S, const Vector &z);

/// Projected gradient descent with backtracking on one subproblem.
SolveReport solve_subproblem(const SubproblemSpec &spec, const SolverOptions &opts);

/// Majorization-minimization outer loop: reweights z = h'(w) and re-solves
/// the subproblem warm-started at the previous solution.
SolveReport ngl(const Matrix &S, const PenaltySpec &penalty, const SolverOptions &opts,
                const WeightVector &w0);

/// The l1-penalized estimator: a single subproblem with z = lambda * 1.
SolveReport fit_l1(const Matrix &S, double lambda, const SolverOptions &opts,
                   const WeightVector &w0);

enum class InitStrategy { Star, SpanningTree, UniformDense };

InitStrategy parse_init_strategy(std::string_view name);
std::string to_string(InitStrategy strategy);

/// Star: unit weights on edges (i, 1). SpanningTree: unit weights on a
/// minimum spanning tree of the pairwise distances L*S. UniformDense: all
/// weights 1.
WeightVector default_initial_point(const Matrix &S, Index p,
                                   InitStrategy strategy = InitStrategy::SpanningTree);

} // namespace ngl
