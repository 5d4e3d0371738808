#include "ngl/solver.hpp"
#include "ngl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ngl {

void SolverOptions::validate() const {
  if (!(eta0 > 0.0))
    throw ArgumentError("solver: eta0 must be > 0");
  if (!(beta > 0.0 && beta < 1.0))
    throw ArgumentError("solver: beta must lie in (0, 1)");
  if (!(tol_inner > 0.0) || !(tol_outer > 0.0))
    throw ArgumentError("solver: tolerances must be > 0");
  if (max_inner < 1 || max_outer < 1)
    throw ArgumentError("solver: iteration caps must be >= 1");
  if (!(edge_threshold >= 0.0))
    throw ArgumentError("solver: edge_threshold must be >= 0");
}

StepPolicy parse_step_policy(std::string_view name) {
  if (name == "expand")
    return StepPolicy::Expand;
  if (name == "retain")
    return StepPolicy::Retain;
  throw ArgumentError("unknown step policy '" + std::string(name) + "' (expected expand or retain)");
}

std::string to_string(StepPolicy policy) {
  return policy == StepPolicy::Expand ? "expand" : "retain";
}

std::string to_string(SolveStatus status) {
  switch (status) {
  case SolveStatus::Converged:
    return "converged";
  case SolveStatus::MaxIter:
    return "max_iter";
  case SolveStatus::NumericalFailure:
    return "numerical_failure";
  }
  return "?";
}

int SolveReport::total_inner_iters() const {
  return std::accumulate(inner_iters.begin(), inner_iters.end(), 0);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxBacktracks = 200;

/// Objective pieces that do not change within a subproblem.
class Subproblem {
public:
  Subproblem(const Matrix &S, const Vector &z, Index p)
      : p_(p), linear_(apply_Lstar(S) + z), A_(p, p) {
    if (S.rows() != p || S.cols() != p)
      throw ArgumentError("solver: S must be p x p");
    if (z.size() != num_edges(p))
      throw ArgumentError("solver: z must have length p(p-1)/2");
    if (!S.allFinite())
      throw ArgumentError("solver: S has non-finite entries");
  }

  /// Factorizes Lw + J; returns +inf when it is not PD.
  double value(const Vector &w, Eigen::LLT<Matrix> &llt) {
    apply_L(w, p_, A_);
    A_.array() += 1.0 / double(p_);
    llt.compute(A_);
    if (llt.info() != Eigen::Success)
      return kInf;
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -logdet + linear_.dot(w);
  }

  Vector gradient(const Eigen::LLT<Matrix> &llt) const {
    const Matrix inv = llt.solve(Matrix::Identity(p_, p_));
    return linear_ - apply_Lstar(inv);
  }

private:
  Index p_;
  Vector linear_; // L*S + z
  Matrix A_;
};

double relative_change(const Vector &next, const Vector &prev) {
  return (next - prev).norm() / std::max(1.0, prev.norm());
}

} // namespace

double objective(const WeightVector &w, const Matrix &S, const Vector &z) {
  Subproblem sub(S, z, w.nodes());
  Eigen::LLT<Matrix> llt;
  return sub.value(w.values(), llt);
}

Vector gradient(const WeightVector &w, const Matrix &S, const Vector &z) {
  Subproblem sub(S, z, w.nodes());
  Eigen::LLT<Matrix> llt;
  if (!std::isfinite(sub.value(w.values(), llt))) {
    std::ostringstream msg;
    msg << "gradient: Lw + J is not positive definite at w = [" << w.values().transpose() << "]";
    throw NumericalError(msg.str());
  }
  return sub.gradient(llt);
}

SolveReport solve_subproblem(const SubproblemSpec &spec, const SolverOptions &opts) {
  opts.validate();
  const Index p = spec.w0.nodes();
  if ((spec.z.array() < 0.0).any())
    throw ArgumentError("solve_subproblem: z must be nonnegative");
  Subproblem sub(spec.S, spec.z, p);

  SolveReport report;
  report.outer_iters = 1;
  Vector w = spec.w0.values();
  Eigen::LLT<Matrix> llt(p);
  double f = sub.value(w, llt);
  if ((w.array() < 0.0).any() || !std::isfinite(f))
    throw ArgumentError("solve_subproblem: initial point is infeasible");
  report.objective_trace.push_back(f);
  if (opts.keep_iterates)
    report.iterates.push_back(w);

  double eta = opts.eta0;
  int iters = 0;
  report.status = SolveStatus::MaxIter;
  Eigen::LLT<Matrix> trial_llt(p);
  Vector trial(w.size());

  while (iters < opts.max_inner) {
    const Vector g = sub.gradient(llt);
    if (!g.allFinite()) {
      report.status = SolveStatus::NumericalFailure;
      report.message = "non-finite gradient";
      break;
    }

    if (opts.step_policy == StepPolicy::Expand)
      eta = std::min(opts.eta0, eta / opts.beta);
    bool accepted = false;
    bool stalled = false;
    double f_trial = kInf;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      trial = (w - eta * g).cwiseMax(0.0);
      const Vector step = trial - w;
      f_trial = sub.value(trial, trial_llt);
      const double bound = f + g.dot(step) + step.squaredNorm() / (2.0 * eta);
      // an infeasible trial has f_trial = +inf and fails the test
      if (f_trial <= bound && f_trial <= f) {
        accepted = true;
        break;
      }
      if (relative_change(trial, w) < opts.tol_inner) {
        // rounding noise only; w is as good as this step size can make it
        stalled = true;
        break;
      }
      eta *= opts.beta;
    }
    if (stalled) {
      report.status = SolveStatus::Converged;
      break;
    }
    if (!accepted) {
      report.status = SolveStatus::NumericalFailure;
      report.message = "backtracking failed to find an admissible step";
      break;
    }

    const double change = relative_change(trial, w);
    w.swap(trial);
    std::swap(llt, trial_llt);
    f = f_trial;
    ++iters;
    report.objective_trace.push_back(f);
    report.step_trace.push_back(eta);
    if (opts.keep_iterates)
      report.iterates.push_back(w);
    if (change < opts.tol_inner) {
      report.status = SolveStatus::Converged;
      break;
    }
  }

  report.inner_iters.push_back(iters);
  report.w_hat = WeightVector(p, std::move(w));
  return report;
}

SolveReport ngl(const Matrix &S, const PenaltySpec &penalty, const SolverOptions &opts,
                const WeightVector &w0) {
  penalty.validate();
  opts.validate();

  SolveReport report;
  report.status = SolveStatus::MaxIter;
  WeightVector w_prev = w0;
  Vector z_prev;
  bool prev_converged = false;

  for (int k = 1; k <= opts.max_outer; ++k) {
    Vector z = mm_weights(penalty, w_prev);
    if (prev_converged && z == z_prev) {
      // same subproblem as the last one, already solved to tolerance
      report.status = SolveStatus::Converged;
      break;
    }
    SolveReport inner = solve_subproblem({S, z, w_prev}, opts);
    report.outer_iters = k;
    report.objective_trace.insert(report.objective_trace.end(), inner.objective_trace.begin(),
                                  inner.objective_trace.end());
    report.step_trace.insert(report.step_trace.end(), inner.step_trace.begin(),
                             inner.step_trace.end());
    report.inner_iters.push_back(inner.inner_iters.front());
    if (opts.keep_iterates)
      for (auto &it : inner.iterates)
        report.iterates.push_back(std::move(it));

    if (inner.status == SolveStatus::NumericalFailure) {
      report.status = SolveStatus::NumericalFailure;
      report.message = "outer iteration " + std::to_string(k) + ": " + inner.message;
      report.w_hat = std::move(inner.w_hat);
      return report;
    }

    const double change = relative_change(inner.w_hat.values(), w_prev.values());
    prev_converged = inner.status == SolveStatus::Converged;
    w_prev = std::move(inner.w_hat);
    z_prev = std::move(z);
    if (change < opts.tol_outer) {
      report.status = SolveStatus::Converged;
      break;
    }
  }
  report.w_hat = std::move(w_prev);
  return report;
}

SolveReport fit_l1(const Matrix &S, double lambda, const SolverOptions &opts,
                   const WeightVector &w0) {
  if (!(lambda >= 0.0))
    throw ArgumentError("fit_l1: lambda must be >= 0");
  return solve_subproblem({S, Vector::Constant(w0.size(), lambda), w0}, opts);
}

InitStrategy parse_init_strategy(std::string_view name) {
  if (name == "star")
    return InitStrategy::Star;
  if (name == "spanning-tree")
    return InitStrategy::SpanningTree;
  if (name == "uniform")
    return InitStrategy::UniformDense;
  throw ArgumentError("unknown initial point '" + std::string(name) +
                      "' (expected star, spanning-tree or uniform)");
}

std::string to_string(InitStrategy strategy) {
  switch (strategy) {
  case InitStrategy::Star:
    return "star";
  case InitStrategy::SpanningTree:
    return "spanning-tree";
  case InitStrategy::UniformDense:
    return "uniform";
  }
  return "?";
}

WeightVector default_initial_point(const Matrix &S, Index p, InitStrategy strategy) {
  const EdgeIndexMap map(p);
  Vector w = Vector::Zero(map.edges());
  switch (strategy) {
  case InitStrategy::Star:
    for (Index i = 1; i < p; ++i)
      w[map.index(i, 0)] = 1.0;
    break;
  case InitStrategy::UniformDense:
    w.setOnes();
    break;
  case InitStrategy::SpanningTree: {
    if (S.rows() != p || S.cols() != p)
      throw ArgumentError("default_initial_point: S must be p x p");
    // Prim's algorithm on d_ij = S_ii + S_jj - 2 S_ij
    const Vector dist = apply_Lstar(S);
    std::vector<bool> in_tree(static_cast<std::size_t>(p), false);
    std::vector<double> best(static_cast<std::size_t>(p), kInf);
    std::vector<Index> link(static_cast<std::size_t>(p), 0);
    in_tree[0] = true;
    for (Index v = 1; v < p; ++v) {
      best[v] = dist[map.index(v, 0)];
    }
    for (Index added = 1; added < p; ++added) {
      Index next = -1;
      for (Index v = 0; v < p; ++v)
        if (!in_tree[v] && (next < 0 || best[v] < best[next]))
          next = v;
      in_tree[next] = true;
      w[map.index(std::max(next, link[next]), std::min(next, link[next]))] = 1.0;
      for (Index v = 0; v < p; ++v) {
        if (in_tree[v])
          continue;
        const double d = dist[map.index(std::max(v, next), std::min(v, next))];
        if (d < best[v]) {
          best[v] = d;
          link[v] = next;
        }
      }
    }
    break;
  }
  }
  return {p, std::move(w)};
}

} // namespace ngl
