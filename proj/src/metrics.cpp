#include "ngl/metrics.hpp"
#include "ngl/errors.hpp"

namespace ngl {

Index count_edges(const WeightVector &w, double edge_threshold) {
  return (w.values().array() > edge_threshold).count();
}

EvalResult evaluate(const WeightVector &w_hat, const WeightVector &w_star, double edge_threshold) {
  if (w_hat.nodes() != w_star.nodes() || w_hat.size() != w_star.size())
    throw ArgumentError("evaluate: weight vectors describe different graphs");

  const Matrix theta_star = laplacian(w_star).matrix;
  const double norm_star = theta_star.norm();
  if (norm_star == 0.0)
    throw ArgumentError("evaluate: true graph has no edges (zero Frobenius norm)");

  EvalResult r;
  r.relative_error = (laplacian(w_hat).matrix - theta_star).norm() / norm_star;
  for (Index k = 0; k < w_hat.size(); ++k) {
    const bool hat = w_hat[k] > edge_threshold;
    const bool truth = w_star[k] > 0.0;
    r.tp += hat && truth;
    r.fp += hat && !truth;
    r.fn += !hat && truth;
  }
  r.n_edges_hat = r.tp + r.fp;
  r.n_edges_true = r.tp + r.fn;
  const Index denom = 2 * r.tp + r.fp + r.fn;
  r.f_score = denom > 0 ? 2.0 * double(r.tp) / double(denom) : 1.0;
  return r;
}

} // namespace ngl
