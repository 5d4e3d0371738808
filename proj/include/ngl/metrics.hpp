#pragma once

#include "ngl/graph_core.hpp"

namespace ngl {

struct EvalResult {
  double relative_error = 0.0;
  double f_score = 0.0;
  Index n_edges_hat = 0;
  Index n_edges_true = 0;
  Index tp = 0;
  Index fp = 0;
  Index fn = 0;
};

/// Positive edges: |{k : w_k > edge_threshold}|.
Index count_edges(const WeightVector &w, double edge_threshold);

/// Relative Frobenius error of Lw_hat against Lw_star and the F-score of the
/// thresholded support of w_hat against the exact support of w_star.
/// Two empty supports score F = 1.
EvalResult evaluate(const WeightVector &w_hat, const WeightVector &w_star, double edge_threshold);

} // namespace ngl
