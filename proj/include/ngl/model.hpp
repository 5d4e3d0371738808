#pragma once

#include "ngl/graph_core.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace ngl {

/// Seedable generator used everywhere randomness enters.
using Rng = std::mt19937_64;

/// Seed of Monte Carlo realization r, derived from the experiment seed by a
/// splitmix64 mix so that cells can run in any order on any thread.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t realization);

struct WeightRange {
  double lo = 2.0;
  double hi = 5.0;
};

struct GroundTruthGraph {
  WeightVector w_star;
  std::vector<Index> support; // 0-based edge indices with w_star > 0

  Index nodes() const { return w_star.nodes(); }
  Index sparsity() const { return static_cast<Index>(support.size()); }
};

/// Builds the support list from the positive entries of w.
GroundTruthGraph make_ground_truth(WeightVector w);

/// Barabasi-Albert tree: each new node attaches to one existing node chosen
/// with probability proportional to its current degree.
GroundTruthGraph generate_ba_tree(Index p, WeightRange weights, std::uint64_t seed);

struct ModularOptions {
  Index n_modules = 4;
  double p_intra = 0.25;
  double p_inter = 0.005;
  WeightRange weights;
};

/// Random modular graph; disconnected draws are repaired by joining random
/// nodes of distinct components until the graph is connected.
GroundTruthGraph generate_modular(Index p, const ModularOptions &opts, std::uint64_t seed);

struct SampleSet {
  Matrix X; // p x n, one observation per column
  Matrix S; // (1/n) X X^T

  Index nodes() const { return X.rows(); }
  Index samples() const { return X.cols(); }
};

/// Draws n samples of the Laplacian-constrained GMRF with precision Lw*:
/// x~ ~ N(0, (Lw* + J)^{-1}) via Cholesky, then x = x~ - J x~.
SampleSet sample_lgmrf(const GroundTruthGraph &g, Index n, std::uint64_t seed);

/// (1/n) X X^T, X is p x n.
Matrix sample_covariance(const Eigen::Ref<const Matrix> &X);
/// D^{-1/2} Cov D^{-1/2}; throws DataError naming any zero-variance row.
Matrix correlation_matrix(const Eigen::Ref<const Matrix> &X);
/// Subtracts each row's mean.
Matrix center_rows(const Eigen::Ref<const Matrix> &X);

/// Moore-Penrose pseudoinverse of a symmetric matrix via eigendecomposition.
Matrix symmetric_pinv(const Eigen::Ref<const Matrix> &A, double rel_tol = 1e-10);

} // namespace ngl
