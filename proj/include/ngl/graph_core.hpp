#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ngl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Number of node pairs (i > j) of a p-node graph.
constexpr Index num_edges(Index p) { return p * (p - 1) / 2; }

/// Bijection between edge indices and node pairs (i > j).
///
/// Internally both nodes and edges are 0-based: edge k pairs nodes (i, j)
/// with i > j, ordered column by column of the strict lower triangle. The
/// free functions edge_index() / index_to_pair() expose the same map with
/// 1-based nodes and edges, k = i - j + (j - 1)(2p - j) / 2.
class EdgeIndexMap {
public:
  explicit EdgeIndexMap(Index p);

  Index nodes() const { return p_; }
  Index edges() const { return num_edges(p_); }

  /// 0-based edge index of the pair (i, j), i > j.
  Index index(Index i, Index j) const;
  /// 0-based pair (i, j), i > j, of edge k.
  std::pair<Index, Index> pair(Index k) const { return pairs_.at(static_cast<std::size_t>(k)); }

  const std::vector<std::pair<Index, Index>> &pairs() const { return pairs_; }

private:
  Index p_;
  std::vector<std::pair<Index, Index>> pairs_;
};

/// 1-based edge index of the node pair (i, j), 1 <= j < i <= p.
Index edge_index(Index i, Index j, Index p);
/// Inverse of edge_index(): 1-based k to the 1-based pair (i, j), i > j.
std::pair<Index, Index> index_to_pair(Index k, Index p);

/// Infer p from a half-vectorized length p(p-1)/2; throws if no such p.
Index nodes_from_edges(Index m);

/// Nonnegative edge weights of a p-node graph, half-vectorized.
class WeightVector {
public:
  WeightVector() = default;
  WeightVector(Index p, Vector values);
  static WeightVector zeros(Index p) { return {p, Vector::Zero(num_edges(p))}; }

  Index nodes() const { return p_; }
  Index size() const { return values_.size(); }
  const Vector &values() const { return values_; }
  Vector &values() { return values_; }
  double operator[](Index k) const { return values_[k]; }
  double &operator[](Index k) { return values_[k]; }

private:
  Index p_ = 0;
  Vector values_;
};

enum class LaplacianKind { Laplacian, LaplacianPlusJ };

struct LaplacianView {
  Matrix matrix;
  LaplacianKind kind = LaplacianKind::Laplacian;
};

/// Writes Lx into `out` (p x p). Matrix-free index loop.
void apply_L(const Eigen::Ref<const Vector> &x, Index p, Eigen::Ref<Matrix> out);
/// Lx for a length p(p-1)/2 vector; p is inferred from the length.
Matrix apply_L(const Eigen::Ref<const Vector> &x);
LaplacianView laplacian(const WeightVector &w);
/// Lw + J with J = (1/p) 11^T.
LaplacianView laplacian_plus_J(const WeightVector &w);

/// Adjoint of L: [L*Y]_k = Y_ii - Y_ij - Y_ji + Y_jj.
Vector apply_Lstar(const Eigen::Ref<const Matrix> &Y);

/// Gram operator M = L*L, materialized densely.
struct GramOperatorM {
  Index p = 0;
  Matrix matrix;
};

GramOperatorM build_M(Index p);

struct Feasibility {
  bool feasible = false;
  std::string diagnostic;
};

/// w >= 0 and Lw + J admits a Cholesky factorization.
Feasibility is_feasible(const WeightVector &w);

struct InverseStructure {
  Vector x;
  double residual = 0.0;
};

/// Recovers x with Lx + (1/b)J = (Lw + bJ)^{-1} from the off-diagonals of the
/// inverse; residual is the max-norm mismatch of that identity.
InverseStructure inverse_structure_check(const WeightVector &w, double b);

/// max |(Lx + (1/b)J) - (Lw + bJ)^{-1}| for a given x.
double inverse_structure_residual(const WeightVector &w, const Eigen::Ref<const Vector> &x,
                                  double b);

} // namespace ngl
