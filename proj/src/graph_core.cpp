#include "ngl/graph_core.hpp"
#include "ngl/errors.hpp"

#include <cmath>
#include <sstream>

namespace ngl {

EdgeIndexMap::EdgeIndexMap(Index p) : p_(p) {
  if (p < 2)
    throw ArgumentError("EdgeIndexMap: need p >= 2, got " + std::to_string(p));
  pairs_.reserve(static_cast<std::size_t>(num_edges(p)));
  for (Index j = 0; j < p; ++j)
    for (Index i = j + 1; i < p; ++i)
      pairs_.emplace_back(i, j);
}

Index EdgeIndexMap::index(Index i, Index j) const {
  if (!(0 <= j && j < i && i < p_)) {
    std::ostringstream msg;
    msg << "EdgeIndexMap: pair (" << i << ", " << j << ") out of range for p = " << p_;
    throw ArgumentError(msg.str());
  }
  // 0-based form of k = i - j + (j - 1)(2p - j)/2.
  return (i - j - 1) + j * (2 * p_ - j - 1) / 2;
}

Index edge_index(Index i, Index j, Index p) {
  if (p < 2 || !(1 <= j && j < i && i <= p)) {
    std::ostringstream msg;
    msg << "edge_index: need 1 <= j < i <= p, got (" << i << ", " << j << ", " << p << ")";
    throw ArgumentError(msg.str());
  }
  return i - j + (j - 1) * (2 * p - j) / 2;
}

std::pair<Index, Index> index_to_pair(Index k, Index p) {
  if (p < 2 || k < 1 || k > num_edges(p)) {
    std::ostringstream msg;
    msg << "index_to_pair: k = " << k << " out of range for p = " << p;
    throw ArgumentError(msg.str());
  }
  // column j holds p - j entries; walk columns until k falls inside one
  Index j = 1;
  Index start = 1;
  while (k >= start + (p - j)) {
    start += p - j;
    ++j;
  }
  return {j + 1 + (k - start), j};
}

Index nodes_from_edges(Index m) {
  const auto p = static_cast<Index>(std::llround((1.0 + std::sqrt(1.0 + 8.0 * double(m))) / 2.0));
  if (p < 2 || num_edges(p) != m)
    throw ArgumentError("length " + std::to_string(m) + " is not p(p-1)/2 for any p >= 2");
  return p;
}

WeightVector::WeightVector(Index p, Vector values) : p_(p), values_(std::move(values)) {
  if (p < 2)
    throw ArgumentError("WeightVector: need p >= 2, got " + std::to_string(p));
  if (values_.size() != num_edges(p)) {
    std::ostringstream msg;
    msg << "WeightVector: length " << values_.size() << " does not match p(p-1)/2 = "
        << num_edges(p);
    throw ArgumentError(msg.str());
  }
}

void apply_L(const Eigen::Ref<const Vector> &x, Index p, Eigen::Ref<Matrix> out) {
  if (x.size() != num_edges(p))
    throw ArgumentError("apply_L: length mismatch");
  if (out.rows() != p || out.cols() != p)
    throw ArgumentError("apply_L: output must be p x p");
  out.setZero();
  Index k = 0;
  for (Index j = 0; j < p; ++j) {
    for (Index i = j + 1; i < p; ++i, ++k) {
      const double v = x[k];
      out(i, j) = -v;
      out(j, i) = -v;
      out(i, i) += v;
      out(j, j) += v;
    }
  }
}

Matrix apply_L(const Eigen::Ref<const Vector> &x) {
  const Index p = nodes_from_edges(x.size());
  Matrix out(p, p);
  apply_L(x, p, out);
  return out;
}

LaplacianView laplacian(const WeightVector &w) {
  LaplacianView view{Matrix(w.nodes(), w.nodes()), LaplacianKind::Laplacian};
  apply_L(w.values(), w.nodes(), view.matrix);
  return view;
}

LaplacianView laplacian_plus_J(const WeightVector &w) {
  auto view = laplacian(w);
  view.matrix.array() += 1.0 / double(w.nodes());
  view.kind = LaplacianKind::LaplacianPlusJ;
  return view;
}

Vector apply_Lstar(const Eigen::Ref<const Matrix> &Y) {
  if (Y.rows() != Y.cols())
    throw ArgumentError("apply_Lstar: matrix must be square");
  const Index p = Y.rows();
  if (p < 2)
    throw ArgumentError("apply_Lstar: need p >= 2");
  Vector out(num_edges(p));
  Index k = 0;
  for (Index j = 0; j < p; ++j)
    for (Index i = j + 1; i < p; ++i, ++k)
      out[k] = Y(i, i) - Y(i, j) - Y(j, i) + Y(j, j);
  return out;
}

GramOperatorM build_M(Index p) {
  const EdgeIndexMap map(p);
  const Index m = map.edges();
  GramOperatorM M{p, Matrix::Zero(m, m)};
  for (Index k = 0; k < m; ++k) {
    const auto [i, j] = map.pair(k);
    for (Index l = 0; l < m; ++l) {
      if (l == k) {
        M.matrix(k, l) = 4.0;
        continue;
      }
      const auto [a, b] = map.pair(l);
      if (a == i || a == j || b == i || b == j)
        M.matrix(k, l) = 1.0;
    }
  }
  return M;
}

Feasibility is_feasible(const WeightVector &w) {
  for (Index k = 0; k < w.size(); ++k) {
    if (!(w[k] >= 0.0)) {
      std::ostringstream msg;
      msg << "weight " << k << " is negative (" << w[k] << ")";
      return {false, msg.str()};
    }
  }
  const Eigen::LLT<Matrix> llt(laplacian_plus_J(w).matrix);
  if (llt.info() != Eigen::Success)
    return {false, "Lw + J is not positive definite (graph disconnected)"};
  return {true, {}};
}

namespace {

Matrix inverse_of_shifted(const WeightVector &w, double b) {
  Matrix A = laplacian(w).matrix;
  A.array() += b / double(w.nodes());
  const Eigen::PartialPivLU<Matrix> lu(A);
  if (!std::isfinite(lu.determinant()) || lu.determinant() == 0.0)
    throw NumericalError("inverse_structure_check: Lw + bJ is singular");
  return lu.inverse();
}

} // namespace

double inverse_structure_residual(const WeightVector &w, const Eigen::Ref<const Vector> &x,
                                  double b) {
  if (b == 0.0)
    throw ArgumentError("inverse_structure_check: b must be nonzero");
  const Matrix inv = inverse_of_shifted(w, b);
  Matrix rebuilt = apply_L(x);
  rebuilt.array() += 1.0 / (b * double(w.nodes()));
  return (rebuilt - inv).cwiseAbs().maxCoeff();
}

InverseStructure inverse_structure_check(const WeightVector &w, double b) {
  if (b == 0.0)
    throw ArgumentError("inverse_structure_check: b must be nonzero");
  const Index p = w.nodes();
  const Matrix inv = inverse_of_shifted(w, b);
  // off-diagonals of Lx are -x_k, and J contributes 1/(bp) to every entry
  const double shift = 1.0 / (b * double(p));
  InverseStructure out{Vector(w.size()), 0.0};
  Index k = 0;
  for (Index j = 0; j < p; ++j)
    for (Index i = j + 1; i < p; ++i, ++k)
      out.x[k] = -(0.5 * (inv(i, j) + inv(j, i)) - shift);
  Matrix rebuilt = apply_L(out.x);
  rebuilt.array() += shift;
  out.residual = (rebuilt - inv).cwiseAbs().maxCoeff();
  return out;
}

} // namespace ngl
