#include "ngl/model.hpp"
#include "ngl/errors.hpp"

#include <numeric>
#include <sstream>

namespace ngl {

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t realization) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(base_seed) ^ realization);
}

GroundTruthGraph make_ground_truth(WeightVector w) {
  GroundTruthGraph g{std::move(w), {}};
  for (Index k = 0; k < g.w_star.size(); ++k)
    if (g.w_star[k] > 0.0)
      g.support.push_back(k);
  return g;
}

namespace {

void check_range(const WeightRange &r) {
  if (!(r.lo > 0.0 && r.lo <= r.hi))
    throw ArgumentError("weight range must satisfy 0 < lo <= hi");
}

double draw_weight(Rng &rng, const WeightRange &r) {
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

struct DisjointSets {
  std::vector<Index> parent;
  explicit DisjointSets(Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Index{0});
  }
  Index find(Index a) {
    while (parent[a] != a)
      a = parent[a] = parent[parent[a]];
    return a;
  }
  bool unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b)
      return false;
    parent[a] = b;
    return true;
  }
};

} // namespace

GroundTruthGraph generate_ba_tree(Index p, WeightRange weights, std::uint64_t seed) {
  check_range(weights);
  const EdgeIndexMap map(p);
  Rng rng(seed);
  Vector w = Vector::Zero(map.edges());
  // endpoint list: node v appears deg(v) times, so a uniform pick from it is
  // degree-proportional
  std::vector<Index> endpoints;
  endpoints.reserve(static_cast<std::size_t>(2 * (p - 1)));
  for (Index v = 1; v < p; ++v) {
    Index target = 0;
    if (!endpoints.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
      target = endpoints[pick(rng)];
    }
    w[map.index(v, target)] = draw_weight(rng, weights);
    endpoints.push_back(v);
    endpoints.push_back(target);
  }
  return make_ground_truth(WeightVector(p, std::move(w)));
}

GroundTruthGraph generate_modular(Index p, const ModularOptions &opts, std::uint64_t seed) {
  check_range(opts.weights);
  if (opts.n_modules < 1 || opts.n_modules > p)
    throw ArgumentError("modular graph: need 1 <= n_modules <= p");
  if (!(opts.p_intra >= 0.0 && opts.p_intra <= 1.0 && opts.p_inter >= 0.0 && opts.p_inter <= 1.0))
    throw ArgumentError("modular graph: probabilities must lie in [0, 1]");

  const EdgeIndexMap map(p);
  Rng rng(seed);

  // contiguous modules; the first p % n_modules modules get one extra node
  std::vector<Index> module_of(static_cast<std::size_t>(p));
  const Index base = p / opts.n_modules;
  const Index extra = p % opts.n_modules;
  for (Index m = 0, node = 0; m < opts.n_modules; ++m)
    for (Index c = 0; c < base + (m < extra ? 1 : 0); ++c)
      module_of[node++] = m;

  Vector w = Vector::Zero(map.edges());
  DisjointSets components(p);
  std::bernoulli_distribution intra(opts.p_intra);
  std::bernoulli_distribution inter(opts.p_inter);
  for (Index k = 0; k < map.edges(); ++k) {
    const auto [i, j] = map.pair(k);
    const bool edge = module_of[i] == module_of[j] ? intra(rng) : inter(rng);
    if (edge) {
      w[k] = draw_weight(rng, opts.weights);
      components.unite(i, j);
    }
  }

  Index n_components = 0;
  for (Index v = 0; v < p; ++v)
    n_components += components.find(v) == v ? 1 : 0;

  std::uniform_int_distribution<Index> node(0, p - 1);
  while (n_components > 1) {
    const Index a = node(rng);
    const Index b = node(rng);
    if (a == b || !components.unite(a, b))
      continue;
    w[map.index(std::max(a, b), std::min(a, b))] = draw_weight(rng, opts.weights);
    --n_components;
  }
  return make_ground_truth(WeightVector(p, std::move(w)));
}

SampleSet sample_lgmrf(const GroundTruthGraph &g, Index n, std::uint64_t seed) {
  if (n < 1)
    throw ArgumentError("sample_lgmrf: need n >= 1");
  const Index p = g.nodes();
  const Eigen::LLT<Matrix> llt(laplacian_plus_J(g.w_star).matrix);
  if (llt.info() != Eigen::Success)
    throw ModelError("sample_lgmrf: Lw* + J is not positive definite (graph not connected)");

  Rng rng(seed);
  std::normal_distribution<double> normal;
  Matrix X(p, n);
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < p; ++r)
      X(r, c) = normal(rng);
  // A = U^T U with U upper; U^{-1} zeta has covariance A^{-1}
  llt.matrixU().solveInPlace(X);
  X.rowwise() -= X.colwise().mean();

  SampleSet out;
  out.S = sample_covariance(X);
  out.X = std::move(X);
  return out;
}

Matrix sample_covariance(const Eigen::Ref<const Matrix> &X) {
  if (X.cols() < 1)
    throw ArgumentError("sample_covariance: need at least one sample");
  Matrix S = Matrix::Zero(X.rows(), X.rows());
  S.selfadjointView<Eigen::Lower>().rankUpdate(X, 1.0 / double(X.cols()));
  return S.selfadjointView<Eigen::Lower>();
}

Matrix correlation_matrix(const Eigen::Ref<const Matrix> &X) {
  Matrix C = sample_covariance(X);
  Vector scale(C.rows());
  for (Index r = 0; r < C.rows(); ++r) {
    if (!(C(r, r) > 0.0)) {
      std::ostringstream msg;
      msg << "variable " << r + 1 << " has zero variance; correlation is undefined";
      throw DataError(msg.str());
    }
    scale[r] = 1.0 / std::sqrt(C(r, r));
  }
  C = scale.asDiagonal() * C * scale.asDiagonal();
  C.diagonal().setOnes();
  return C;
}

Matrix center_rows(const Eigen::Ref<const Matrix> &X) {
  Matrix out = X;
  out.colwise() -= X.rowwise().mean();
  return out;
}

Matrix symmetric_pinv(const Eigen::Ref<const Matrix> &A, double rel_tol) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
  const Vector &vals = eig.eigenvalues();
  const double cutoff = rel_tol * vals.cwiseAbs().maxCoeff();
  Vector inv(vals.size());
  for (Index i = 0; i < vals.size(); ++i)
    inv[i] = std::abs(vals[i]) > cutoff ? 1.0 / vals[i] : 0.0;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

} // namespace ngl
