#pragma once

#include "ngl/graph_core.hpp"
#include "ngl/model.hpp"

#include <random>

namespace ngl::testing {

/// Random connected graph: a random spanning tree plus each remaining pair
/// with probability `extra`, weights uniform on [lo, hi].
inline WeightVector random_connected(Index p, Rng &rng, double extra = 0.3, double lo = 0.5,
                                     double hi = 2.0) {
  const EdgeIndexMap map(p);
  std::uniform_real_distribution<double> weight(lo, hi);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Vector w = Vector::Zero(map.edges());
  for (Index v = 1; v < p; ++v) {
    const Index u = std::uniform_int_distribution<Index>(0, v - 1)(rng);
    w[map.index(v, u)] = weight(rng);
  }
  for (Index k = 0; k < map.edges(); ++k)
    if (w[k] == 0.0 && coin(rng) < extra)
      w[k] = weight(rng);
  return {p, std::move(w)};
}

inline Vector random_vector(Index n, Rng &rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i)
    v[i] = normal(rng);
  return v;
}

inline Matrix random_matrix(Index rows, Index cols, Rng &rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r)
      m(r, c) = normal(rng);
  return m;
}

} // namespace ngl::testing
