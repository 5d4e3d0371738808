#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ngl/errors.hpp"
#include "ngl/metrics.hpp"
#include "ngl/model.hpp"
#include "ngl/solver.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace ngl;

namespace {

Matrix random_covariance(Index p, Index n, Rng &rng) {
  const Matrix X = testing::random_matrix(p, n, rng);
  return sample_covariance(X);
}

bool segments_nonincreasing(const SolveReport &rep) {
  std::size_t pos = 0;
  for (int iters : rep.inner_iters) {
    for (int t = 0; t < iters; ++t)
      if (rep.objective_trace[pos + t + 1] > rep.objective_trace[pos + t])
        return false;
    pos += static_cast<std::size_t>(iters) + 1;
  }
  return pos == rep.objective_trace.size();
}

SolverOptions tight() {
  SolverOptions o;
  o.tol_inner = 1e-10;
  o.max_inner = 200000;
  return o;
}

} // namespace

TEST_CASE("objective worked examples") {
  const WeightVector w(2, Vector::Ones(1));
  CHECK(objective(w, Matrix::Zero(2, 2), Vector::Zero(1)) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-14));
  CHECK(std::isinf(objective(WeightVector::zeros(4), Matrix::Zero(4, 4), Vector::Zero(6))));
}

TEST_CASE("trace identity and the determinant form of the l1 objective") {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const Index p = 3 + t % 6;
    const WeightVector w = testing::random_connected(p, rng);
    const Matrix S = random_covariance(p, 3 * p, rng);
    const Matrix Theta = laplacian(w).matrix;
    CHECK(std::abs((S * Theta).trace() - apply_Lstar(S).dot(w.values())) < 1e-10);

    const double lambda = 0.3;
    const double direct = -std::log((Theta + Matrix::Constant(p, p, 1.0 / double(p))).determinant()) +
                          (Theta * S).trace() + lambda * w.values().lpNorm<1>();
    CHECK(objective(w, S, Vector::Constant(w.size(), lambda)) ==
          doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(21);
  const Index p = 6;
  const double h = 1e-6;
  for (int t = 0; t < 20; ++t) {
    const WeightVector w = testing::random_connected(p, rng, 0.5, 0.5, 2.0);
    const Matrix S = random_covariance(p, 30, rng);
    const Vector z = testing::random_vector(w.size(), rng).cwiseAbs();
    const Vector g = gradient(w, S, z);
    Vector fd(w.size());
    for (Index k = 0; k < w.size(); ++k) {
      Vector up = w.values(), down = w.values();
      up[k] += h;
      down[k] -= h;
      fd[k] = (objective({p, up}, S, z) - objective({p, down}, S, z)) / (2.0 * h);
    }
    CHECK((fd - g).cwiseAbs().maxCoeff() / std::max(1.0, g.cwiseAbs().maxCoeff()) < 1e-5);

    const Vector g0 = gradient(w, S, Vector::Zero(w.size()));
    CHECK((g - g0 - z).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(gradient(WeightVector::zeros(4), Matrix::Zero(4, 4), Vector::Zero(6)),
                  NumericalError);
}

TEST_CASE("gradient at the S = 0 l1 stationary point is symmetric") {
  for (auto [p, lambda] : {std::pair<Index, double>{5, 2.0}, {8, 0.5}}) {
    const WeightVector w(p, Vector::Constant(num_edges(p), 2.0 / (double(p) * lambda)));
    const Vector g = gradient(w, Matrix::Zero(p, p), Vector::Constant(w.size(), lambda));
    CHECK(g.maxCoeff() - g.minCoeff() < 1e-12);
    CHECK(g.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("solve_subproblem: S = 0 closed form") {
  const Index p = 5;
  const double lambda = 2.0;
  const SubproblemSpec spec{Matrix::Zero(p, p), Vector::Constant(num_edges(p), lambda),
                            default_initial_point(Matrix::Zero(p, p), p, InitStrategy::Star)};
  const auto rep = solve_subproblem(spec, tight());
  CHECK(rep.status == SolveStatus::Converged);
  CHECK((rep.w_hat.values().array() - 0.2).abs().maxCoeff() < 1e-6);
  CHECK(segments_nonincreasing(rep));
}

TEST_CASE("solve_subproblem recovers w* from the exact covariance") {
  Rng rng(4);
  for (Index p : {4, 6, 8}) {
    const WeightVector w_star = testing::random_connected(p, rng, 0.4);
    const Matrix S = symmetric_pinv(laplacian(w_star).matrix);
    const WeightVector w0 = default_initial_point(S, p);
    const auto rep = solve_subproblem({S, Vector::Zero(w0.size()), w0}, tight());
    CHECK(rep.status == SolveStatus::Converged);
    CHECK((rep.w_hat.values() - w_star.values()).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("one hand-stepped iteration at p = 2") {
  Matrix S(2, 2);
  S << 1.0, 0.2, 0.2, 0.5;
  const double z = 0.3;
  // det(Lw + J) = 2w, so g = -1/w + (S11 + S22 - 2 S12) + z = -1 + 1.1 + 0.3
  const double g = 0.4;
  const WeightVector w0(2, Vector::Ones(1));
  CHECK(gradient(w0, S, Vector::Constant(1, z))[0] == doctest::Approx(g).epsilon(1e-14));

  SolverOptions opts;
  opts.eta0 = 0.01;
  opts.max_inner = 1;
  const auto rep = solve_subproblem({S, Vector::Constant(1, z), w0}, opts);
  REQUIRE(rep.inner_iters.front() == 1);
  CHECK(rep.step_trace.front() == 0.01);
  CHECK(rep.w_hat[0] == doctest::Approx(std::max(0.0, 1.0 - 0.01 * g)).epsilon(1e-14));
}

TEST_CASE("solve_subproblem rejects bad inputs") {
  const Matrix S = Matrix::Zero(4, 4);
  const WeightVector star = default_initial_point(S, 4, InitStrategy::Star);
  CHECK_THROWS_AS(solve_subproblem({S, -Vector::Ones(6), star}, {}), ArgumentError);
  CHECK_THROWS_AS(solve_subproblem({S, Vector::Ones(6), WeightVector::zeros(4)}, {}),
                  ArgumentError);
  CHECK_THROWS_AS(solve_subproblem({Matrix::Zero(3, 3), Vector::Ones(6), star}, {}),
                  ArgumentError);
  SolverOptions bad;
  bad.beta = 1.0;
  CHECK_THROWS_AS(solve_subproblem({S, Vector::Ones(6), star}, bad), ArgumentError);
}

TEST_CASE("non-finite covariance is rejected") {
  Matrix S = Matrix::Identity(4, 4);
  S(1, 2) = S(2, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ngl::ngl(S, PenaltySpec::mcp(0.1), {},
                           default_initial_point(S, 4, InitStrategy::Star)),
                  ArgumentError);
}

TEST_CASE("iterates stay feasible and objective traces never increase") {
  Rng rng(33);
  SolverOptions opts;
  opts.keep_iterates = true;
  for (int t = 0; t < 6; ++t) {
    const auto g = generate_ba_tree(12, {}, 100 + t);
    const auto s = sample_lgmrf(g, 12 * 20, 200 + t);
    for (auto pen : {PenaltySpec::mcp(0.3), PenaltySpec::scad(0.3), PenaltySpec::l1(0.05)}) {
      const auto rep = ngl::ngl(s.S, pen, opts, default_initial_point(s.S, 12));
      CHECK(rep.status == SolveStatus::Converged);
      CHECK(segments_nonincreasing(rep));
      for (const auto &w : rep.iterates)
        REQUIRE(is_feasible(WeightVector(12, w)).feasible);
      CHECK(rep.step_trace.size() == static_cast<std::size_t>(rep.total_inner_iters()));
    }
  }
}

TEST_CASE("l1 penalty and lambda = 0 reduce to a single subproblem") {
  const auto g = generate_ba_tree(10, {}, 7);
  const auto s = sample_lgmrf(g, 500, 8);
  const WeightVector w0 = default_initial_point(s.S, 10);
  const SolverOptions opts;

  const auto single = solve_subproblem({s.S, Vector::Constant(w0.size(), 0.1), w0}, opts);
  REQUIRE(single.status == SolveStatus::Converged);
  const auto via_ngl = ngl::ngl(s.S, PenaltySpec::l1(0.1), opts, w0);
  CHECK(via_ngl.status == SolveStatus::Converged);
  CHECK(via_ngl.w_hat.values() == single.w_hat.values());
  CHECK(fit_l1(s.S, 0.1, opts, w0).w_hat.values() == single.w_hat.values());

  const auto mle = solve_subproblem({s.S, Vector::Zero(w0.size()), w0}, opts);
  for (auto pen : {PenaltySpec::mcp(0.0), PenaltySpec::scad(0.0), PenaltySpec::l1(0.0)})
    CHECK(ngl::ngl(s.S, pen, opts, w0).w_hat.values() == mle.w_hat.values());
}

TEST_CASE("initial points") {
  const WeightVector star = default_initial_point(Matrix::Zero(4, 4), 4, InitStrategy::Star);
  CHECK(star.values() == (Vector(6) << 1, 1, 1, 0, 0, 0).finished());
  CHECK(default_initial_point(Matrix::Zero(4, 4), 4).values() == star.values());
  CHECK(default_initial_point(Matrix::Zero(4, 4), 4, InitStrategy::UniformDense).values() ==
        Vector::Ones(6));

  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Index p = 3 + t;
    const Matrix S = random_covariance(p, 2 * p, rng);
    const WeightVector w = default_initial_point(S, p);
    CHECK(is_feasible(w).feasible);
    CHECK(count_edges(w, 0.0) == p - 1);
  }

  // the spanning tree follows the strongest similarities: a path 1-2-3-4
  const auto g = make_ground_truth(WeightVector(4, (Vector(6) << 1, 0, 0, 1, 0, 1).finished()));
  const Matrix S = symmetric_pinv(laplacian(g.w_star).matrix);
  CHECK(default_initial_point(S, 4).values() == g.w_star.values());

  CHECK(parse_init_strategy("uniform") == InitStrategy::UniformDense);
  CHECK_THROWS_AS(parse_init_strategy("random"), ArgumentError);
}

TEST_CASE("large l1 penalties densify the graph") {
  const Index p = 5;
  const auto g = generate_ba_tree(p, {}, 11);
  const auto s = sample_lgmrf(g, 100 * p, 12);
  double s1 = s.S.diagonal().maxCoeff();
  double s2 = s.S.minCoeff();
  const double lambda = (2.0 + 2.0 * std::numbers::sqrt2) * double(p + 1) * (s1 - s2);
  const auto rep = fit_l1(s.S, lambda, tight(), default_initial_point(s.S, p));
  const double bound = 1.0 / ((s1 - double(p + 1) * s2 + lambda) * double(p));
  CHECK(rep.w_hat.values().minCoeff() > bound);

  const auto small = fit_l1(s.S, 0.0, tight(), default_initial_point(s.S, p));
  CHECK(count_edges(small.w_hat, 1e-5) < count_edges(rep.w_hat, 1e-5));
}

TEST_CASE("MCP recovers a BA tree from plenty of samples") {
  int perfect = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto g = generate_ba_tree(20, {}, seed);
    const auto s = sample_lgmrf(g, 2000, seed + 50);
    const auto rep = ngl::ngl(s.S, PenaltySpec::mcp(0.25), {}, default_initial_point(s.S, 20));
    CHECK(rep.status == SolveStatus::Converged);
    perfect += evaluate(rep.w_hat, g.w_star, 1e-5).f_score == 1.0;
  }
  CHECK(perfect >= 2);
}
