#include "helpers.hpp"

using namespace gmfkit;
using namespace gmfkit::test;

namespace {
ExtReal phi1(double x, double v) {
  return eval_gmf(ProblemData::zero(1, 1), RectMatrix::Constant(1, 1, x), sym(1, {v}), {}).value;
}
}  // namespace

TEST_CASE("scalar values") {
  CHECK(phi1(1, 2) == ExtReal::finite(0.25));
  CHECK(phi1(1, 0).is_plus_inf());
  CHECK(phi1(0, 0) == ExtReal::finite(0.0));
  CHECK(phi1(1, -1).is_plus_inf());
  CHECK(phi1(-3, 4) == ExtReal::finite(9.0 / 8.0));
}

TEST_CASE("problem data requires rge B inside rge A") {
  CHECK_THROWS_AS(ProblemData(mat(2, 2, {1, 0, 0, 0}), mat(2, 1, {0, 1})), std::invalid_argument);
  ProblemData pd(mat(2, 2, {1, 0, 0, 0}), mat(2, 1, {3, 0}));
  CHECK(pd.ker_dim() == 1);
  CHECK((pd.A() * pd.Y0() - pd.B()).norm() <= 1e-12);
  CHECK(bordered(pd, SymMatrix::identity(2)).rows() == 4);
}

TEST_CASE("closed form matches the QR oracle on random instances") {
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    const int n = oracle::uniform_int(rng, 1, 5), m = oracle::uniform_int(rng, 1, 4);
    ProblemData pd = oracle::random_problem(rng, n, m, oracle::uniform_int(rng, 1, 3));
    SymMatrix v = oracle::random_interior(rng, pd);
    RectMatrix x = oracle::gaussian(rng, n, m);
    GmfEval e = eval_gmf(pd, x, v, {});
    REQUIRE(e.value.is_finite());
    CHECK(rel_err(e.value.value(), oracle::gmf_value_kkt(pd.A(), pd.B(), x, v.mat())) <= 1e-8);
    REQUIRE(e.witness_y);
    CHECK((pd.A() * *e.witness_y - pd.B()).norm() <= 1e-8 * (1 + pd.B().norm()));
    // the witness attains the sup
    const double at = inner(x, *e.witness_y) - 0.5 * (e.witness_y->transpose() * v.mat() * *e.witness_y).trace();
    CHECK(rel_err(at, e.value.value()) <= 1e-8);
  }
}

TEST_CASE("unconstrained phi is positively homogeneous and jointly convex") {
  Rng rng(22);
  ProblemData pd = ProblemData::zero(3, 2);
  for (int i = 0; i < 50; ++i) {
    RectMatrix x1 = oracle::gaussian(rng, 3, 2), x2 = oracle::gaussian(rng, 3, 2);
    SymMatrix v1 = oracle::random_spd(rng, 3), v2 = oracle::random_spd(rng, 3);
    const double t = oracle::uniform(rng, 0.1, 5.0);
    const double f1 = eval_gmf(pd, x1, v1, {}).value.value();
    CHECK(rel_err(eval_gmf(pd, x1 * t, v1 * t, {}).value.value(), t * f1) <= 1e-10);
    const double f2 = eval_gmf(pd, x2, v2, {}).value.value();
    const double mid = eval_gmf(pd, 0.5 * (x1 + x2), 0.5 * (v1 + v2), {}).value.value();
    CHECK(mid <= 0.5 * (f1 + f2) + 1e-10);
  }
}

TEST_CASE("phi is +inf off K_A and off the range condition") {
  ProblemData pd = ProblemData::zero(2, 1);
  CHECK(eval_gmf(pd, mat(2, 1, {1, 1}), sym(2, {1, 0, 0, -1}), {}).value.is_plus_inf());
  // V singular: X must lie in rge V
  CHECK(eval_gmf(pd, mat(2, 1, {0, 1}), sym(2, {1, 0, 0, 0}), {}).value.is_plus_inf());
  CHECK(eval_gmf(pd, mat(2, 1, {2, 0}), sym(2, {1, 0, 0, 0}), {}).value == ExtReal::finite(2.0));
}

TEST_CASE("singular V: half the trace of X^T V^+ X on rge V") {
  Rng rng(23);
  ProblemData pd = ProblemData::zero(3, 2);
  for (int i = 0; i < 30; ++i) {
    RectMatrix l = oracle::gaussian(rng, 3, 2);
    SymMatrix v(l * l.transpose());
    RectMatrix x = v.mat() * oracle::gaussian(rng, 3, 2);
    ExtReal a = eval_gmf(pd, x, v, {}).value;
    REQUIRE(a.is_finite());
    Eigen::MatrixXd vp = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(v.mat()).pseudoInverse();
    CHECK(rel_err(a.value(), 0.5 * (x.transpose() * vp * x).trace()) <= 1e-7);
  }
}

TEST_CASE("the direct oracle agrees on interior points") {
  Rng rng(26);
  for (int i = 0; i < 30; ++i) {
    ProblemData pd = oracle::random_problem(rng, 4, 2, 2);
    SymMatrix v = oracle::random_interior(rng, pd);
    RectMatrix x = oracle::gaussian(rng, 4, 2);
    CHECK(rel_err(eval_gmf(pd, x, v, {}).value.value(), eval_gmf_oracle(pd, x, v, {}).value.value()) <= 1e-8);
  }
}

TEST_CASE("gradient matches central differences") {
  Rng rng(24);
  for (int i = 0; i < 20; ++i) {
    ProblemData pd = oracle::random_problem(rng, 3, 2, 1);
    SymMatrix v = oracle::random_interior(rng, pd, 0.5);
    RectMatrix x = oracle::gaussian(rng, 3, 2);
    GmfGradient g = grad_gmf(pd, x, v, {});
    RectMatrix fx = oracle::fd_gradient([&](const RectMatrix& z) { return eval_gmf(pd, z, v, {}).value.to_double(); }, x);
    SymMatrix fv = oracle::fd_gradient_sym([&](const SymMatrix& w) { return eval_gmf(pd, x, w, {}).value.to_double(); }, v);
    const double scale = std::max(1.0, g.gx.norm() + g.gv.norm());
    CHECK((g.gx - fx).norm() / scale <= 1e-5);
    CHECK((g.gv.mat() - fv.mat()).norm() / scale <= 1e-5);
  }
}

TEST_CASE("curvature block gives the second directional derivative") {
  Rng rng(25);
  ProblemData pd = ProblemData::zero(2, 2);
  RectMatrix x = oracle::gaussian(rng, 2, 2), dx = oracle::gaussian(rng, 2, 2);
  SymMatrix v = oracle::random_spd(rng, 2), dv = oracle::random_sym(rng, 2);
  GmfCurvature c = eval_gmf_curvature(pd, x, v, {});
  RectMatrix e = dx - dv.mat() * c.y;
  const double want = inner(e, c.q * e);
  const double h = 1e-4;
  auto f = [&](double t) { return eval_gmf(pd, x + t * dx, v + dv * t, {}).value.value(); };
  const double fd = (f(h) - 2 * f(0) + f(-h)) / (h * h);
  CHECK(rel_err(fd, want) <= 1e-4);
}
