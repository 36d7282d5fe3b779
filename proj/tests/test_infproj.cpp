#include "helpers.hpp"
#include "gmfkit/infproj.hpp"

using namespace gmfkit;
using namespace gmfkit::test;

namespace {
double nuclear(const RectMatrix& x) { return Eigen::JacobiSVD<Eigen::MatrixXd>(x).singularValues().sum(); }

InfProjProblem half_identity(int n, int m) {
  return InfProjProblem(ProblemData::zero(n, m), hfun::Linear{SymMatrix::identity(n) * 0.5});
}
}  // namespace

TEST_CASE("linear h = <I/2, V> gives the nuclear norm") {
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const int n = oracle::uniform_int(rng, 1, 4), m = oracle::uniform_int(rng, 1, 4);
    RectMatrix x = oracle::gaussian(rng, n, m);
    InfProjEval e = eval_p(half_identity(n, m), x);
    REQUIRE(e.value.is_finite());
    CHECK(rel_err(e.value.value(), nuclear(x)) <= 1e-6);
    REQUIRE(e.argmin_v);
    CHECK(rel_err(psi(half_identity(n, m), x, *e.argmin_v).value(), e.value.value()) <= 1e-6);
  }
}

TEST_CASE("h(v) = -v makes p identically -inf with a certified ray") {
  InfProjProblem prob(ProblemData::zero(1, 1), hfun::Linear{sym(1, {-1.0})});
  for (double xv : {-1.0, 0.0, 2.0}) {
    RectMatrix x = RectMatrix::Constant(1, 1, xv);
    InfProjEval e = eval_p(prob, x);
    CHECK(e.value.is_minus_inf());
    REQUIRE(e.unbounded_certificate);
    REQUIRE(e.unbounded_origin);
    CHECK(certify_unbounded_ray(prob, x, *e.unbounded_origin, *e.unbounded_certificate));
  }
  CQReport rep = cq_report(prob);
  CHECK(rep.bpcq == Decision::Fails);
}

TEST_CASE("domain of p through a hull with a non-PSD vertex") {
  InfProjProblem prob(ProblemData(mat(2, 2, {1, 1, 1, 1}), mat(2, 1, {1, 1})),
                      hfun::Indicator{set::Hull{{SymMatrix::zero(2), sym(2, {2, 1, 1, 0})}}});
  CHECK(dom_p_member(prob, mat(2, 1, {0.5, 0})));
  CHECK(dom_p_member(prob, mat(2, 1, {2.5, 2})));
  CHECK_FALSE(dom_p_member(prob, mat(2, 1, {1.5, 0})));
  CHECK_FALSE(dom_p_member(prob, mat(2, 1, {-0.5, 0})));
  DomainCheck dc = dom_p_check(prob, mat(2, 1, {0.5, 0}));
  REQUIRE(dc.certificate);
  CHECK(member(set::Hull{{SymMatrix::zero(2), sym(2, {2, 1, 1, 0})}}, *dc.certificate, {}));
}

TEST_CASE("CCQ fails while the primal CQs hold") {
  InfProjProblem prob(ProblemData(mat(2, 2, {1, 0, 0, 0}), mat(2, 1, {1, 0})),
                      hfun::Indicator{set::Hull{{SymMatrix::zero(2), sym(2, {1, 0, 0, 0})}}});
  CQReport rep = cq_report(prob);
  CHECK(rep.ccq == Decision::Fails);
  CHECK(rep.pcq == Decision::Holds);
  CHECK(rep.spcq == Decision::Holds);
  CHECK(rep.bpcq == Decision::Holds);
  CHECK(dom_p_member(prob, mat(2, 1, {-2.5, 0})));
  CHECK_FALSE(dom_p_member(prob, mat(2, 1, {0, 1})));
}

TEST_CASE("a ray whose only PSD point is zero gives +inf off the origin") {
  InfProjProblem prob(ProblemData::zero(2, 1), hfun::Indicator{set::Ray{sym(2, {1, 0, 0, -1})}});
  CHECK(eval_p(prob, mat(2, 1, {1, 0})).value.is_plus_inf());
  CHECK(eval_p(prob, mat(2, 1, {0, 0})).value == ExtReal::finite(0.0));
}

TEST_CASE("conjugate of the nuclear norm is the spectral-ball indicator") {
  Rng rng(42);
  InfProjProblem prob = half_identity(3, 2);
  for (int i = 0; i < 10; ++i) {
    RectMatrix y = oracle::gaussian(rng, 3, 2);
    const double s = Eigen::JacobiSVD<Eigen::MatrixXd>(y).singularValues()(0);
    CHECK(eval_p_conj(prob, y * (0.9 / s)).value == ExtReal::finite(0.0));
    CHECK(eval_p_conj(prob, y * (1.1 / s)).value.is_plus_inf());
  }
}

TEST_CASE("zero duality gap and subgradient certificates for linear h") {
  Rng rng(43);
  for (int i = 0; i < 15; ++i) {
    const int n = oracle::uniform_int(rng, 1, 4), m = oracle::uniform_int(rng, 1, 3);
    SymMatrix l = oracle::random_spd(rng, n);
    InfProjProblem prob(ProblemData::zero(n, m), hfun::Linear{SymMatrix(0.5 * l.mat() * l.mat())});
    RectMatrix x = oracle::gaussian(rng, n, m);
    const double p = eval_p(prob, x).value.value();
    CHECK(rel_err(p, nuclear(l.mat() * x)) <= 1e-6);
    CHECK(rel_err(dual_value(prob, x).value(), p) <= 1e-6);
    SubdiffWitness w = subdiff_p_witness(prob, x);
    CHECK(std::abs(w.fenchel_residual) <= 1e-6 * (1 + std::abs(p)));
    // subgradient inequality p(z) >= p(x) + <Y, z - x> at random z
    for (int k = 0; k < 5; ++k) {
      RectMatrix z = oracle::gaussian(rng, n, m);
      CHECK(eval_p(prob, z).value.value() >= p + inner(w.y, z - x) - 1e-6 * (1 + std::abs(p)));
    }
  }
}

TEST_CASE("CQ reports respect the implication chain") {
  Rng rng(44);
  auto holds = [](Decision d) { return d == Decision::Holds; };
  auto fails = [](Decision d) { return d == Decision::Fails; };
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    const int n = oracle::uniform_int(rng, 1, 3), m = oracle::uniform_int(rng, 1, 2);
    ProblemData pd = oracle::random_problem(rng, n, m, oracle::uniform_int(rng, 1, 2));
    CQReport r = cq_report(InfProjProblem(pd, oracle::random_h(rng, n)));
    CHECK_FALSE((holds(r.bpcq) && fails(r.spcq)));
    CHECK_FALSE((holds(r.spcq) && fails(r.pcq)));
    CHECK_FALSE((holds(r.sccq) && fails(r.ccq)));
    if (holds(r.ccq) && r.certificate) CHECK(in_int_KA(pd, *r.certificate, {}));
    ++checked;
  }
  CHECK(checked == 150);
}

TEST_CASE("trace-ball indicator gives |X|_*^2 / (2r), convex along segments") {
  Rng rng(45);
  for (int i = 0; i < 20; ++i) {
    const int n = 2, m = 2;
    const double r = oracle::uniform(rng, 0.5, 2.0);
    InfProjProblem prob(ProblemData::zero(n, m), hfun::Indicator{set::TraceBall{r}});
    RectMatrix a = oracle::gaussian(rng, n, m), b = oracle::gaussian(rng, n, m);
    const double fa = eval_p(prob, a).value.value(), fb = eval_p(prob, b).value.value();
    CHECK(rel_err(fa, nuclear(a) * nuclear(a) / (2 * r)) <= 1e-6);
    const double fm = eval_p(prob, 0.5 * (a + b)).value.value();
    CHECK(fm <= 0.5 * (fa + fb) + 1e-6 * (1 + fa + fb));
  }
}

TEST_CASE("wrong shapes are rejected") {
  CHECK_THROWS_AS(eval_p(half_identity(2, 2), RectMatrix::Zero(3, 2)), std::invalid_argument);
  CHECK_THROWS_AS(InfProjProblem(ProblemData::zero(2, 1), hfun::Linear{SymMatrix::identity(3)}),
                  std::invalid_argument);
}
