#include <algorithm>

#include "helpers.hpp"

using namespace gmfkit;
using namespace gmfkit::test;

namespace {
// eigenvalues, descending, from Eigen's solver directly
Vector eigs(const SymMatrix& g) {
  Vector e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g.mat()).eigenvalues();
  return e.reverse();
}
}  // namespace

TEST_CASE("support functions against eigenvalue formulas") {
  Rng rng(31);
  for (int i = 0; i < 40; ++i) {
    const int n = oracle::uniform_int(rng, 1, 4);
    SymMatrix g = oracle::random_sym(rng, n);
    Vector e = eigs(g);
    const double lo = oracle::uniform(rng, -1, 1), hi = lo + oracle::uniform(rng, 0, 2);
    double box = 0;
    for (int k = 0; k < n; ++k) box += std::max(lo * e(k), hi * e(k));
    CHECK(rel_err(support(set::SpectralBox{lo, hi}, g).value.value(), box) <= 1e-10);

    CHECK(rel_err(support(set::TraceBall{2.0}, g).value.value(), 2.0 * std::max(e(0), 0.0)) <= 1e-10);

    const int k = oracle::uniform_int(rng, 1, n);
    double fan = 0;
    for (int j = 0; j < k; ++j) fan += std::max(e(j), 0.0);
    CHECK(rel_err(support(set::Fantope{k}, g).value.value(), fan) <= 1e-10);

    SymMatrix u = oracle::random_sym(rng, n);
    CHECK(rel_err(support(set::Singleton{u}, g).value.value(), inner(u, g)) <= 1e-12);

    SymMatrix w = oracle::random_sym(rng, n);
    CHECK(rel_err(support(set::Hull{{u, w}}, g).value.value(), std::max(inner(u, g), inner(w, g))) <= 1e-12);

    SupportEval ray = support(set::Ray{u}, g);
    if (inner(u, g) > 0) CHECK(ray.value.is_plus_inf());
    else CHECK(ray.value == ExtReal::finite(0.0));
  }
}

TEST_CASE("support witnesses are members attaining the value") {
  Rng rng(32);
  const std::vector<ConvexSetSpec> sets = {set::SpectralBox{-0.5, 1.0}, set::TraceBall{1.5}, set::Fantope{2},
                                           set::ShiftedPSDCap{oracle::random_spd(rng, 3)}};
  for (const auto& s : sets)
    for (int i = 0; i < 10; ++i) {
      SymMatrix g = oracle::random_sym(rng, 3);
      SupportEval e = support(s, g);
      REQUIRE(e.witness);
      CHECK(member(s, *e.witness, {}));
      CHECK(rel_err(inner(*e.witness, g), e.value.value()) <= 1e-9);
    }
}

TEST_CASE("support dominates <V, G> over sampled members") {
  Rng rng(33);
  SymMatrix cap = oracle::random_spd(rng, 3);
  for (int i = 0; i < 50; ++i) {
    SymMatrix g = oracle::random_sym(rng, 3);
    // random member of {0 <= V <= cap}: cap^(1/2) W cap^(1/2) with 0 <= W <= I
    SymEig e = sym_eig(oracle::random_sym(rng, 3));
    Vector d(3);
    for (int k = 0; k < 3; ++k) d(k) = oracle::uniform(rng, 0, 1);
    Eigen::MatrixXd w = e.vectors * d.asDiagonal() * e.vectors.transpose();
    SymMatrix r = psd_sqrt(cap);
    SymMatrix v(r.mat() * w * r.mat());
    CHECK(member(set::ShiftedPSDCap{cap}, v, {}));
    CHECK(inner(v, g) <= support(set::ShiftedPSDCap{cap}, g).value.value() + 1e-10);
  }
}

TEST_CASE("membership") {
  CHECK(member(set::TraceBall{1.0}, sym(2, {0.5, 0, 0, 0.5}), {}));
  CHECK_FALSE(member(set::TraceBall{1.0}, sym(2, {0.7, 0, 0, 0.5}), {}));
  CHECK_FALSE(member(set::TraceBall{1.0}, sym(2, {0.5, 0, 0, -0.1}), {}));
  CHECK(member(set::Fantope{1}, sym(2, {0.5, 0, 0, 0.5}), {}));
  CHECK_FALSE(member(set::Fantope{1}, sym(2, {1.5, 0, 0, 0}), {}));
  CHECK(member(set::Ray{sym(2, {1, 0, 0, -1})}, sym(2, {3, 0, 0, -3}), {}));
  CHECK_FALSE(member(set::Ray{sym(2, {1, 0, 0, -1})}, sym(2, {-3, 0, 0, 3}), {}));
  CHECK(member(set::Hull{{SymMatrix::zero(2), SymMatrix::identity(2)}}, sym(2, {0.3, 0, 0, 0.3}), {}));
  CHECK_FALSE(member(set::Hull{{SymMatrix::zero(2), SymMatrix::identity(2)}}, sym(2, {0.3, 0, 0, 0.4}), {}));
}

TEST_CASE("gauge of the trace ball on PSD input is trace over radius") {
  Rng rng(34);
  for (int i = 0; i < 10; ++i) {
    SymMatrix g = oracle::random_spd(rng, 3);
    CHECK(rel_err(gauge(set::TraceBall{2.0}, g).value(), g.trace() / 2.0) <= 1e-9);
  }
  CHECK(gauge(set::TraceBall{2.0}, sym(2, {1, 0, 0, -1})).is_plus_inf());
}

TEST_CASE("boundedness, zero membership, PSD families") {
  CHECK(is_bounded(set::TraceBall{1.0}));
  CHECK_FALSE(is_bounded(set::Ray{SymMatrix::identity(2)}));
  CHECK(contains_zero(set::Fantope{1}, 2));
  CHECK_FALSE(contains_zero(set::SpectralBox{0.5, 1.0}, 2));
  CHECK(contains_zero(set::Ray{sym(2, {1, 0, 0, -1})}, 2));
  CHECK(is_psd_family(set::TraceBall{1.0}));
  CHECK_FALSE(is_psd_family(set::SpectralBox{-1.0, 1.0}));
}

TEST_CASE("invariants are enforced") {
  CHECK_THROWS_AS(validate_set(set::SpectralBox{1.0, 0.0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(validate_set(set::Fantope{3}, 2), std::invalid_argument);
  CHECK_THROWS_AS(validate_set(set::TraceBall{-1.0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(validate_set(set::Singleton{SymMatrix::identity(3)}, 2), std::invalid_argument);
  CHECK_THROWS_AS(validate_set(set::Hull{}, 2), std::invalid_argument);
  CHECK_NOTHROW(validate_set(set::Fantope{2}, 2));
}

TEST_CASE("h and its conjugate satisfy Fenchel-Young") {
  Rng rng(35);
  for (int i = 0; i < 200; ++i) {
    const int n = oracle::uniform_int(rng, 1, 3);
    HSpec h = oracle::random_h(rng, n);
    SymMatrix v = oracle::random_sym(rng, n), w = oracle::random_sym(rng, n);
    ExtReal hv = h_eval(h, v, {}), hw = h_conj(h, w, {});
    if (hv.is_finite() && hw.is_finite()) CHECK(hv.value() + hw.value() >= inner(v, w) - 1e-8);
  }
}

TEST_CASE("linear h: value and conjugate") {
  SymMatrix u = sym(2, {1, 0.5, 0.5, 2});
  CHECK(h_eval(hfun::Linear{u}, SymMatrix::identity(2), {}) == ExtReal::finite(3.0));
  CHECK(h_conj(hfun::Linear{u}, u, {}) == ExtReal::finite(0.0));
  CHECK(h_conj(hfun::Linear{u}, SymMatrix::identity(2), {}).is_plus_inf());
}

TEST_CASE("indicator of S has conjugate the support of S") {
  Rng rng(36);
  const ConvexSetSpec s = set::Fantope{1};
  for (int i = 0; i < 10; ++i) {
    SymMatrix w = oracle::random_sym(rng, 3);
    CHECK(rel_err(h_conj(hfun::Indicator{s}, w, {}).value(), support(s, w).value.value()) <= 1e-10);
  }
  CHECK(h_eval(hfun::Indicator{s}, SymMatrix::zero(3), {}) == ExtReal::finite(0.0));
  CHECK(h_eval(hfun::Indicator{s}, SymMatrix::identity(3), {}).is_plus_inf());
}

TEST_CASE("the PSD cone is compatible with the trace ball under the PSD order") {
  Rng rng(37);
  CompatibilityResult r = cone_compatible(set::TraceBall{1.0}, RectMatrix::Identity(3, 3), 50, rng);
  CHECK(r.compatible);
  CHECK(r.pairs_checked > 0);
}

TEST_CASE("polar-sum identity for the trace ball plus the NSD cone") {
  Rng rng(38);
  std::vector<SymMatrix> g;
  for (int i = 0; i < 20; ++i) g.push_back(oracle::random_sym(rng, 2));
  PolarCheckResult r = polar_support_identity_check(set::TraceBall{1.0}, cone::Nsd{}, g, rng);
  CHECK(r.consistent);
  CHECK(r.samples > 0);
}
