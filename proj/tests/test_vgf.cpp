#include <limits>

#include "helpers.hpp"
#include "gmfkit/vgf.hpp"

using namespace gmfkit;
using namespace gmfkit::test;

namespace {
Vector svals(const RectMatrix& y) { return Eigen::JacobiSVD<Eigen::MatrixXd>(y).singularValues(); }
}  // namespace

TEST_CASE("closed forms for PSD-family sets") {
  Rng rng(51);
  for (int i = 0; i < 20; ++i) {
    const int n = oracle::uniform_int(rng, 1, 4), m = oracle::uniform_int(rng, 1, 3);
    RectMatrix y = oracle::gaussian(rng, n, m);
    Vector s = svals(y);
    CHECK(rel_err(vgf_eval(VgfInstance(set::TraceBall{1.5}, n, m), y).value(), 0.75 * s(0) * s(0)) <= 1e-9);
    CHECK(rel_err(vgf_eval(VgfInstance(set::SpectralBox{0.0, 2.0}, n, m), y).value(), y.squaredNorm()) <= 1e-9);
    // negative lower bounds are cut off by the PSD cone
    CHECK(rel_err(vgf_eval(VgfInstance(set::SpectralBox{-3.0, 2.0}, n, m), y).value(), y.squaredNorm()) <= 1e-9);
    const int k = oracle::uniform_int(rng, 1, n);
    const double fan = 0.5 * s.head(std::min<int>(k, s.size())).squaredNorm();
    CHECK(rel_err(vgf_eval(VgfInstance(set::Fantope{k}, n, m), y).value(), fan) <= 1e-9);
  }
}

TEST_CASE("VGFs are homogeneous of degree two and convex") {
  Rng rng(52);
  const std::vector<ConvexSetSpec> sets = {set::TraceBall{1.0}, set::Fantope{2}, set::SpectralBox{-1.0, 0.5},
                                           set::Hull{{oracle::random_sym(rng, 3), oracle::random_spd(rng, 3)}}};
  for (const auto& s : sets) {
    VgfInstance inst(s, 3, 2);
    for (int i = 0; i < 20; ++i) {
      RectMatrix a = oracle::gaussian(rng, 3, 2), b = oracle::gaussian(rng, 3, 2);
      const double t = oracle::uniform(rng, 0.1, 3.0);
      const double fa = vgf_eval(inst, a).value(), fb = vgf_eval(inst, b).value();
      CHECK(rel_err(vgf_eval(inst, t * a).value(), t * t * fa) <= 1e-9);
      CHECK(vgf_eval(inst, 0.5 * (a + b)).value() <= 0.5 * (fa + fb) + 1e-9);
      CHECK(fa >= -1e-12);
    }
  }
}

TEST_CASE("rays: bounded only through the PSD cone") {
  RectMatrix y = mat(2, 1, {1, 1});
  VgfInstance psd_ray(set::Ray{SymMatrix::identity(2)}, 2, 1);
  CHECK_FALSE(vgf_bounded(psd_ray));
  CHECK(vgf_eval(psd_ray, y).is_plus_inf());
  CHECK(vgf_eval(psd_ray, RectMatrix::Zero(2, 1)) == ExtReal::finite(0.0));
  VgfInstance indefinite(set::Ray{sym(2, {1, 0, 0, -1})}, 2, 1);
  CHECK(vgf_bounded(indefinite));
  CHECK(vgf_eval(indefinite, y) == ExtReal::finite(0.0));
  CHECK(vgf_conj(indefinite, y).value.is_plus_inf());
}

TEST_CASE("an empty PSD part is rejected") {
  CHECK_THROWS_AS(VgfInstance(set::SpectralBox{-2.0, -1.0}, 2, 1), std::invalid_argument);
}

TEST_CASE("subgradients satisfy Fenchel-Young and the subgradient inequality") {
  Rng rng(53);
  const std::vector<ConvexSetSpec> sets = {set::TraceBall{1.0}, set::Fantope{1},
                                           set::ShiftedPSDCap{oracle::random_spd(rng, 3)}};
  for (const auto& s : sets) {
    VgfInstance inst(s, 3, 2);
    for (int i = 0; i < 5; ++i) {
      RectMatrix y = oracle::gaussian(rng, 3, 2);
      VgfSubgradient g = vgf_subdiff(inst, y);
      const double fy = vgf_eval(inst, y).value();
      CHECK(std::abs(g.fenchel_residual) <= 1e-6 * (1 + fy));
      for (int k = 0; k < 5; ++k) {
        RectMatrix z = oracle::gaussian(rng, 3, 2);
        CHECK(vgf_eval(inst, z).value() >= fy + inner(g.subgradient, z - y) - 1e-8);
      }
    }
  }
  CHECK_THROWS_AS(vgf_subdiff(VgfInstance(set::Ray{SymMatrix::identity(2)}, 2, 1), mat(2, 1, {1, 0})),
                  std::invalid_argument);
}

TEST_CASE("the conjugate of the trace-ball VGF is half the squared nuclear norm") {
  Rng rng(54);
  VgfInstance inst(set::TraceBall{1.0}, 2, 2);
  for (int i = 0; i < 10; ++i) {
    RectMatrix x = oracle::gaussian(rng, 2, 2);
    const double nuc = svals(x).sum();
    CHECK(rel_err(vgf_conj(inst, x).value.value(), 0.5 * nuc * nuc) <= 1e-6);
  }
}

TEST_CASE("squared-gauge representation") {
  Rng rng(55);
  for (int i = 0; i < 10; ++i) {
    RectMatrix y = oracle::gaussian(rng, 3, 2);
    GaugeDecomp d = vgf_gauge_decomp(VgfInstance(set::TraceBall{2.0}, 3, 2), y);
    CHECK(d.consistent);
    CHECK(rel_err(d.sigma_f.value(), std::sqrt(2.0) * svals(y)(0)) <= 1e-10);
  }
  CHECK_THROWS_AS(vgf_gauge_decomp(VgfInstance(set::SpectralBox{0.5, 1.0}, 2, 1), mat(2, 1, {1, 0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(vgf_gauge_decomp(VgfInstance(set::Hull{{SymMatrix::zero(2), SymMatrix::identity(2)}}, 2, 1),
                                   mat(2, 1, {1, 0})),
                  UndecidedError);
}

TEST_CASE("Ky Fan norms") {
  RectMatrix d = mat(3, 2, {3, 0, 0, 4, 0, 0});
  CHECK(kyfan_norm({1.0, 2}, d) == doctest::Approx(7.0));
  CHECK(kyfan_norm({1.0, 1}, d) == doctest::Approx(4.0));
  CHECK(kyfan_norm({2.0, 2}, d) == doctest::Approx(5.0));
  CHECK(kyfan_norm({std::numeric_limits<double>::infinity(), 2}, d) == doctest::Approx(4.0));
  CHECK(kyfan_norm({3.0, 2}, d) == doctest::Approx(std::cbrt(91.0)));
  CHECK_THROWS_AS(kyfan_norm({1.0, 3}, d), std::invalid_argument);
  CHECK_THROWS_AS(kyfan_norm({1.0, 0}, d), std::invalid_argument);
  CHECK_THROWS_AS(kyfan_norm({0.5, 1}, d), std::invalid_argument);
}

TEST_CASE("Ky Fan (2, k) squared over two is the Fantope VGF") {
  Rng rng(56);
  for (int i = 0; i < 20; ++i) {
    const int n = oracle::uniform_int(rng, 1, 5), m = oracle::uniform_int(rng, 1, 5);
    RectMatrix x = oracle::gaussian(rng, n, m);
    for (int k = 1; k <= std::min(n, m); ++k) {
      CHECK(kyfan_vgf_identity({2.0, k}, x));
      CHECK(rel_err(kyfan_norm({2.0, k}, x), oracle::kyfan_eig(x, 2.0, k)) <= 1e-7);
    }
  }
  CHECK_THROWS_AS(kyfan_vgf_identity({1.0, 1}, RectMatrix::Identity(2, 2)), std::invalid_argument);
}
