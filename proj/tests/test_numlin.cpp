#include "helpers.hpp"

using namespace gmfkit;
using namespace gmfkit::test;

TEST_CASE("symmetric matrix keeps the symmetric part") {
  SymMatrix s(mat(2, 2, {1, 4, 2, 3}));
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 3.0);
  CHECK(SymMatrix::asymmetry(mat(2, 2, {1, 4, 2, 3})) > 0.0);
  CHECK(SymMatrix::asymmetry(s.mat()) == 0.0);
  CHECK(SymMatrix::identity(3).trace() == 3.0);
}

TEST_CASE("tolerances reject values outside (0, 1e-2]") {
  Tolerances t;
  CHECK_NOTHROW(t.validate());
  for (double bad : {0.0, -1e-9, 0.5, std::nan("")}) {
    Tolerances u;
    u.psd_abs = bad;
    CHECK_THROWS_AS(u.validate(), std::invalid_argument);
  }
  t.conj_rel = 1e-2;
  CHECK_NOTHROW(t.validate());
}

TEST_CASE("pseudoinverse satisfies the Penrose equations on rank-deficient input") {
  Rng rng(11);
  Tolerances tol;
  for (int i = 0; i < 30; ++i) {
    const int r = oracle::uniform_int(rng, 1, 3);
    RectMatrix m = oracle::gaussian(rng, 5, r) * oracle::gaussian(rng, r, 4);
    RectMatrix p = pinv(m, tol);
    CHECK((m * p * m - m).norm() <= 1e-9 * (1 + m.norm()));
    CHECK((p * m * p - p).norm() <= 1e-9 * (1 + p.norm()));
    CHECK(((m * p).transpose() - m * p).norm() <= 1e-9);
    CHECK(((p * m).transpose() - p * m).norm() <= 1e-9);
    CHECK(rank(m, tol) == r);
  }
}

TEST_CASE("kernel basis, projector and range test agree") {
  Rng rng(12);
  Tolerances tol;
  for (int i = 0; i < 30; ++i) {
    const int n = oracle::uniform_int(rng, 2, 6), r = oracle::uniform_int(rng, 1, n - 1);
    RectMatrix a = oracle::gaussian(rng, r + 1, r) * oracle::gaussian(rng, r, n);
    RectMatrix nb = ker_basis(a, tol);
    REQUIRE(nb.cols() == n - r);
    CHECK((a * nb).norm() <= 1e-9 * (1 + a.norm()));
    CHECK((nb.transpose() * nb - Eigen::MatrixXd::Identity(n - r, n - r)).norm() <= 1e-10);
    SymMatrix p = ker_projector(a, tol);
    CHECK((p.mat() - nb * nb.transpose()).norm() <= 1e-9);
    CHECK((p.mat() * p.mat() - p.mat()).norm() <= 1e-9);

    CHECK(range_contains(a, a * oracle::gaussian(rng, n, 2), tol));
    // a column of the left null space is outside rge a
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU);
    CHECK_FALSE(range_contains(a, svd.matrixU().col(r), tol));
  }
}

TEST_CASE("ker_basis of zero and full-rank matrices") {
  Tolerances tol;
  CHECK(ker_basis(RectMatrix::Zero(1, 3), tol).cols() == 3);
  CHECK(ker_basis(RectMatrix::Identity(3, 3), tol).cols() == 0);
}

TEST_CASE("eigendecomposition is descending and reconstructs") {
  Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    SymMatrix s = oracle::random_sym(rng, 4);
    SymEig e = sym_eig(s);
    for (int k = 0; k + 1 < 4; ++k) CHECK(e.values(k) >= e.values(k + 1));
    CHECK((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - s.mat()).norm() <= 1e-10);
    CHECK(max_eig(s) == doctest::Approx(e.values(0)));
    CHECK(min_eig(s) == doctest::Approx(e.values(3)));
  }
}

TEST_CASE("singular values match the X^T X eigenvalue oracle") {
  Rng rng(14);
  for (int i = 0; i < 20; ++i) {
    RectMatrix x = oracle::gaussian(rng, oracle::uniform_int(rng, 1, 5), oracle::uniform_int(rng, 1, 5));
    Vector a = sv(x), b = oracle::singular_values_eig(x);
    REQUIRE(a.size() == b.size());
    CHECK((a - b).norm() <= 1e-7 * (1 + a.norm()));
  }
}

TEST_CASE("psd square root squares to the PSD part") {
  Rng rng(15);
  for (int i = 0; i < 20; ++i) {
    SymMatrix s = oracle::random_sym(rng, 4);
    SymEig e = sym_eig(s);
    Eigen::MatrixXd plus = e.vectors * e.values.cwiseMax(0.0).asDiagonal() * e.vectors.transpose();
    SymMatrix r = psd_sqrt(s);
    CHECK((r.mat() * r.mat() - plus).norm() <= 1e-9 * (1 + plus.norm()));
    CHECK(min_eig(r) >= -1e-12);
  }
}

TEST_CASE("gram and inner products") {
  RectMatrix y = mat(2, 1, {1, 2});
  CHECK(gram(y).mat() == mat(2, 2, {1, 2, 2, 4}));
  CHECK(inner(y, y) == 5.0);
  CHECK(inner(SymMatrix::identity(2), gram(y)) == 5.0);
}

TEST_CASE("sign canonicalization makes the first nonzero entry positive") {
  Eigen::MatrixXd v = mat(3, 2, {0, 1, -2, 0, 1, -1});
  canonicalize_signs(v);
  CHECK(v(1, 0) == 2.0);
  CHECK(v(0, 1) == 1.0);
}

TEST_CASE("svec basis spans S^n with one coordinate per upper-triangle entry") {
  for (int n = 1; n <= 4; ++n) {
    REQUIRE(svec_dim(n) == n * (n + 1) / 2);
    Eigen::MatrixXd stack(n * n, svec_dim(n));
    for (int k = 0; k < svec_dim(n); ++k) {
      SymMatrix b = svec_basis(n, k);
      CHECK(SymMatrix::asymmetry(b.mat()) == 0.0);
      stack.col(k) = Eigen::Map<const Vector>(b.mat().data(), n * n);
    }
    CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(stack).rank() == svec_dim(n));
  }
}
