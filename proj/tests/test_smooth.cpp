#include <sstream>

#include "helpers.hpp"
#include "gmfkit/smooth.hpp"

using namespace gmfkit;
using namespace gmfkit::test;

namespace {
// prox of lambda |.|_* at T: soft-threshold the singular values
RectMatrix svt(const RectMatrix& t, double lambda) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector s = (svd.singularValues().array() - lambda).max(0.0).matrix();
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

LeastSquares full(const RectMatrix& t) {
  std::vector<std::pair<int, int>> obs;
  std::vector<double> vals;
  for (int j = 0; j < t.cols(); ++j)
    for (int i = 0; i < t.rows(); ++i) {
      obs.push_back({i, j});
      vals.push_back(t(i, j));
    }
  return LeastSquares::mask(static_cast<int>(t.rows()), static_cast<int>(t.cols()), obs,
                            Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
}

SolveTrace run(const LeastSquares& f, double lambda) {
  const int n = f.n, m = f.m;
  return solve_smooth(f, ProblemData::zero(n, m), SymMatrix::identity(n) * (0.5 * lambda * lambda),
                      RectMatrix::Zero(n, m), SymMatrix::identity(n));
}
}  // namespace

TEST_CASE("least squares value and gradient") {
  Rng rng(61);
  LeastSquares f = LeastSquares::mask(2, 2, {{0, 0}, {1, 1}}, (Vector(2) << 1.0, -2.0).finished());
  CHECK(f.value(RectMatrix::Zero(2, 2)) == doctest::Approx(2.5));
  for (int i = 0; i < 5; ++i) {
    RectMatrix x = oracle::gaussian(rng, 2, 2);
    RectMatrix fd = oracle::fd_gradient([&](const RectMatrix& z) { return f.value(z); }, x);
    CHECK((f.gradient(x) - fd).norm() <= 1e-7);
  }
  CHECK(LeastSquares::empty(2, 3).value(oracle::gaussian(rng, 2, 3)) == 0.0);
  LeastSquares bad = f;
  bad.target = Vector::Zero(3);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("scalar problems reduce to soft thresholding") {
  for (double t : {-3.0, -0.4, 0.0, 0.7, 2.5})
    for (double lambda : {0.5, 1.0}) {
      SolveTrace tr = run(full(RectMatrix::Constant(1, 1, t)), lambda);
      CHECK(std::abs(tr.final_x(0, 0) - oracle::soft_threshold(t, lambda)) <= 1e-6);
    }
}

TEST_CASE("fully observed targets reach singular value thresholding") {
  Rng rng(62);
  for (int i = 0; i < 8; ++i) {
    const int n = oracle::uniform_int(rng, 1, 4), m = oracle::uniform_int(rng, 1, 4);
    RectMatrix t = oracle::gaussian(rng, n, m) * 2.0;
    const double lambda = oracle::uniform(rng, 0.3, 1.5);
    SolveTrace tr = run(full(t), lambda);
    CHECK(tr.status == SolveTrace::Status::Converged);
    RectMatrix want = svt(t, lambda);
    CHECK((tr.final_x - want).norm() <= 1e-5 * (1 + want.norm()));
  }
}

TEST_CASE("traces decrease and stay interior") {
  Rng rng(63);
  for (int i = 0; i < 5; ++i) {
    RectMatrix t = oracle::gaussian(rng, 3, 3);
    std::vector<std::pair<int, int>> obs;
    std::vector<double> vals;
    for (int j = 0; j < 3; ++j)
      for (int r = 0; r < 3; ++r)
        if (oracle::uniform(rng, 0, 1) < 0.6) {
          obs.push_back({r, j});
          vals.push_back(t(r, j));
        }
    LeastSquares f = LeastSquares::mask(3, 3, obs, Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
    SolveTrace tr = run(f, 0.7);
    REQUIRE_FALSE(tr.iterates.empty());
    for (std::size_t k = 1; k < tr.iterates.size(); ++k)
      CHECK(tr.iterates[k].objective <= tr.iterates[k - 1].objective + 1e-12 * (1 + std::abs(tr.iterates[k - 1].objective)));
    for (const auto& it : tr.iterates) CHECK(it.min_eig_v > 0.0);
    // the objective matches f + lambda |X|_* at the returned X
    const double want = f.value(tr.final_x) + 0.7 * Eigen::JacobiSVD<Eigen::MatrixXd>(tr.final_x).singularValues().sum();
    ObjectiveCertificate c = objective_certificate(f, SymMatrix::identity(3) * (0.5 * 0.49), tr.final_x, tr.final_v);
    CHECK(rel_err(c.f_value, want) <= 1e-6);
    CHECK(std::abs(c.gap) <= 1e-6 * (1 + std::abs(want)));
  }
}

TEST_CASE("proximal reference agrees with singular value thresholding") {
  Rng rng(64);
  RectMatrix t = oracle::gaussian(rng, 3, 2);
  RectMatrix x = solve_prox_reference(full(t), SymMatrix::identity(3), 0.8, RectMatrix::Zero(3, 2));
  CHECK((x - svt(t, 0.8)).norm() <= 1e-8);
}

TEST_CASE("trace CSV") {
  SolveTrace tr = run(full(RectMatrix::Constant(1, 1, 2.0)), 1.0);
  std::ostringstream os;
  write_trace_csv(tr, os);
  const std::string text = os.str();
  CHECK(text.rfind("iter,F,grad_norm,min_eig_V\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(tr.iterates.size()) + 1);
  CHECK(to_string(SolveTrace::Status::Converged) == "Converged");
}
