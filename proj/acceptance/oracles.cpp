#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace gmfkit::oracle {

RectMatrix gaussian(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  RectMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = nd(rng);
  return m;
}

SymMatrix random_sym(Rng& rng, int n) { return SymMatrix(gaussian(rng, n, n)); }

SymMatrix random_spd(Rng& rng, int n, double lo, double hi) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(rng, n, n));
  Eigen::MatrixXd q = qr.householderQ();
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = uniform(rng, lo, hi);
  return SymMatrix(q * d.asDiagonal() * q.transpose());
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

ProblemData random_problem(Rng& rng, int n, int m, int l, const Tolerances& tol) {
  RectMatrix a = gaussian(rng, l, n);
  if (l > 1 && uniform(rng, 0, 1) < 0.3) a.row(l - 1) = a.row(0) * 0.5;  // rank deficient
  RectMatrix b = a * gaussian(rng, n, m);
  return ProblemData(a, b, tol);
}

SymMatrix random_interior(Rng& rng, const ProblemData& pd, double margin) {
  SymMatrix v = random_sym(rng, pd.n());
  if (pd.ker_dim() == 0) return v;
  // raise the spectrum on ker A only, using the kernel basis independently of P
  const RectMatrix& nb = pd.N();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(nb.transpose() * v.mat() * nb);
  double lo = es.eigenvalues().minCoeff();
  double shift = std::max(0.0, margin - lo) + uniform(rng, 0.0, 1.0);
  return SymMatrix(v.mat() + shift * nb * nb.transpose());
}

double gmf_value_kkt(const RectMatrix& a, const RectMatrix& b, const RectMatrix& x, const Eigen::MatrixXd& v) {
  const int n = static_cast<int>(a.cols());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
  qr.setThreshold(1e-10);
  const int r = static_cast<int>(qr.rank());
  Eigen::MatrixXd q = qr.householderQ();
  // A Y = B  <=>  Y = Q1 R1^{-T} (P^T B)_top with Q1 spanning rge A^T, plus anything in ker A = span Q2
  Eigen::MatrixXd pb = qr.colsPermutation().transpose() * b;
  Eigen::MatrixXd r1 = qr.matrixR().topLeftCorner(r, r).template triangularView<Eigen::Upper>();
  Eigen::MatrixXd c = r1.transpose().triangularView<Eigen::Lower>().solve(pb.topRows(r));
  Eigen::MatrixXd y0 = q.leftCols(r) * c;
  Eigen::MatrixXd nb = q.rightCols(n - r);
  Eigen::MatrixXd y = y0;
  if (n - r > 0) {
    Eigen::MatrixXd h = nb.transpose() * v * nb;
    Eigen::MatrixXd z = h.ldlt().solve(nb.transpose() * (x - v * y0));
    y += nb * z;
  }
  return (x.cwiseProduct(y)).sum() - 0.5 * (y.transpose() * v * y).trace();
}

Vector singular_values_eig(const RectMatrix& x) {
  Eigen::MatrixXd g = x.rows() >= x.cols() ? Eigen::MatrixXd(x.transpose() * x) : Eigen::MatrixXd(x * x.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  Vector ev = es.eigenvalues().reverse();
  return ev.cwiseMax(0.0).cwiseSqrt();
}

double nuclear_norm_eig(const RectMatrix& x) { return singular_values_eig(x).sum(); }

GridConj grid_conjugate(const std::function<double(const RectMatrix&)>& f, const RectMatrix& y, double radius,
                        int points, int zooms, double shrink, std::optional<std::uint64_t> rotate_seed) {
  const int r = static_cast<int>(y.rows()), c = static_cast<int>(y.cols());
  const int d = r * c;
  RectMatrix center = RectMatrix::Zero(r, c);
  double half = radius;
  GridConj best;
  best.value = -std::numeric_limits<double>::infinity();
  best.argmax = center;
  Rng rot_rng(rotate_seed.value_or(0));
  for (int level = 0; level <= zooms; ++level) {
    const double h = 2.0 * half / (points - 1);
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);
    if (rotate_seed && level > 0) q = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian(rot_rng, d, d)).householderQ();
    std::vector<int> idx(d, 0);
    Vector off(d);
    while (true) {
      for (int k = 0; k < d; ++k) off(k) = -half + h * idx[k];
      Vector step = q * off;
      RectMatrix x(r, c);
      for (int k = 0; k < d; ++k) x(k % r, k / r) = center(k % r, k / r) + step(k);
      double fx = f(x);
      if (std::isfinite(fx)) {
        double val = inner(x, y) - fx;
        if (val > best.value) {
          best.value = val;
          best.argmax = x;
        }
      }
      int k = 0;
      while (k < d && ++idx[k] == points) idx[k++] = 0;
      if (k == d) break;
    }
    center = best.argmax;
    half = std::max(shrink * half, h);
  }
  return best;
}

RectMatrix fd_gradient(const std::function<double(const RectMatrix&)>& f, const RectMatrix& x) {
  RectMatrix g(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int k = 0; k < x.cols(); ++k) {
      double h = 1e-5 * (1.0 + std::abs(x(i, k)));
      RectMatrix xp = x, xm = x;
      xp(i, k) += h;
      xm(i, k) -= h;
      g(i, k) = (f(xp) - f(xm)) / (2.0 * h);
    }
  return g;
}

SymMatrix fd_gradient_sym(const std::function<double(const SymMatrix&)>& f, const SymMatrix& v) {
  const int n = v.dim();
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      double h = 1e-5 * (1.0 + std::abs(v(i, k)));
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
      e(i, k) += 1.0;
      e(k, i) += 1.0;
      double dd = (f(SymMatrix(v.mat() + h * e)) - f(SymMatrix(v.mat() - h * e))) / (2.0 * h);
      // d/dh f(V + h E) = <G, E> = 2 G_ik off the diagonal, 2 G_ii on it
      g(i, k) = g(k, i) = 0.5 * dd;
    }
  return SymMatrix(g);
}

double soft_threshold(double t, double lambda) {
  if (t > lambda) return t - lambda;
  if (t < -lambda) return t + lambda;
  return 0.0;
}

double power_max_eig(const SymMatrix& s, int iters) {
  const int n = s.dim();
  Vector x = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) x(i) += 1e-3 * (i + 1);
  double lam = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector y = s.mat() * x;
    double nrm = y.norm();
    if (nrm == 0.0) return 0.0;
    x = y / nrm;
    lam = x.dot(s.mat() * x);
  }
  return lam;
}

double kyfan_eig(const RectMatrix& x, double p, int k) {
  Vector s = singular_values_eig(x);
  k = std::min<int>(k, static_cast<int>(s.size()));
  Vector top = s.head(k);
  if (std::isinf(p)) return top.maxCoeff();
  return std::pow(top.array().pow(p).sum(), 1.0 / p);
}

double psd_support_oracle(const ConvexSetSpec& s, const SymMatrix& g) {
  if (auto b = std::get_if<set::SpectralBox>(&s)) return std::max(b->hi, 0.0) * g.trace();
  if (auto t = std::get_if<set::TraceBall>(&s)) return t->r * std::max(0.0, power_max_eig(g));
  throw std::invalid_argument("psd_support_oracle: unsupported set");
}

HSpec random_h(Rng& rng, int n) {
  auto psd = [&]() { return SymMatrix(random_spd(rng, n, 0.0, 1.5)); };
  auto set_draw = [&]() -> ConvexSetSpec {
    switch (uniform_int(rng, 0, 6)) {
      case 0: return set::Singleton{random_sym(rng, n)};
      case 1: {
        double lo = uniform(rng, -1.0, 1.0);
        return set::SpectralBox{lo, lo + uniform(rng, 0.0, 2.0)};
      }
      case 2: return set::TraceBall{uniform(rng, 0.1, 2.0)};
      case 3: return set::Fantope{uniform_int(rng, 1, n)};
      case 4: {
        set::Hull h;
        int q = uniform_int(rng, 1, 3);
        for (int i = 0; i < q; ++i) h.vertices.push_back(uniform(rng, 0, 1) < 0.5 ? psd() : random_sym(rng, n));
        return h;
      }
      case 5: return set::Ray{uniform(rng, 0, 1) < 0.5 ? psd() : random_sym(rng, n)};
      default: return set::ShiftedPSDCap{psd()};
    }
  };
  switch (uniform_int(rng, 0, 2)) {
    case 0: return hfun::Linear{uniform(rng, 0, 1) < 0.5 ? psd() : random_sym(rng, n)};
    case 1: return hfun::Indicator{set_draw()};
    default: return hfun::Support{set_draw()};
  }
}

}  // namespace gmfkit::oracle
