#include "gmfkit/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gmfkit {

void Tolerances::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 1e-2))
      throw std::invalid_argument(std::string("tolerance ") + name + " must lie in (0, 1e-2]");
  };
  check(rank_rel, "rank_rel");
  check(psd_abs, "psd_abs");
  check(feas_abs, "feas_abs");
  check(conj_rel, "conj_rel");
}

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SymMatrix: matrix is not square");
  if (!m.allFinite()) throw std::invalid_argument("SymMatrix: non-finite entry");
  m_ = 0.5 * (m + m.transpose());
}

double SymMatrix::asymmetry(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  double scale = 1.0 + m.cwiseAbs().maxCoeff();
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

SymMatrix gram(const RectMatrix& y) { return SymMatrix(y * y.transpose()); }

RectMatrix pinv(const RectMatrix& m, const Tolerances& tol) {
  if (m.size() == 0) return RectMatrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  double cut = tol.rank_rel * (s.size() ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > cut && s(i) > 0.0) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

SymMatrix pinv(const SymMatrix& m, const Tolerances& tol) { return SymMatrix(pinv(m.mat(), tol)); }

int rank(const RectMatrix& m, const Tolerances& tol) {
  if (m.size() == 0) return 0;
  Vector s = sv(m);
  if (s(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol.rank_rel * s(0)) ++r;
  return r;
}

bool range_contains(const RectMatrix& m, const RectMatrix& c, const Tolerances& tol) {
  if (m.rows() != c.rows())
    throw std::invalid_argument("range_contains: row counts differ (" + std::to_string(m.rows()) + " vs " +
                                std::to_string(c.rows()) + ")");
  RectMatrix resid = c - m * (pinv(m, tol) * c);
  return resid.norm() <= tol.feas_abs * (1.0 + c.norm());
}

RectMatrix ker_basis(const RectMatrix& a, const Tolerances& tol) {
  const int n = static_cast<int>(a.cols());
  if (a.rows() == 0 || a.norm() == 0.0) return RectMatrix::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  int r = rank(a, tol);
  return svd.matrixV().rightCols(n - r);
}

SymMatrix ker_projector(const RectMatrix& a, const Tolerances& tol) {
  const int n = static_cast<int>(a.cols());
  return SymMatrix(Eigen::MatrixXd::Identity(n, n) - pinv(a, tol) * a);
}

SymEig sym_eig(const SymMatrix& s) {
  SymEig out;
  const int n = s.dim();
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.mat());
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  canonicalize_signs(out.vectors);
  return out;
}

double min_eig(const SymMatrix& s) {
  if (s.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eig(const SymMatrix& s) {
  if (s.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(s.dim() - 1);
}

Vector sv(const RectMatrix& m) {
  if (m.size() == 0) return Vector();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues();
}

SymMatrix psd_sqrt(const SymMatrix& s) {
  if (s.dim() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.mat());
  Vector d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return SymMatrix(es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose());
}

void canonicalize_signs(Eigen::MatrixXd& vectors) {
  for (int j = 0; j < vectors.cols(); ++j) {
    for (int i = 0; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, j)) > 1e-12) {
        if (vectors(i, j) < 0) vectors.col(j) *= -1.0;
        break;
      }
    }
  }
}

int svec_dim(int n) { return n * (n + 1) / 2; }

SymMatrix svec_basis(int n, int index) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i, ++k)
      if (k == index) {
        e(i, j) = 1.0;
        e(j, i) = 1.0;
        return SymMatrix(e);
      }
  throw std::out_of_range("svec_basis: index out of range");
}

}  // namespace gmfkit
