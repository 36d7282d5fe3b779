#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

namespace gmfkit {

using RectMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Tolerances {
  double rank_rel = 1e-10;
  double psd_abs = 1e-9;
  double feas_abs = 1e-8;
  double conj_rel = 1e-6;

  // throws std::invalid_argument unless every field is in (0, 1e-2]
  void validate() const;
};

// Symmetric matrix stored as (S + S^T) / 2.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix identity(int n) { return SymMatrix(Eigen::MatrixXd::Identity(n, n)); }
  static SymMatrix zero(int n) { return SymMatrix(Eigen::MatrixXd::Zero(n, n)); }

  // Largest |S(i,j) - S(j,i)| relative to 1 + max|S|.
  static double asymmetry(const Eigen::MatrixXd& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  SymMatrix operator+(const SymMatrix& o) const { return SymMatrix(m_ + o.m_); }
  SymMatrix operator-(const SymMatrix& o) const { return SymMatrix(m_ - o.m_); }
  SymMatrix operator*(double s) const { return SymMatrix(m_ * s); }
  double trace() const { return m_.trace(); }
  double norm() const { return m_.norm(); }

 private:
  Eigen::MatrixXd m_;
};

inline SymMatrix operator*(double s, const SymMatrix& a) { return a * s; }
inline double inner(const SymMatrix& a, const SymMatrix& b) { return a.mat().cwiseProduct(b.mat()).sum(); }
inline double inner(const RectMatrix& a, const RectMatrix& b) { return a.cwiseProduct(b).sum(); }

// Symmetric matrix from a rectangular one: Y Y^T.
SymMatrix gram(const RectMatrix& y);

RectMatrix pinv(const RectMatrix& m, const Tolerances& tol);
SymMatrix pinv(const SymMatrix& m, const Tolerances& tol);

// Numerical rank with the rank_rel cutoff.
int rank(const RectMatrix& m, const Tolerances& tol);

// ||(I - M M^+) C|| <= feas_abs (1 + ||C||)
bool range_contains(const RectMatrix& m, const RectMatrix& c, const Tolerances& tol);

// Orthonormal basis of ker A as columns (n x d).
RectMatrix ker_basis(const RectMatrix& a, const Tolerances& tol);

// P = I - A^+ A
SymMatrix ker_projector(const RectMatrix& a, const Tolerances& tol);

struct SymEig {
  Vector values;         // descending
  Eigen::MatrixXd vectors;  // columns match values
};

SymEig sym_eig(const SymMatrix& s);
double min_eig(const SymMatrix& s);
double max_eig(const SymMatrix& s);

// Singular values, descending, length min(rows, cols).
Vector sv(const RectMatrix& m);

// PSD square root of the PSD part of S (negative eigenvalues clamped to 0).
SymMatrix psd_sqrt(const SymMatrix& s);

// Eigenvectors with sign fixed so that the first nonzero entry is positive.
void canonicalize_signs(Eigen::MatrixXd& vectors);

// svec-style coordinates on S^n: upper triangle, column by column.
int svec_dim(int n);
SymMatrix svec_basis(int n, int index);

}  // namespace gmfkit
