#pragma once

#include <optional>

#include "gmfkit/ext_real.hpp"
#include "gmfkit/numlin.hpp"

namespace gmfkit {

// The pair (A, B) with rge B inside rge A, plus cached projector, particular
// solution and kernel basis.
class ProblemData {
 public:
  ProblemData(RectMatrix a, RectMatrix b, const Tolerances& tol = {});
  // A = 0 (one zero row) and B = 0: the unconstrained case.
  static ProblemData zero(int n, int m, const Tolerances& tol = {});

  const RectMatrix& A() const { return a_; }
  const RectMatrix& B() const { return b_; }
  const SymMatrix& P() const { return p_; }
  const RectMatrix& Y0() const { return y0_; }
  // orthonormal basis of ker A, n x d
  const RectMatrix& N() const { return n_basis_; }

  int n() const { return static_cast<int>(a_.cols()); }
  int m() const { return static_cast<int>(b_.cols()); }
  int l() const { return static_cast<int>(a_.rows()); }
  int ker_dim() const { return static_cast<int>(n_basis_.cols()); }
  bool a_is_zero() const { return a_.norm() == 0.0; }
  bool b_is_zero() const { return b_.norm() == 0.0; }

 private:
  RectMatrix a_, b_;
  SymMatrix p_;
  RectMatrix y0_, n_basis_;
};

struct GmfEval {
  ExtReal value = ExtReal::plus_inf();
  std::optional<RectMatrix> witness_y;
  std::optional<RectMatrix> witness_multiplier;
  // true when V is interior, so the witness is the unique maximizer
  bool unique = false;
};

// M(V) = [V A^T; A 0]
Eigen::MatrixXd bordered(const ProblemData& pd, const SymMatrix& v);

// N^T V N, the restriction of V to ker A
SymMatrix ker_restriction(const ProblemData& pd, const SymMatrix& v);

bool in_KA(const ProblemData& pd, const SymMatrix& v, const Tolerances& tol);
bool in_int_KA(const ProblemData& pd, const SymMatrix& v, const Tolerances& tol);
bool in_KA_polar(const ProblemData& pd, const SymMatrix& w, const Tolerances& tol);
bool in_omega(const ProblemData& pd, const RectMatrix& y, const SymMatrix& w, const Tolerances& tol);

GmfEval eval_gmf(const ProblemData& pd, const RectMatrix& x, const SymMatrix& v, const Tolerances& tol);

// Direct maximization over Y = Y0 + N Z; requires V in int K_A.
GmfEval eval_gmf_oracle(const ProblemData& pd, const RectMatrix& x, const SymMatrix& v, const Tolerances& tol);

struct GmfGradient {
  RectMatrix gx;
  SymMatrix gv;
};

// Gradient on the interior of dom phi: (Y, -Y Y^T / 2).
GmfGradient grad_gmf(const ProblemData& pd, const RectMatrix& x, const SymMatrix& v, const Tolerances& tol);

// Value, witness and the curvature block Q = top-left n x n block of M(V)^+.
// The second derivative of phi along (dX, dV) is <E, Q E> with E = dX - dV Y.
struct GmfCurvature {
  ExtReal value = ExtReal::plus_inf();
  RectMatrix y;
  Eigen::MatrixXd q;
};
GmfCurvature eval_gmf_curvature(const ProblemData& pd, const RectMatrix& x, const SymMatrix& v,
                                const Tolerances& tol);

}  // namespace gmfkit
