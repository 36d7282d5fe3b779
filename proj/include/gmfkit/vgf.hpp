#pragma once

#include <limits>
#include <optional>

#include "gmfkit/hset.hpp"
#include "gmfkit/infproj.hpp"

namespace gmfkit {

// Phi_S(Y) = (1/2) sigma_{S n S^n_+}(Y Y^T) on n x m matrices
struct VgfInstance {
  ConvexSetSpec set;
  int n = 0, m = 0;
  Tolerances tol;

  // throws std::invalid_argument when S n S^n_+ is empty
  VgfInstance(ConvexSetSpec s, int n_, int m_, Tolerances tol_ = {});
};

// p = infinity is encoded as std::numeric_limits<double>::infinity()
struct KyFanParams {
  double p = 1.0;
  int k = 1;
};

ExtReal vgf_eval(const VgfInstance& inst, const RectMatrix& y);

// Whether S n S^n_+ is bounded.
bool vgf_bounded(const VgfInstance& inst);

struct VgfConj {
  ExtReal value = ExtReal::plus_inf();
  std::optional<SymMatrix> witness;  // minimizing V
};

// Phi*(X) = (1/2) inf over V in S n S^n_+ with rge X in rge V of tr(X^T V^+ X).
// Needs S to meet the positive definite cone or S n S^n_+ bounded; UndecidedError otherwise.
VgfConj vgf_conj(const VgfInstance& inst, const RectMatrix& x);

struct VgfSubgradient {
  SymMatrix vbar;
  RectMatrix subgradient;  // vbar * Ybar
  double fenchel_residual = 0.0;
};

// One subgradient V Ybar with V maximizing <V, Ybar Ybar^T>, certified by Fenchel-Young.
// std::invalid_argument when S n S^n_+ is unbounded; NumericalError when the certificate fails.
VgfSubgradient vgf_subdiff(const VgfInstance& inst, const RectMatrix& ybar);

struct GaugeDecomp {
  ExtReal sigma_f = ExtReal::finite(0.0);  // sup over L L^T in S n S^n_+ of |L^T Y|_F
  bool consistent = false;                 // Phi(Y) = sigma_f^2 / 2 within conj_rel
};

// Requires 0 in S; UndecidedError for hull and ray sets.
GaugeDecomp vgf_gauge_decomp(const VgfInstance& inst, const RectMatrix& y);

double kyfan_norm(const KyFanParams& params, const RectMatrix& x);

// (1/2) |X|_{2,k}^2 == vgf_eval(Fantope(k), X) within 1e-8 relative; p must be 2.
bool kyfan_vgf_identity(const KyFanParams& params, const RectMatrix& x, const Tolerances& tol = {});

}  // namespace gmfkit
