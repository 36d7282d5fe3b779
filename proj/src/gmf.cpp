#include "gmfkit/gmf.hpp"

#include <string>

namespace gmfkit {

ProblemData::ProblemData(RectMatrix a, RectMatrix b, const Tolerances& tol) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != b_.rows())
    throw std::invalid_argument("ProblemData: A has " + std::to_string(a_.rows()) + " rows but B has " +
                                std::to_string(b_.rows()));
  if (a_.cols() == 0) throw std::invalid_argument("ProblemData: A must have at least one column");
  if (!a_.allFinite() || !b_.allFinite()) throw std::invalid_argument("ProblemData: non-finite entry");
  if (!range_contains(a_, b_, tol)) throw std::invalid_argument("ProblemData: rge B is not contained in rge A");
  p_ = ker_projector(a_, tol);
  y0_ = pinv(a_, tol) * b_;
  n_basis_ = ker_basis(a_, tol);
}

ProblemData ProblemData::zero(int n, int m, const Tolerances& tol) {
  return ProblemData(RectMatrix::Zero(1, n), RectMatrix::Zero(1, m), tol);
}

Eigen::MatrixXd bordered(const ProblemData& pd, const SymMatrix& v) {
  const int n = pd.n(), l = pd.l();
  if (v.dim() != n) throw std::invalid_argument("bordered: V has wrong dimension");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + l, n + l);
  m.topLeftCorner(n, n) = v.mat();
  m.topRightCorner(n, l) = pd.A().transpose();
  m.bottomLeftCorner(l, n) = pd.A();
  return m;
}

SymMatrix ker_restriction(const ProblemData& pd, const SymMatrix& v) {
  if (v.dim() != pd.n()) throw std::invalid_argument("ker_restriction: V has wrong dimension");
  return SymMatrix(pd.N().transpose() * v.mat() * pd.N());
}

bool in_KA(const ProblemData& pd, const SymMatrix& v, const Tolerances& tol) {
  if (pd.ker_dim() == 0) return true;
  return min_eig(ker_restriction(pd, v)) >= -tol.psd_abs * (1.0 + v.norm());
}

bool in_int_KA(const ProblemData& pd, const SymMatrix& v, const Tolerances& tol) {
  if (pd.ker_dim() == 0) return true;
  return min_eig(ker_restriction(pd, v)) >= tol.psd_abs;
}

bool in_KA_polar(const ProblemData& pd, const SymMatrix& w, const Tolerances& tol) {
  if (w.dim() != pd.n()) throw std::invalid_argument("in_KA_polar: W has wrong dimension");
  const Eigen::MatrixXd& p = pd.P().mat();
  double scale = 1.0 + w.norm();
  if ((w.mat() - p * w.mat() * p).norm() > tol.feas_abs * scale) return false;
  return max_eig(w) <= tol.psd_abs * scale;
}

bool in_omega(const ProblemData& pd, const RectMatrix& y, const SymMatrix& w, const Tolerances& tol) {
  if (y.rows() != pd.n() || y.cols() != pd.m()) throw std::invalid_argument("in_omega: Y has wrong shape");
  if ((pd.A() * y - pd.B()).norm() > tol.feas_abs * (1.0 + pd.B().norm())) return false;
  return in_KA_polar(pd, gram(y) * 0.5 + w, tol);
}

namespace {

void check_shapes(const ProblemData& pd, const RectMatrix& x, const SymMatrix& v, const char* who) {
  if (x.rows() != pd.n() || x.cols() != pd.m())
    throw std::invalid_argument(std::string(who) + ": X must be " + std::to_string(pd.n()) + "x" +
                                std::to_string(pd.m()));
  if (v.dim() != pd.n()) throw std::invalid_argument(std::string(who) + ": V has wrong dimension");
}

RectMatrix stacked_rhs(const ProblemData& pd, const RectMatrix& x) {
  RectMatrix r(pd.n() + pd.l(), pd.m());
  r.topRows(pd.n()) = x;
  r.bottomRows(pd.l()) = pd.B();
  return r;
}

}  // namespace

GmfEval eval_gmf(const ProblemData& pd, const RectMatrix& x, const SymMatrix& v, const Tolerances& tol) {
  check_shapes(pd, x, v, "eval_gmf");
  GmfEval out;
  if (!in_KA(pd, v, tol)) return out;
  Eigen::MatrixXd m = bordered(pd, v);
  RectMatrix r = stacked_rhs(pd, x);
  Eigen::MatrixXd mp = pinv(m, tol);
  RectMatrix sol = mp * r;
  if ((r - m * sol).norm() > tol.feas_abs * (1.0 + r.norm())) return out;
  out.value = ExtReal::finite(0.5 * inner(r, sol));
  out.witness_y = sol.topRows(pd.n());
  out.witness_multiplier = sol.bottomRows(pd.l());
  out.unique = in_int_KA(pd, v, tol);
  return out;
}

GmfEval eval_gmf_oracle(const ProblemData& pd, const RectMatrix& x, const SymMatrix& v, const Tolerances& tol) {
  check_shapes(pd, x, v, "eval_gmf_oracle");
  if (!in_int_KA(pd, v, tol)) throw std::invalid_argument("oracle requires interior point");
  const RectMatrix& n = pd.N();
  RectMatrix y = pd.Y0();
  if (n.cols() > 0) {
    Eigen::MatrixXd h = n.transpose() * v.mat() * n;
    RectMatrix rhs = n.transpose() * (x - v.mat() * pd.Y0());
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    RectMatrix z = llt.solve(rhs);
    y += n * z;
  }
  GmfEval out;
  out.value = ExtReal::finite(inner(y, x) - 0.5 * inner(y, v.mat() * y));
  out.witness_y = y;
  // A^T Lambda = X - V Y
  out.witness_multiplier = pinv(RectMatrix(pd.A().transpose()), tol) * (x - v.mat() * y);
  out.unique = true;
  return out;
}

GmfGradient grad_gmf(const ProblemData& pd, const RectMatrix& x, const SymMatrix& v, const Tolerances& tol) {
  check_shapes(pd, x, v, "grad_gmf");
  if (!in_int_KA(pd, v, tol)) throw std::invalid_argument("gradient undefined: V not in int K_A");
  GmfEval e = eval_gmf(pd, x, v, tol);
  if (!e.value.is_finite()) throw std::invalid_argument("gradient undefined: range condition fails");
  return {*e.witness_y, gram(*e.witness_y) * -0.5};
}

GmfCurvature eval_gmf_curvature(const ProblemData& pd, const RectMatrix& x, const SymMatrix& v,
                                const Tolerances& tol) {
  check_shapes(pd, x, v, "eval_gmf_curvature");
  GmfCurvature out;
  if (!in_KA(pd, v, tol)) return out;
  Eigen::MatrixXd m = bordered(pd, v);
  RectMatrix r = stacked_rhs(pd, x);
  Eigen::MatrixXd mp = pinv(m, tol);
  RectMatrix sol = mp * r;
  if ((r - m * sol).norm() > tol.feas_abs * (1.0 + r.norm())) return out;
  out.value = ExtReal::finite(0.5 * inner(r, sol));
  out.y = sol.topRows(pd.n());
  out.q = mp.topLeftCorner(pd.n(), pd.n());
  return out;
}

}  // namespace gmfkit
