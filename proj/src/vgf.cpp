#include "gmfkit/vgf.hpp"

#include <cmath>

namespace gmfkit {

namespace {

ProblemData unconstrained(const VgfInstance& inst) { return ProblemData::zero(inst.n, inst.m, inst.tol); }

void check_shape(const VgfInstance& inst, const RectMatrix& y, const char* who) {
  if (y.rows() != inst.n || y.cols() != inst.m)
    throw std::invalid_argument(std::string(who) + ": expected a " + std::to_string(inst.n) + "x" +
                                std::to_string(inst.m) + " matrix");
}

}  // namespace

VgfInstance::VgfInstance(ConvexSetSpec s, int n_, int m_, Tolerances tol_)
    : set(std::move(s)), n(n_), m(m_), tol(tol_) {
  tol.validate();
  if (n < 1 || m < 1) throw std::invalid_argument("VgfInstance: dimensions must be positive");
  validate_set(set, n);
  if (!meets_KA(set, ProblemData::zero(n, m, tol), tol))
    throw std::invalid_argument("VgfInstance: S n S^n_+ is empty");
}

ExtReal vgf_eval(const VgfInstance& inst, const RectMatrix& y) {
  check_shape(inst, y, "vgf_eval");
  SupportEval s = support_within_KA(inst.set, unconstrained(inst), gram(y), inst.tol);
  return s.value.is_finite() ? ExtReal::finite(0.5 * s.value.value()) : s.value;
}

bool vgf_bounded(const VgfInstance& inst) {
  if (auto r = std::get_if<set::Ray>(&inst.set)) {
    // pos{D} n S^n_+ is {0} unless D is a nonzero PSD matrix
    return r->d.norm() == 0.0 || min_eig(r->d) < -inst.tol.psd_abs * (1.0 + r->d.norm());
  }
  return true;
}

VgfConj vgf_conj(const VgfInstance& inst, const RectMatrix& x) {
  check_shape(inst, x, "vgf_conj");
  InfProjProblem prob(unconstrained(inst), hfun::Indicator{inst.set}, inst.tol);
  CQReport rep = cq_report(prob);
  if (rep.ccq != Decision::Holds && !vgf_bounded(inst))
    throw UndecidedError("vgf_conj: S misses the positive definite cone and S n S^n_+ is unbounded");
  InfProjEval ev = eval_p(prob, x);
  return {ev.value, ev.argmin_v};
}

VgfSubgradient vgf_subdiff(const VgfInstance& inst, const RectMatrix& ybar) {
  check_shape(inst, ybar, "vgf_subdiff");
  if (!vgf_bounded(inst))
    throw std::invalid_argument(
        "vgf_subdiff: S n S^n_+ is unbounded, so the subdifferential formula can fail (as for S = pos{I})");
  SupportEval s = support_within_KA(inst.set, unconstrained(inst), gram(ybar), inst.tol);
  if (!s.value.is_finite() || !s.witness) throw NumericalError("vgf_subdiff: no maximizing V");
  VgfSubgradient out{*s.witness, s.witness->mat() * ybar, 0.0};
  double phi = 0.5 * s.value.value();
  VgfConj c = vgf_conj(inst, out.subgradient);
  if (!c.value.is_finite()) throw NumericalError("witness rejected: conjugate is not finite at V Y");
  out.fenchel_residual = phi + c.value.value() - inner(ybar, out.subgradient);
  if (std::abs(out.fenchel_residual) > inst.tol.conj_rel * (1.0 + std::abs(phi)))
    throw NumericalError("witness rejected: Fenchel residual " + std::to_string(out.fenchel_residual));
  return out;
}

GaugeDecomp vgf_gauge_decomp(const VgfInstance& inst, const RectMatrix& y) {
  check_shape(inst, y, "vgf_gauge_decomp");
  if (!contains_zero(inst.set, inst.n, inst.tol)) throw std::invalid_argument("vgf_gauge_decomp: requires 0 in S");
  Vector sig = sv(y);
  double sf = 0.0;
  if (auto b = std::get_if<set::SpectralBox>(&inst.set)) {
    sf = std::sqrt(std::max(b->hi, 0.0)) * y.norm();
  } else if (auto t = std::get_if<set::TraceBall>(&inst.set)) {
    sf = std::sqrt(t->r) * (sig.size() ? sig(0) : 0.0);
  } else if (auto f = std::get_if<set::Fantope>(&inst.set)) {
    int k = std::min<int>(f->k, static_cast<int>(sig.size()));
    sf = sig.head(k).norm();
  } else if (auto c = std::get_if<set::ShiftedPSDCap>(&inst.set)) {
    sf = (psd_sqrt(c->u).mat() * y).norm();
  } else if (std::holds_alternative<set::Singleton>(inst.set)) {
    sf = 0.0;  // S = {0}
  } else {
    throw UndecidedError("vgf_gauge_decomp: no closed form for hull or ray sets");
  }
  GaugeDecomp out;
  out.sigma_f = ExtReal::finite(sf);
  ExtReal phi = vgf_eval(inst, y);
  out.consistent = phi.is_finite() &&
                   std::abs(phi.value() - 0.5 * sf * sf) <= inst.tol.conj_rel * (1.0 + std::abs(phi.value()));
  return out;
}

double kyfan_norm(const KyFanParams& params, const RectMatrix& x) {
  Vector sig = sv(x);
  const int q = static_cast<int>(sig.size());
  if (params.k < 1 || params.k > q) throw std::invalid_argument("kyfan_norm: k must lie in [1, min(n, m)]");
  if (!(params.p >= 1.0)) throw std::invalid_argument("kyfan_norm: p must be >= 1");
  if (std::isinf(params.p)) return sig(0);
  if (params.p == 1.0) return sig.head(params.k).sum();
  if (params.p == 2.0) return sig.head(params.k).norm();
  double s = 0.0;
  for (int i = 0; i < params.k; ++i) s += std::pow(sig(i), params.p);
  return std::pow(s, 1.0 / params.p);
}

bool kyfan_vgf_identity(const KyFanParams& params, const RectMatrix& x, const Tolerances& tol) {
  if (params.p != 2.0) throw std::invalid_argument("kyfan_vgf_identity: requires p = 2");
  VgfInstance inst(set::Fantope{params.k}, static_cast<int>(x.rows()), static_cast<int>(x.cols()), tol);
  double lhs = 0.5 * std::pow(kyfan_norm(params, x), 2);
  ExtReal rhs = vgf_eval(inst, x);
  return rhs.is_finite() && std::abs(lhs - rhs.value()) <= 1e-8 * (1.0 + std::abs(lhs));
}

}  // namespace gmfkit
