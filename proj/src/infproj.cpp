#include "gmfkit/infproj.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gmfkit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();
// margin below which S n K_A is declared empty by the interior search
constexpr double kEmptyMargin = 1e-7;

// V(theta) with the variant's LMIs. For support h the epigraph variables follow svec(V).
struct Lift {
  int dim = 0;
  Vector cost;
  AffineMap v_map;
  std::vector<AffineMap> lmis;
  Vector center;
  std::vector<Vector> probes;
};

Vector svec_coords(const SymMatrix& v) {
  const int n = v.dim();
  Vector th(svec_dim(n));
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i, ++k) th(k) = v(i, j);
  return th;
}

std::vector<Eigen::MatrixXd> svec_mats(int n) {
  std::vector<Eigen::MatrixXd> out;
  for (int k = 0; k < svec_dim(n); ++k) out.push_back(svec_basis(n, k).mat());
  return out;
}

Eigen::MatrixXd eye(int n) { return Eigen::MatrixXd::Identity(n, n); }
Eigen::MatrixXd zeros(int n) { return Eigen::MatrixXd::Zero(n, n); }
Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

Lift fixed_point(const SymMatrix& v) {
  Lift lf;
  lf.v_map = AffineMap(v.mat(), 0);
  lf.cost = Vector();
  lf.center = Vector();
  lf.probes.push_back(Vector());
  return lf;
}

// V ranges over svec coordinates; `extra` epigraph variables follow.
Lift svec_lift(int n, int extra) {
  Lift lf;
  const int sd = svec_dim(n);
  lf.dim = sd + extra;
  lf.cost = Vector::Zero(lf.dim);
  lf.v_map = AffineMap(zeros(n), lf.dim);
  auto es = svec_mats(n);
  for (int k = 0; k < sd; ++k) lf.v_map.coeff[k] = es[k];
  lf.center = Vector::Zero(lf.dim);
  lf.center.head(sd) = svec_coords(SymMatrix::identity(n));
  return lf;
}

// LMI c0 * base_shift + c1 * V(theta) over the svec block
AffineMap svec_lmi(int dim, int n, const Eigen::MatrixXd& base, double sign) {
  AffineMap a(base, dim);
  auto es = svec_mats(n);
  for (int k = 0; k < svec_dim(n); ++k) a.coeff[k] = sign * es[k];
  return a;
}

Lift linear_lift(int n, const SymMatrix& u) {
  Lift lf = svec_lift(n, 0);
  auto es = svec_mats(n);
  for (int k = 0; k < lf.dim; ++k) lf.cost(k) = u.mat().cwiseProduct(es[k]).sum();
  lf.probes.push_back(lf.center);
  return lf;
}

Lift indicator_lift(const ConvexSetSpec& s, int n, const Tolerances& tol) {
  return std::visit(
      overloaded{
          [&](const set::Singleton& x) { return fixed_point(x.u); },
          [&](const set::SpectralBox& x) {
            if (x.lo == x.hi) return fixed_point(SymMatrix::identity(n) * x.lo);
            Lift lf = svec_lift(n, 0);
            lf.lmis.push_back(svec_lmi(lf.dim, n, -x.lo * eye(n), 1.0));
            lf.lmis.push_back(svec_lmi(lf.dim, n, x.hi * eye(n), -1.0));
            lf.center = svec_coords(SymMatrix::identity(n) * (0.5 * (x.lo + x.hi)));
            lf.probes = {lf.center, svec_coords(SymMatrix::identity(n) * x.lo),
                         svec_coords(SymMatrix::identity(n) * x.hi)};
            return lf;
          },
          [&](const set::TraceBall& x) {
            if (x.r == 0.0) return fixed_point(SymMatrix::zero(n));
            Lift lf = svec_lift(n, 0);
            lf.lmis.push_back(svec_lmi(lf.dim, n, zeros(n), 1.0));
            AffineMap tr(scalar(x.r), lf.dim);
            for (int k = 0; k < lf.dim; ++k) tr.coeff[k] = scalar(-lf.v_map.coeff[k].trace());
            lf.lmis.push_back(tr);
            lf.center = svec_coords(SymMatrix::identity(n) * (x.r / (n + 1)));
            lf.probes = {lf.center, Vector::Zero(lf.dim)};
            return lf;
          },
          [&](const set::Fantope& x) {
            Lift lf = svec_lift(n, 0);
            lf.lmis.push_back(svec_lmi(lf.dim, n, zeros(n), 1.0));
            lf.lmis.push_back(svec_lmi(lf.dim, n, eye(n), -1.0));
            AffineMap tr(scalar(x.k), lf.dim);
            for (int k = 0; k < lf.dim; ++k) tr.coeff[k] = scalar(-lf.v_map.coeff[k].trace());
            lf.lmis.push_back(tr);
            lf.center = svec_coords(SymMatrix::identity(n) * (double(x.k) / (n + 1)));
            lf.probes = {lf.center, Vector::Zero(lf.dim)};
            return lf;
          },
          [&](const set::Hull& x) {
            const int q = static_cast<int>(x.vertices.size());
            if (q == 1) return fixed_point(x.vertices[0]);
            Lift lf;
            lf.dim = q - 1;
            lf.cost = Vector::Zero(lf.dim);
            lf.v_map = AffineMap(x.vertices[0].mat(), lf.dim);
            // weights (1 - sum theta, theta_1, ...) on a diagonal LMI
            Eigen::MatrixXd base = zeros(q);
            base(0, 0) = 1.0;
            AffineMap w(base, lf.dim);
            for (int i = 0; i < lf.dim; ++i) {
              lf.v_map.coeff[i] = x.vertices[i + 1].mat() - x.vertices[0].mat();
              Eigen::MatrixXd c = zeros(q);
              c(0, 0) = -1.0;
              c(i + 1, i + 1) = 1.0;
              w.coeff[i] = c;
            }
            lf.lmis.push_back(w);
            lf.center = Vector::Constant(lf.dim, 1.0 / q);
            lf.probes.push_back(lf.center);
            lf.probes.push_back(Vector::Zero(lf.dim));
            for (int i = 0; i < lf.dim; ++i) lf.probes.push_back(Vector::Unit(lf.dim, i));
            return lf;
          },
          [&](const set::Ray& x) {
            if (x.d.norm() == 0.0) return fixed_point(SymMatrix::zero(n));
            Lift lf;
            lf.dim = 1;
            lf.cost = Vector::Zero(1);
            lf.v_map = AffineMap(zeros(n), 1);
            lf.v_map.coeff[0] = x.d.mat();
            AffineMap t(scalar(0.0), 1);
            t.coeff[0] = scalar(1.0);
            lf.lmis.push_back(t);
            lf.center = Vector::Ones(1);
            lf.probes = {lf.center, Vector::Zero(1)};
            return lf;
          },
          [&](const set::ShiftedPSDCap& x) {
            // V = F Z F^T with U = F F^T, 0 <= Z <= I
            SymEig e = sym_eig(x.u);
            double cut = tol.rank_rel * std::max(1.0, std::abs(e.values(0)));
            int r = 0;
            while (r < n && e.values(r) > cut) ++r;
            if (r == 0) return fixed_point(SymMatrix::zero(n));
            Eigen::MatrixXd f = e.vectors.leftCols(r) * e.values.head(r).cwiseSqrt().asDiagonal();
            Lift lf = svec_lift(r, 0);
            lf.v_map = AffineMap(zeros(n), lf.dim);
            auto es = svec_mats(r);
            for (int k = 0; k < lf.dim; ++k) lf.v_map.coeff[k] = f * es[k] * f.transpose();
            lf.lmis.push_back(svec_lmi(lf.dim, r, zeros(r), 1.0));
            lf.lmis.push_back(svec_lmi(lf.dim, r, eye(r), -1.0));
            lf.center = svec_coords(SymMatrix::identity(r) * 0.5);
            lf.probes = {lf.center, Vector::Zero(lf.dim), svec_coords(SymMatrix::identity(r))};
            return lf;
          },
      },
      s);
}

// h = sigma_S as an epigraph program in (svec V, extra variables)
Lift support_lift(const ConvexSetSpec& s, int n) {
  const int sd = svec_dim(n);
  auto es = svec_mats(n);
  return std::visit(
      overloaded{
          [&](const set::Singleton& x) { return linear_lift(n, x.u); },
          [&](const set::SpectralBox& x) {
            if (x.lo == x.hi) return linear_lift(n, SymMatrix::identity(n) * x.lo);
            // lo tr V + (hi - lo) tr V1 with V1 >= 0, V1 >= V
            Lift lf = svec_lift(n, sd);
            for (int k = 0; k < sd; ++k) {
              lf.cost(k) = x.lo * es[k].trace();
              lf.cost(sd + k) = (x.hi - x.lo) * es[k].trace();
            }
            AffineMap v1(zeros(n), lf.dim), gap(zeros(n), lf.dim);
            for (int k = 0; k < sd; ++k) {
              v1.coeff[sd + k] = es[k];
              gap.coeff[sd + k] = es[k];
              gap.coeff[k] = -es[k];
            }
            lf.lmis = {v1, gap};
            lf.center.tail(sd) = svec_coords(SymMatrix::identity(n) * 2.0);
            lf.probes.push_back(lf.center);
            return lf;
          },
          [&](const set::TraceBall& x) {
            if (x.r == 0.0) return linear_lift(n, SymMatrix::zero(n));
            Lift lf = svec_lift(n, 1);
            lf.cost(sd) = x.r;
            AffineMap sp(scalar(0.0), lf.dim);
            sp.coeff[sd] = scalar(1.0);
            AffineMap gap(zeros(n), lf.dim);
            for (int k = 0; k < sd; ++k) gap.coeff[k] = -es[k];
            gap.coeff[sd] = eye(n);
            lf.lmis = {sp, gap};
            lf.center(sd) = 2.0;
            lf.probes.push_back(lf.center);
            return lf;
          },
          [&](const set::Fantope& x) {
            // k s + tr Z with s >= 0, Z >= 0, Z - V + s I >= 0
            Lift lf = svec_lift(n, 1 + sd);
            lf.cost(sd) = x.k;
            for (int k = 0; k < sd; ++k) lf.cost(sd + 1 + k) = es[k].trace();
            AffineMap sp(scalar(0.0), lf.dim), z(zeros(n), lf.dim), gap(zeros(n), lf.dim);
            sp.coeff[sd] = scalar(1.0);
            gap.coeff[sd] = eye(n);
            for (int k = 0; k < sd; ++k) {
              z.coeff[sd + 1 + k] = es[k];
              gap.coeff[sd + 1 + k] = es[k];
              gap.coeff[k] = -es[k];
            }
            lf.lmis = {sp, z, gap};
            lf.center(sd) = 1.0;
            lf.center.tail(sd) = svec_coords(SymMatrix::identity(n));
            lf.probes.push_back(lf.center);
            return lf;
          },
          [&](const set::Hull& x) {
            const int q = static_cast<int>(x.vertices.size());
            Lift lf = svec_lift(n, 1);
            lf.cost(sd) = 1.0;
            AffineMap gap(zeros(q), lf.dim);
            for (int k = 0; k < sd; ++k) {
              Eigen::MatrixXd c = zeros(q);
              for (int i = 0; i < q; ++i) c(i, i) = -x.vertices[i].mat().cwiseProduct(es[k]).sum();
              gap.coeff[k] = c;
            }
            gap.coeff[sd] = eye(q);
            lf.lmis = {gap};
            double top = -kInf;
            for (const auto& u : x.vertices) top = std::max(top, u.trace());
            lf.center(sd) = top + 1.0;
            lf.probes.push_back(lf.center);
            return lf;
          },
          [&](const set::Ray& x) {
            if (x.d.norm() == 0.0) return linear_lift(n, SymMatrix::zero(n));
            Lift lf = svec_lift(n, 0);
            AffineMap a(scalar(0.0), lf.dim);
            for (int k = 0; k < sd; ++k) a.coeff[k] = scalar(-x.d.mat().cwiseProduct(es[k]).sum());
            lf.lmis = {a};
            double dn2 = x.d.norm() * x.d.norm();
            SymMatrix c = SymMatrix::identity(n) - x.d * ((x.d.trace() + 1.0) / dn2);
            lf.center = svec_coords(c);
            lf.probes = {lf.center, Vector::Zero(lf.dim)};
            return lf;
          },
          [&](const set::ShiftedPSDCap& x) {
            // tr V1 with V1 >= 0, V1 >= R V R, R = U^{1/2}
            Eigen::MatrixXd r = psd_sqrt(x.u).mat();
            Lift lf = svec_lift(n, sd);
            for (int k = 0; k < sd; ++k) lf.cost(sd + k) = es[k].trace();
            AffineMap v1(zeros(n), lf.dim), gap(zeros(n), lf.dim);
            for (int k = 0; k < sd; ++k) {
              v1.coeff[sd + k] = es[k];
              gap.coeff[sd + k] = es[k];
              gap.coeff[k] = -(r * es[k] * r);
            }
            lf.lmis = {v1, gap};
            lf.center.tail(sd) = svec_coords(SymMatrix(x.u.mat() + eye(n)));
            lf.probes.push_back(lf.center);
            return lf;
          },
      },
      s);
}

Lift lift_h(const InfProjProblem& prob) {
  const int n = prob.pd.n();
  return std::visit(overloaded{
                        [&](const hfun::Linear& x) { return linear_lift(n, x.u); },
                        [&](const hfun::Indicator& x) { return indicator_lift(x.set, n, prob.tol); },
                        [&](const hfun::Support& x) { return support_lift(x.set, n); },
                    },
                    prob.h);
}

// N^T V(theta) N > 0, or nothing when ker A = {0}
std::optional<AffineMap> ka_lmi(const Lift& lf, const ProblemData& pd) {
  if (pd.ker_dim() == 0 || lf.dim == 0) return std::nullopt;
  return lf.v_map.congruence(pd.N());
}

double lmi_violation(const Lift& lf, const Vector& th) {
  double viol = 0.0;
  for (const auto& l : lf.lmis) viol += std::max(0.0, -min_eig(SymMatrix(l.at(th))));
  return viol;
}

bool lmis_hold(const Lift& lf, const Vector& th, const Tolerances& tol) {
  for (const auto& l : lf.lmis) {
    SymMatrix g(l.at(th));
    if (min_eig(g) < -tol.psd_abs * (1.0 + g.norm())) return false;
  }
  return true;
}

struct InteriorPoint {
  std::optional<Vector> theta;
  double margin = -kInf;
};

// A theta with the set LMIs strict and N^T V N >= psd_abs, searched by margin maximization.
InteriorPoint interior_point(const Lift& lf, const ProblemData& pd, const Tolerances& tol) {
  InteriorPoint out;
  auto ka = ka_lmi(lf, pd);
  if (!ka) {
    out.theta = lf.center;
    out.margin = kInf;
    return out;
  }
  double m0 = min_eig(SymMatrix(ka->at(lf.center)));
  if (m0 >= tol.psd_abs) {
    out.theta = lf.center;
    out.margin = m0;
    return out;
  }
  std::vector<AffineMap> lmis = lf.lmis;
  std::vector<bool> shifted(lmis.size(), false);
  lmis.push_back(*ka);
  shifted.push_back(true);
  InteriorSearch is = find_interior(lmis, shifted, lf.center, tol.psd_abs, tol);
  out.margin = is.margin;
  out.theta = is.theta;
  return out;
}

BarrierProblem make_problem(const Lift& lf, const InfProjProblem& prob, const RectMatrix& x, double shift) {
  BarrierProblem pb;
  pb.dim = lf.dim;
  pb.cost = lf.cost;
  pb.lmis = lf.lmis;
  pb.pd = &prob.pd;
  pb.x_map = AffineMap(x, lf.dim);
  pb.v_map = lf.v_map;
  if (shift > 0) pb.v_map.base += shift * prob.pd.P().mat();
  if (prob.pd.ker_dim() > 0) pb.lmis.push_back(pb.v_map.congruence(prob.pd.N()));
  return pb;
}

double range_residual(const ProblemData& pd, const RectMatrix& x, const SymMatrix& v, const Tolerances& tol) {
  Eigen::MatrixXd m = bordered(pd, v);
  RectMatrix r(pd.n() + pd.l(), pd.m());
  r.topRows(pd.n()) = x;
  r.bottomRows(pd.l()) = pd.B();
  RectMatrix res = r - m * (pinv(m, tol) * r);
  return res.norm() / (1.0 + r.norm());
}

// Compass search on the range residual plus LMI and K_A violations.
Vector compass_search(const Lift& lf, const InfProjProblem& prob, const RectMatrix& x, Vector th) {
  const ProblemData& pd = prob.pd;
  auto objective = [&](const Vector& t) {
    SymMatrix v(lf.v_map.at(t));
    double val = lmi_violation(lf, t) + range_residual(pd, x, v, prob.tol);
    if (pd.ker_dim() > 0) val += std::max(0.0, -min_eig(ker_restriction(pd, v)));
    return val;
  };
  const int d = lf.dim;
  std::vector<Vector> dirs;
  for (int i = 0; i < d; ++i) {
    dirs.push_back(Vector::Unit(d, i));
    dirs.push_back(-Vector::Unit(d, i));
  }
  if (d <= 12)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        Vector e = Vector::Unit(d, i) - Vector::Unit(d, j);
        dirs.push_back(e);
        dirs.push_back(-e);
      }
  double f = objective(th);
  double step = 0.5 * (1.0 + (d ? th.cwiseAbs().maxCoeff() : 0.0));
  int evals = 0;
  while (step > 1e-13 && f > 0.0 && evals < 20000) {
    bool moved = false;
    for (const auto& dir : dirs) {
      Vector cand = th + step * dir;
      double fc = objective(cand);
      ++evals;
      if (fc < f) {
        th = cand;
        f = fc;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  return th;
}

bool dom_ok(const Lift& lf, const InfProjProblem& prob, const RectMatrix& x, const Vector& th) {
  if (!lmis_hold(lf, th, prob.tol)) return false;
  SymMatrix v(lf.v_map.at(th));
  // a V whose negative part is as large as V itself (tD near 0 with D indefinite) is not a certificate
  if (prob.pd.ker_dim() > 0 && min_eig(ker_restriction(prob.pd, v)) < -prob.tol.psd_abs * v.norm()) return false;
  return eval_gmf(prob.pd, x, v, prob.tol).value.is_finite();
}

const ConvexSetSpec* support_set(const HSpec& h) {
  if (auto s = std::get_if<hfun::Support>(&h)) return &s->set;
  return nullptr;
}
const ConvexSetSpec* indicator_set(const HSpec& h) {
  if (auto s = std::get_if<hfun::Indicator>(&h)) return &s->set;
  return nullptr;
}

bool ccq_trivial(const InfProjProblem& prob) {
  if (std::holds_alternative<hfun::Linear>(prob.h)) return true;
  if (auto s = support_set(prob.h)) return is_bounded(*s);
  return false;
}

bool is_zero(const RectMatrix& x, const Tolerances& tol) { return x.norm() <= tol.feas_abs; }

}  // namespace

InfProjProblem::InfProjProblem(ProblemData pd_, HSpec h_, Tolerances tol_)
    : pd(std::move(pd_)), h(std::move(h_)), tol(tol_) {
  tol.validate();
  validate_h(h, pd.n());
}

std::string to_string(Decision d) {
  switch (d) {
    case Decision::Holds: return "Holds";
    case Decision::Fails: return "Fails";
    default: return "Undecided";
  }
}

ExtReal psi(const InfProjProblem& prob, const RectMatrix& x, const SymMatrix& v) {
  ExtReal h = h_eval(prob.h, v, prob.tol);
  if (h.is_plus_inf()) return h;
  return eval_gmf(prob.pd, x, v, prob.tol).value + h;
}

bool certify_unbounded_ray(const InfProjProblem& prob, const RectMatrix& x, const SymMatrix& v0,
                           const SymMatrix& d) {
  double prev = kInf, prev_t = 0.0, slope = 0.0;
  for (double t = 1.0; t <= 1e6; t *= 10.0) {
    ExtReal val = psi(prob, x, v0 + d * t);
    if (!val.is_finite()) return false;
    double v = val.value();
    if (!(v < prev)) return false;
    if (std::isfinite(prev)) slope = (v - prev) / (t - prev_t);
    prev = v;
    prev_t = t;
  }
  return slope < -prob.tol.feas_abs;
}

DomainCheck dom_p_check(const InfProjProblem& prob, const RectMatrix& x) {
  if (x.rows() != prob.pd.n() || x.cols() != prob.pd.m()) throw std::invalid_argument("dom_p_member: X has wrong shape");
  DomainCheck out;
  if (ccq_trivial(prob)) {
    // I is interior to K_A and dom h = S^n
    SymMatrix v = SymMatrix::identity(prob.pd.n());
    out.member = eval_gmf(prob.pd, x, v, prob.tol).value.is_finite();
    if (out.member) out.certificate = v;
    return out;
  }
  Lift lf = lift_h(prob);
  std::vector<Vector> starts;
  InteriorPoint ip = interior_point(lf, prob.pd, prob.tol);
  if (ip.theta) starts.push_back(*ip.theta);
  for (const auto& p : lf.probes) starts.push_back(p);
  for (const auto& th : starts)
    if (dom_ok(lf, prob, x, th)) {
      out.member = true;
      out.certificate = SymMatrix(lf.v_map.at(th));
      return out;
    }
  if (lf.dim == 0) return out;
  for (const auto& th0 : starts) {
    Vector th = compass_search(lf, prob, x, th0);
    if (dom_ok(lf, prob, x, th)) {
      out.member = true;
      out.certificate = SymMatrix(lf.v_map.at(th));
      return out;
    }
  }
  return out;
}

bool dom_p_member(const InfProjProblem& prob, const RectMatrix& x) { return dom_p_check(prob, x).member; }

InfProjEval eval_p(const InfProjProblem& prob, const RectMatrix& x) {
  if (x.rows() != prob.pd.n() || x.cols() != prob.pd.m()) throw std::invalid_argument("eval_p: X has wrong shape");
  const Tolerances& tol = prob.tol;
  InfProjEval out;
  Lift lf = lift_h(prob);
  if (lf.dim == 0) {
    SymMatrix v(lf.v_map.base);
    out.value = psi(prob, x, v);
    if (out.value.is_finite()) out.argmin_v = v;
    return out;
  }
  BarrierOptions opt;
  opt.unbounded_below = -1.0 / tol.feas_abs;

  auto finish = [&](const BarrierProblem& pb, const Vector& th0, bool exact_value) -> bool {
    BarrierResult r = barrier_minimize(pb, th0, opt, tol);
    out.inner_iterations += r.iterations;
    SymMatrix v(lf.v_map.at(r.theta));
    if (r.status == BarrierResult::Status::Unbounded) {
      SymMatrix v0(lf.v_map.at(th0));
      SymMatrix d = v - v0;
      double dn = d.norm();
      if (dn > 0) {
        d = d * (1.0 / dn);
        if (certify_unbounded_ray(prob, x, v0, d)) {
          out.value = ExtReal::minus_inf();
          out.unbounded_certificate = d;
          out.unbounded_origin = v0;
          return true;
        }
      }
    }
    // the barrier objective uses a tight rank cutoff; psi with the user cutoff can truncate a near-singular V
    if (std::isfinite(r.objective)) {
      out.value = ExtReal::finite(r.objective);
    } else {
      out.value = exact_value ? psi(prob, x, v) : ExtReal::plus_inf();
    }
    out.argmin_v = v;
    return true;
  };

  InteriorPoint ip = interior_point(lf, prob.pd, tol);
  if (ip.theta) {
    BarrierProblem pb = make_problem(lf, prob, x, 0.0);
    finish(pb, *ip.theta, true);
    return out;
  }
  // dom h n int K_A is empty: check the domain, then approach the face through V + eps P
  DomainCheck dc = dom_p_check(prob, x);
  if (!dc.member) return out;
  bool solved = false;
  for (double eps : {1e-3, 1e-5, 1e-7, 1e-9}) {
    BarrierProblem pb = make_problem(lf, prob, x, eps);
    std::vector<bool> shifted(pb.lmis.size(), false);
    shifted.back() = true;
    InteriorSearch is = find_interior(pb.lmis, shifted, lf.center, 0.0, tol);
    // below the rank cutoff phi reads +inf even though the shift is positive
    if (!is.theta || !std::isfinite(barrier_objective(pb, *is.theta, tol))) continue;
    finish(pb, *is.theta, false);
    solved = true;
    if (out.value.is_minus_inf()) return out;
  }
  if (!solved) {
    out.value = psi(prob, x, *dc.certificate);
    out.argmin_v = *dc.certificate;
  } else if (out.argmin_v) {
    ExtReal at = psi(prob, x, *out.argmin_v);
    if (at.is_finite() && at.value() <= out.value.value() + tol.conj_rel * (1.0 + std::abs(out.value.value())))
      out.value = at;
  }
  return out;
}

bool meets_KA(const ConvexSetSpec& s, const ProblemData& pd, const Tolerances& tol) {
  const int n = pd.n();
  if (pd.ker_dim() == 0) return true;
  if (is_psd_family(s, tol) || contains_zero(s, n, tol)) return true;
  if (auto x = std::get_if<set::Singleton>(&s)) return in_KA(pd, x->u, tol);
  if (auto x = std::get_if<set::SpectralBox>(&s)) return x->hi >= 0.0;
  if (auto x = std::get_if<set::Hull>(&s)) {
    for (const auto& u : x->vertices)
      if (in_KA(pd, u, tol)) return true;
    Lift lf = indicator_lift(s, n, tol);
    InteriorPoint ip = interior_point(lf, pd, tol);
    return ip.margin >= -kEmptyMargin;
  }
  return true;
}

SupportEval support_within_KA(const ConvexSetSpec& s, const ProblemData& pd, const SymMatrix& g,
                              const Tolerances& tol) {
  const int n = pd.n();
  if (g.dim() != n) throw std::invalid_argument("support_within_KA: G has wrong dimension");
  SupportEval none{ExtReal::minus_inf(), std::nullopt};
  if (pd.ker_dim() == 0 || is_psd_family(s, tol)) return support(s, g);
  if (auto x = std::get_if<set::Singleton>(&s)) return in_KA(pd, x->u, tol) ? support(s, g) : none;
  if (auto x = std::get_if<set::Ray>(&s)) {
    if (in_KA(pd, x->d, tol)) return support(s, g);
    return {ExtReal::finite(0.0), SymMatrix::zero(n)};
  }
  if (auto x = std::get_if<set::Hull>(&s)) {
    bool all = std::all_of(x->vertices.begin(), x->vertices.end(),
                           [&](const SymMatrix& u) { return in_KA(pd, u, tol); });
    if (all) return support(s, g);
  }
  if (auto x = std::get_if<set::SpectralBox>(&s)) {
    if (x->hi < 0.0) return none;
    if (pd.a_is_zero()) return support(set::SpectralBox{std::max(x->lo, 0.0), x->hi}, g);
  }
  // maximize <V(theta), G> over the lifted set with N^T V N > 0
  Lift lf = indicator_lift(s, n, tol);
  InteriorPoint ip = interior_point(lf, pd, tol);
  if (!ip.theta) {
    if (ip.margin < -kEmptyMargin) return none;
    throw UndecidedError("support over S n K_A: the intersection has empty interior");
  }
  BarrierProblem pb;
  pb.dim = lf.dim;
  pb.cost = Vector(lf.dim);
  for (int k = 0; k < lf.dim; ++k)
    pb.cost(k) = lf.v_map.coeff[k].size() ? -lf.v_map.coeff[k].cwiseProduct(g.mat()).sum() : 0.0;
  pb.lmis = lf.lmis;
  pb.lmis.push_back(*ka_lmi(lf, pd));
  BarrierOptions opt;
  opt.gap_tol = 1e-12;
  opt.unbounded_below = -kInf;
  BarrierResult r = barrier_minimize(pb, *ip.theta, opt, tol);
  SymMatrix v(lf.v_map.at(r.theta));
  return {ExtReal::finite(inner(v, g)), v};
}

bool xi_member(const InfProjProblem& prob, const RectMatrix& y) {
  const ProblemData& pd = prob.pd;
  const Tolerances& tol = prob.tol;
  if (y.rows() != pd.n() || y.cols() != pd.m()) throw std::invalid_argument("xi_member: Y has wrong shape");
  if ((pd.A() * y - pd.B()).norm() > tol.feas_abs * (1.0 + pd.B().norm())) return false;
  SymMatrix g = gram(y) * 0.5;
  if (auto l = std::get_if<hfun::Linear>(&prob.h)) return in_KA_polar(pd, g - l->u, tol);
  const ConvexSetSpec* sp = support_set(prob.h);
  if (!sp) throw UndecidedError("xi_member requires a linear or support h");
  const ConvexSetSpec& s = *sp;
  if (auto x = std::get_if<set::Singleton>(&s)) return in_KA_polar(pd, g - x->u, tol);
  if (pd.ker_dim() == 0) return member(s, g, tol);
  const double sl = tol.psd_abs * (1.0 + g.norm());
  if (pd.a_is_zero()) {
    // exists W in S with W >= G
    return std::visit(
        overloaded{
            [&](const set::Singleton&) { return false; },
            [&](const set::SpectralBox& x) { return max_eig(g) <= x.hi + sl; },
            [&](const set::TraceBall& x) { return g.trace() <= x.r + tol.feas_abs * (1.0 + g.norm()); },
            [&](const set::Fantope& x) {
              return max_eig(g) <= 1.0 + sl && g.trace() <= x.k + tol.feas_abs * (1.0 + g.norm());
            },
            [&](const set::ShiftedPSDCap& x) { return min_eig(x.u - g) >= -sl; },
            [&](const set::Ray& x) {
              if (g.norm() <= tol.feas_abs) return true;
              if (min_eig(x.d) < -tol.psd_abs * (1.0 + x.d.norm())) return false;
              return range_contains(x.d.mat(), g.mat(), tol);
            },
            [&](const set::Hull& x) {
              Lift lf = indicator_lift(s, pd.n(), tol);
              if (lf.dim == 0) return min_eig(x.vertices[0] - g) >= -sl;
              std::vector<AffineMap> lmis = lf.lmis;
              std::vector<bool> shifted(lmis.size(), false);
              AffineMap gap = lf.v_map;
              gap.base -= g.mat();
              lmis.push_back(gap);
              shifted.push_back(true);
              InteriorSearch is = find_interior(lmis, shifted, lf.center, 0.0, tol);
              return is.margin >= -kEmptyMargin * (1.0 + g.norm());
            },
        },
        s);
  }
  if (pd.b_is_zero()) {
    // here G lies in the order cone; sets that are downward closed inside S^n_+ decide exactly
    if (member(s, g, tol)) return true;
    bool downward = std::holds_alternative<set::TraceBall>(s) || std::holds_alternative<set::Fantope>(s) ||
                    std::holds_alternative<set::ShiftedPSDCap>(s) ||
                    (std::holds_alternative<set::SpectralBox>(s) && std::get<set::SpectralBox>(s).lo <= 0.0);
    if (downward) return false;
  }
  throw UndecidedError("xi_member: no exact test for this set with A != 0");
}

namespace {

Decision ccq_decision(const InfProjProblem& prob, std::optional<SymMatrix>* cert, std::string* why);

}  // namespace

ConjEval eval_p_conj(const InfProjProblem& prob, const RectMatrix& y, bool assume_ccq) {
  const ProblemData& pd = prob.pd;
  const Tolerances& tol = prob.tol;
  if (y.rows() != pd.n() || y.cols() != pd.m()) throw std::invalid_argument("eval_p_conj: Y has wrong shape");
  ConjEval out;
  if (auto s = indicator_set(prob.h)) {
    // needs only dom(phi + delta_S) nonempty, i.e. S n K_A nonempty
    if (!meets_KA(*s, pd, tol)) {
      out.value = ExtReal::minus_inf();
      return out;
    }
    if ((pd.A() * y - pd.B()).norm() > tol.feas_abs * (1.0 + pd.B().norm())) return out;
    SupportEval se = support_within_KA(*s, pd, gram(y), tol);
    out.value = se.value.is_finite() ? ExtReal::finite(0.5 * se.value.value()) : se.value;
    out.witness = se.witness;
    return out;
  }
  if (!assume_ccq && !ccq_trivial(prob)) {
    std::string why;
    if (ccq_decision(prob, nullptr, &why) != Decision::Holds)
      throw UndecidedError("eval_p_conj: CCQ not established (" + why + "); use a brute-force conjugate oracle");
  }
  bool in = xi_member(prob, y);
  out.value = in ? ExtReal::finite(0.0) : ExtReal::plus_inf();
  if (auto l = std::get_if<hfun::Linear>(&prob.h)) out.witness = l->u;
  return out;
}

namespace {

struct LinearParts {
  bool c1 = false, c2 = false;
  RectMatrix w0;  // d x m
  SymMatrix r;    // d x d
};

LinearParts linear_parts(const ProblemData& pd, const SymMatrix& u, const Tolerances& tol) {
  LinearParts lp;
  const Eigen::MatrixXd qr = eye(pd.n()) - pd.P().mat();
  const RectMatrix& y0 = pd.Y0();
  const RectMatrix& nb = pd.N();
  Eigen::MatrixXd quq = qr * u.mat() * qr;
  Eigen::MatrixXd half = 0.5 * y0 * y0.transpose();
  lp.c1 = (quq - half).norm() <= tol.feas_abs * (1.0 + u.norm());
  RectMatrix cross = 2.0 * qr * u.mat() * nb;  // n x d
  lp.c2 = nb.cols() == 0 || range_contains(y0, cross, tol);
  RectMatrix y0p = pinv(y0, tol);
  lp.w0 = (y0p * cross).transpose();
  lp.r = SymMatrix(nb.transpose() * u.mat() * nb - 0.5 * lp.w0 * lp.w0.transpose());
  return lp;
}

Decision ccq_decision(const InfProjProblem& prob, std::optional<SymMatrix>* cert, std::string* why) {
  const ProblemData& pd = prob.pd;
  const Tolerances& tol = prob.tol;
  const int n = pd.n(), d = pd.ker_dim();
  auto give = [&](Decision dec, std::optional<SymMatrix> c, std::string w) {
    if (cert) *cert = std::move(c);
    if (why) *why = std::move(w);
    return dec;
  };
  if (std::holds_alternative<hfun::Linear>(prob.h))
    return give(Decision::Holds, SymMatrix::identity(n), "dom h = S^n meets int K_A at I");
  if (auto s = support_set(prob.h)) {
    if (is_bounded(*s)) return give(Decision::Holds, SymMatrix::identity(n), "bounded S: dom h = S^n");
    const SymMatrix& dm = std::get<set::Ray>(*s).d;
    const Eigen::MatrixXd& p = pd.P().mat();
    bool polar_neg = (dm.mat() - p * dm.mat() * p).norm() <= tol.feas_abs * (1.0 + dm.norm()) &&
                     min_eig(dm) >= -tol.psd_abs * (1.0 + dm.norm());
    if (polar_neg) return give(Decision::Fails, std::nullopt, "D is PSD with range in ker A: <D, V> > 0 on int K_A");
    Lift lf = lift_h(prob);
    InteriorPoint ip = interior_point(lf, pd, tol);
    std::optional<SymMatrix> c;
    if (ip.theta) c = SymMatrix(lf.v_map.at(*ip.theta));
    return give(Decision::Holds, c, "halfspace {<D, V> <= 0} meets int K_A");
  }
  const ConvexSetSpec& s = *indicator_set(prob.h);
  if (d == 0) {
    Lift lf = indicator_lift(s, n, tol);
    return give(Decision::Holds, SymMatrix(lf.v_map.at(lf.center)), "ker A = {0}: int K_A = S^n");
  }
  const RectMatrix& nb = pd.N();
  auto kmin = [&](const SymMatrix& v) { return min_eig(ker_restriction(pd, v)); };
  return std::visit(
      overloaded{
          [&](const set::Singleton& x) {
            double m = kmin(x.u);
            return m >= tol.psd_abs ? give(Decision::Holds, x.u, "U in int K_A")
                                    : give(Decision::Fails, std::nullopt, "U not in int K_A");
          },
          [&](const set::SpectralBox& x) {
            return x.hi >= tol.psd_abs ? give(Decision::Holds, SymMatrix::identity(n) * x.hi, "hi I in int K_A")
                                       : give(Decision::Fails, std::nullopt, "N^T V N <= hi I with hi <= 0");
          },
          [&](const set::TraceBall& x) {
            double m = x.r / d;
            return m >= tol.psd_abs ? give(Decision::Holds, pd.P() * m, "(r/d) P in int K_A")
                                    : give(Decision::Fails, std::nullopt, "max of lambda_min(N^T V N) is r/d <= 0");
          },
          [&](const set::Fantope& x) {
            double c = std::min(1.0, double(x.k) / d);
            return give(Decision::Holds, pd.P() * c, "min(1, k/d) P in int K_A");
          },
          [&](const set::Ray& x) {
            if (x.d.norm() == 0.0) return give(Decision::Fails, std::nullopt, "S = {0}");
            double m = kmin(x.d);
            return m > tol.psd_abs * (1.0 + x.d.norm())
                       ? give(Decision::Holds, x.d * (1.0 / m), "N^T D N positive definite")
                       : give(Decision::Fails, std::nullopt, "N^T D N not positive definite");
          },
          [&](const set::ShiftedPSDCap& x) {
            double m = kmin(x.u);
            return m >= tol.psd_abs ? give(Decision::Holds, x.u, "U in int K_A")
                                    : give(Decision::Fails, std::nullopt, "lambda_min(N^T V N) <= lambda_min(N^T U N) <= 0");
          },
          [&](const set::Hull& x) {
            for (const auto& u : x.vertices)
              if (kmin(u) >= tol.psd_abs) return give(Decision::Holds, u, "a vertex lies in int K_A");
            Lift lf = indicator_lift(s, n, tol);
            InteriorPoint ip = interior_point(lf, pd, tol);
            if (ip.theta) return give(Decision::Holds, SymMatrix(lf.v_map.at(*ip.theta)), "interior search");
            (void)nb;
            return give(Decision::Fails, std::nullopt,
                        "max over the hull of lambda_min(N^T V N) is " + std::to_string(ip.margin));
          },
      },
      s);
}

void set_if_undecided(Decision& slot, Decision v) {
  if (slot == Decision::Undecided) slot = v;
}

// sigma over Xi(0, 0) for support h, via unitarily invariant closed forms
ExtReal support_xi_a0(const ConvexSetSpec& s, const RectMatrix& x, const Tolerances& tol) {
  Vector sig = sv(x);
  return std::visit(
      overloaded{
          [&](const set::Singleton&) -> ExtReal { throw std::logic_error("singleton handled as linear"); },
          [&](const set::SpectralBox& b) {
            if (b.hi < 0.0) return ExtReal::minus_inf();
            return ExtReal::finite(std::sqrt(2.0 * b.hi) * sig.sum());
          },
          [&](const set::TraceBall& b) { return ExtReal::finite(std::sqrt(2.0 * b.r) * x.norm()); },
          [&](const set::Fantope& f) {
            // s_i = min(sqrt 2, c sigma_i) with sum s_i^2 <= 2k
            const int p = static_cast<int>(sig.size());
            if (p <= f.k || sig.sum() == 0.0) return ExtReal::finite(std::sqrt(2.0) * sig.sum());
            auto used = [&](double c) {
              double t = 0.0;
              for (int i = 0; i < p; ++i) t += std::min(2.0, c * c * sig(i) * sig(i));
              return t;
            };
            double lo = 0.0, hi = 1.0;
            while (used(hi) < 2.0 * f.k) hi *= 2.0;
            for (int it = 0; it < 200; ++it) {
              double mid = 0.5 * (lo + hi);
              (used(mid) < 2.0 * f.k ? lo : hi) = mid;
            }
            double val = 0.0;
            for (int i = 0; i < p; ++i) val += sig(i) * std::min(std::sqrt(2.0), lo * sig(i));
            return ExtReal::finite(val);
          },
          [&](const set::ShiftedPSDCap& c) {
            SymMatrix l = psd_sqrt(c.u * 2.0);
            return ExtReal::finite(sv(l.mat() * x).sum());
          },
          [&](const set::Ray& r) {
            if (r.d.norm() == 0.0 || min_eig(r.d) < -tol.psd_abs * (1.0 + r.d.norm())) return ExtReal::finite(0.0);
            // Xi = {Y : rge Y in rge D}, a subspace
            Eigen::MatrixXd pr = r.d.mat() * pinv(r.d, tol).mat();
            return (pr * x).norm() <= tol.feas_abs * (1.0 + x.norm()) ? ExtReal::finite(0.0) : ExtReal::plus_inf();
          },
          [&](const set::Hull&) -> ExtReal { throw UndecidedError("dual value: no closed form for hull support"); },
      },
      s);
}

// Decreasing isotonic fit (unit weights), pool adjacent violators.
Vector isotonic_decreasing(const Vector& a) {
  std::vector<double> val;
  std::vector<int> cnt;
  for (int i = 0; i < a.size(); ++i) {
    val.push_back(a(i));
    cnt.push_back(1);
    while (val.size() > 1 && val[val.size() - 2] < val.back()) {
      double v = (val[val.size() - 2] * cnt[cnt.size() - 2] + val.back() * cnt.back()) /
                 (cnt[cnt.size() - 2] + cnt.back());
      int c = cnt[cnt.size() - 2] + cnt.back();
      val.pop_back();
      cnt.pop_back();
      val.back() = v;
      cnt.back() = c;
    }
  }
  Vector out(a.size());
  int k = 0;
  for (size_t b = 0; b < val.size(); ++b)
    for (int j = 0; j < cnt[b]; ++j) out(k++) = val[b];
  return out;
}

// sup_Y <X, Y> - (1/2) sigma_{S n S+}(Y Y^T) for A = B = 0
ExtReal indicator_dual_a0(const ConvexSetSpec& s, const RectMatrix& x, const Tolerances& tol) {
  Vector sig = sv(x);
  const ExtReal inf = ExtReal::plus_inf();
  bool xz = is_zero(x, tol);
  auto quad = [&](const SymMatrix& u) {
    if (!range_contains(u.mat(), x, tol)) return inf;
    return ExtReal::finite(0.5 * inner(x, pinv(u, tol).mat() * x));
  };
  return std::visit(
      overloaded{
          [&](const set::Singleton& u) {
            if (min_eig(u.u) < -tol.psd_abs * (1.0 + u.u.norm())) return inf;
            return quad(u.u);
          },
          [&](const set::SpectralBox& b) {
            if (b.hi < 0.0) return inf;
            if (b.hi == 0.0) return xz ? ExtReal::finite(0.0) : inf;
            return ExtReal::finite(x.squaredNorm() / (2.0 * b.hi));
          },
          [&](const set::TraceBall& b) {
            if (b.r == 0.0) return xz ? ExtReal::finite(0.0) : inf;
            return ExtReal::finite(sig.sum() * sig.sum() / (2.0 * b.r));
          },
          [&](const set::Fantope& f) {
            // Y shares singular vectors with X; the sorted profile s solves an isotonic fit of
            // (sigma_1, ..., sigma_{k-1}, sigma_k + ... + sigma_p)
            const int p = static_cast<int>(sig.size());
            const int k = f.k;
            Vector a = Vector::Zero(k);
            for (int i = 0; i < std::min(k - 1, p); ++i) a(i) = sig(i);
            for (int i = k - 1; i < p; ++i) a(k - 1) += sig(i);
            Vector s2 = isotonic_decreasing(a);
            return ExtReal::finite(a.dot(s2) - 0.5 * s2.squaredNorm());
          },
          [&](const set::ShiftedPSDCap& c) { return quad(c.u); },
          [&](const set::Ray& r) {
            if (r.d.norm() == 0.0 || min_eig(r.d) < -tol.psd_abs * (1.0 + r.d.norm()))
              return xz ? ExtReal::finite(0.0) : inf;
            return range_contains(r.d.mat(), x, tol) ? ExtReal::finite(0.0) : inf;
          },
          [&](const set::Hull&) -> ExtReal { throw UndecidedError("dual value: no closed form for hull indicator"); },
      },
      s);
}

ExtReal linear_dual(const ProblemData& pd, const SymMatrix& u, const RectMatrix& x, const Tolerances& tol) {
  LinearParts lp = linear_parts(pd, u, tol);
  if (!lp.c1 || !lp.c2) return ExtReal::minus_inf();
  const RectMatrix& nb = pd.N();
  double base = inner(x, pd.Y0() + nb * lp.w0);
  if (nb.cols() == 0) return ExtReal::finite(base);
  if (min_eig(lp.r) < -tol.psd_abs * (1.0 + lp.r.norm())) return ExtReal::minus_inf();
  const int m = pd.m();
  Eigen::MatrixXd pi = eye(m) - pinv(pd.Y0(), tol) * pd.Y0();
  SymMatrix lr = psd_sqrt(lp.r * 2.0);
  return ExtReal::finite(base + sv(lr.mat() * nb.transpose() * x * pi).sum());
}

}  // namespace

ExtReal dual_value(const InfProjProblem& prob, const RectMatrix& xbar) {
  const ProblemData& pd = prob.pd;
  if (xbar.rows() != pd.n() || xbar.cols() != pd.m()) throw std::invalid_argument("dual_value: X has wrong shape");
  if (auto l = std::get_if<hfun::Linear>(&prob.h)) return linear_dual(pd, l->u, xbar, prob.tol);
  if (auto s = support_set(prob.h)) {
    if (auto x = std::get_if<set::Singleton>(s)) return linear_dual(pd, x->u, xbar, prob.tol);
    if (pd.a_is_zero()) return support_xi_a0(*s, xbar, prob.tol);
    throw UndecidedError("dual value: support h with A != 0 has no exact routine");
  }
  const ConvexSetSpec& s = *indicator_set(prob.h);
  if (pd.a_is_zero()) return indicator_dual_a0(s, xbar, prob.tol);
  throw UndecidedError("dual value: indicator h with A != 0 has no exact routine");
}

CQReport cq_report(const InfProjProblem& prob) {
  const ProblemData& pd = prob.pd;
  const Tolerances& tol = prob.tol;
  const int n = pd.n(), d = pd.ker_dim();
  CQReport rep;
  auto note = [&](const char* key, const std::string& txt) { rep.diagnostics[key] = txt; };
  std::string why;
  rep.ccq = ccq_decision(prob, &rep.certificate, &why);
  note("ccq", why);

  auto phi0 = [&](const SymMatrix& dm) { return eval_gmf(pd, RectMatrix::Zero(n, pd.m()), dm, tol).value; };
  auto linear_case = [&](const SymMatrix& u) {
    LinearParts lp = linear_parts(pd, u, tol);
    bool xi = lp.c1 && lp.c2 && (d == 0 || min_eig(lp.r) >= -tol.psd_abs * (1.0 + lp.r.norm()));
    bool pcq = lp.c1 && lp.c2 && (d == 0 || min_eig(lp.r) >= tol.psd_abs);
    rep.pcq = pcq ? Decision::Holds : Decision::Fails;
    bool spcq = d == n && min_eig(u) >= tol.psd_abs;
    rep.spcq = spcq ? Decision::Holds : Decision::Fails;
    rep.bpcq = Decision::Fails;
    note("bpcq", "dom h n K_A contains K_A, which is unbounded");
    note("pcq", pcq ? "Xi(A,B) reduces to R > 0 on ker A" : "range conditions or R > 0 fail");
    note("spcq", spcq ? "U positive definite with A = 0" : "int(dom h* + K_A polar) is empty");
    rep.sccq = (rep.ccq == Decision::Holds && xi) ? Decision::Holds : Decision::Fails;
    note("sccq", xi ? "Xi(A,B) nonempty" : "Xi(A,B) empty");
  };

  if (auto l = std::get_if<hfun::Linear>(&prob.h)) {
    linear_case(l->u);
  } else if (auto sp = support_set(prob.h)) {
    const ConvexSetSpec& s = *sp;
    if (auto x = std::get_if<set::Singleton>(&s)) {
      linear_case(x->u);
    } else {
      if (is_bounded(s)) {
        rep.bpcq = Decision::Fails;
        note("bpcq", "bounded S: dom h = S^n");
      } else {
        const SymMatrix& dm = std::get<set::Ray>(s).d;
        bool b = d == n && min_eig(dm) >= tol.psd_abs;
        rep.bpcq = b ? Decision::Holds : Decision::Fails;
        note("bpcq", b ? "{V >= 0 : <D, V> <= 0} = {0}" : "the halfspace meets K_A in an unbounded set");
      }
      if (pd.a_is_zero()) {
        bool pos = std::visit(
            overloaded{
                [&](const set::Singleton&) { return false; },
                [&](const set::SpectralBox& x) { return x.hi >= tol.psd_abs; },
                [&](const set::TraceBall& x) { return x.r / n >= tol.psd_abs; },
                [&](const set::Fantope&) { return true; },
                [&](const set::ShiftedPSDCap& x) { return min_eig(x.u) >= tol.psd_abs; },
                [&](const set::Ray& x) { return min_eig(x.d) >= tol.psd_abs; },
                [&](const set::Hull& x) {
                  Lift lf = indicator_lift(s, n, tol);
                  if (lf.dim == 0) return min_eig(x.vertices[0]) >= tol.psd_abs;
                  std::vector<AffineMap> lmis = lf.lmis;
                  std::vector<bool> shifted(lmis.size(), false);
                  lmis.push_back(lf.v_map);
                  shifted.push_back(true);
                  return find_interior(lmis, shifted, lf.center, tol.psd_abs, tol).theta.has_value();
                },
            },
            s);
        rep.pcq = rep.spcq = pos ? Decision::Holds : Decision::Fails;
        note("pcq", pos ? "S meets the positive definite cone" : "S misses the positive definite cone");
        note("spcq", rep.diagnostics["pcq"]);
      } else {
        note("pcq", "no exact test for support h with A != 0");
        note("spcq", "no exact test for support h with A != 0");
      }
      // SCCQ = CCQ and Xi(A, B) nonempty
      if (rep.ccq == Decision::Fails) {
        rep.sccq = Decision::Fails;
        note("sccq", "CCQ fails");
      } else if (pd.a_is_zero()) {
        bool meet = meets_KA(s, pd, tol);
        rep.sccq = meet ? Decision::Holds : Decision::Fails;
        note("sccq", meet ? "0 in Xi since S meets S^n_+" : "Xi empty since S misses S^n_+");
      } else {
        try {
          bool in = xi_member(prob, pd.Y0());
          if (in) {
            rep.sccq = Decision::Holds;
            note("sccq", "A^+ B lies in Xi(A,B)");
          } else if (d == 0) {
            rep.sccq = Decision::Fails;
            note("sccq", "Xi(A,B) = {A^+ B} and the probe fails");
          } else {
            note("sccq", "probe A^+ B fails; no disproof");
          }
        } catch (const UndecidedError& e) {
          note("sccq", e.what());
        }
      }
    }
  } else {
    const ConvexSetSpec& s = *indicator_set(prob.h);
    if (is_bounded(s)) {
      bool meet = meets_KA(s, pd, tol);
      rep.bpcq = meet ? Decision::Holds : Decision::Fails;
      note("bpcq", meet ? "S bounded and meets K_A" : "S n K_A is empty");
      rep.pcq = rep.spcq = Decision::Holds;
      note("pcq", "bounded S: dom h* = S^n");
      note("spcq", "bounded S: dom h* = S^n");
      rep.sccq = rep.ccq;
      note("sccq", "bounded S: Xi(A,B) = {AY = B}, so SCCQ equals CCQ");
    } else {
      const SymMatrix& dm = std::get<set::Ray>(s).d;
      bool in = in_KA(pd, dm, tol);
      rep.bpcq = in ? Decision::Fails : Decision::Holds;
      note("bpcq", in ? "D in K_A: the whole ray lies in dom h n K_A" : "dom h n K_A = {0}");
      ExtReal f = phi0(dm);
      if (in) {
        bool pos = f.is_plus_inf() || (f.is_finite() && f.value() > tol.feas_abs);
        rep.pcq = rep.spcq = pos ? Decision::Holds : Decision::Fails;
        note("pcq", "sigma over Omega_2 at D is phi(0, D) = " + f.str());
        note("spcq", rep.diagnostics["pcq"]);
      }
      bool xi = !in || f.is_plus_inf() || (f.is_finite() && f.value() >= -tol.feas_abs);
      rep.sccq = (rep.ccq == Decision::Holds && xi) ? Decision::Holds : Decision::Fails;
      note("sccq", xi ? "Xi(A,B) nonempty" : "phi(0, D) < 0 empties Xi(A,B)");
    }
  }

  // implications fill only undecided slots
  if (rep.bpcq == Decision::Holds) set_if_undecided(rep.spcq, Decision::Holds);
  if (rep.spcq == Decision::Holds) set_if_undecided(rep.pcq, Decision::Holds);
  if (rep.pcq == Decision::Fails) set_if_undecided(rep.spcq, Decision::Fails);
  if (rep.spcq == Decision::Fails) set_if_undecided(rep.bpcq, Decision::Fails);
  if (rep.sccq == Decision::Holds) set_if_undecided(rep.ccq, Decision::Holds);
  if (rep.ccq == Decision::Fails) set_if_undecided(rep.sccq, Decision::Fails);

  std::string bad;
  if (rep.bpcq == Decision::Holds && rep.spcq == Decision::Fails) bad += "BPCQ holds but SPCQ fails; ";
  if (rep.spcq == Decision::Holds && rep.pcq == Decision::Fails) bad += "SPCQ holds but PCQ fails; ";
  if (rep.sccq == Decision::Holds && rep.ccq == Decision::Fails) bad += "SCCQ holds but CCQ fails; ";
  if (!bad.empty()) note("consistency", "inconsistent decisions: " + bad);
  return rep;
}

SubdiffWitness subdiff_p_witness(const InfProjProblem& prob, const RectMatrix& xbar) {
  CQReport rep = cq_report(prob);
  if (rep.pcq != Decision::Holds || rep.ccq != Decision::Holds)
    throw UndecidedError("subdiff_p_witness: PCQ and CCQ must hold (pcq " + to_string(rep.pcq) + ", ccq " +
                         to_string(rep.ccq) + ")");
  InfProjEval ev = eval_p(prob, xbar);
  if (!ev.value.is_finite() || !ev.argmin_v) throw NumericalError("witness rejected: p(X) is not finite");
  SymMatrix v = *ev.argmin_v;
  GmfEval g = eval_gmf(prob.pd, xbar, v, prob.tol);
  if (!g.value.is_finite()) throw NumericalError("witness rejected: phi infinite at the inner minimizer");
  SubdiffWitness w{*g.witness_y, v, gram(*g.witness_y) * -0.5, ev.value.value(), 0.0, 0.0};
  ConjEval c = eval_p_conj(prob, w.y, true);
  if (!c.value.is_finite()) throw NumericalError("witness rejected: p*(Y) is not finite");
  w.conj_value = c.value.value();
  w.fenchel_residual = w.p_value + w.conj_value - inner(xbar, w.y);
  if (std::abs(w.fenchel_residual) > prob.tol.conj_rel * (1.0 + std::abs(w.p_value)))
    throw NumericalError("witness rejected: Fenchel residual " + std::to_string(w.fenchel_residual));
  return w;
}

}  // namespace gmfkit
