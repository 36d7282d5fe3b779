#include "gmfkit/smooth.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace gmfkit {

LeastSquares LeastSquares::mask(int n, int m, const std::vector<std::pair<int, int>>& observed, const Vector& values) {
  if (static_cast<int>(observed.size()) != values.size())
    throw std::invalid_argument("LeastSquares::mask: one value per observed entry");
  LeastSquares ls;
  ls.n = n;
  ls.m = m;
  ls.op = Eigen::MatrixXd::Zero(static_cast<int>(observed.size()), n * m);
  for (size_t r = 0; r < observed.size(); ++r) {
    auto [i, j] = observed[r];
    if (i < 0 || i >= n || j < 0 || j >= m) throw std::invalid_argument("LeastSquares::mask: entry out of range");
    ls.op(static_cast<int>(r), j * n + i) = 1.0;
  }
  ls.target = values;
  return ls;
}

LeastSquares LeastSquares::empty(int n, int m) {
  LeastSquares ls;
  ls.n = n;
  ls.m = m;
  ls.op = Eigen::MatrixXd::Zero(0, n * m);
  ls.target = Vector::Zero(0);
  return ls;
}

void LeastSquares::validate() const {
  if (op.cols() != n * m) throw std::invalid_argument("LeastSquares: map has " + std::to_string(op.cols()) +
                                                      " columns, expected " + std::to_string(n * m));
  if (op.rows() != target.size()) throw std::invalid_argument("LeastSquares: map rows and target length differ");
  if (!op.allFinite() || !target.allFinite()) throw std::invalid_argument("LeastSquares: non-finite entry");
}

namespace {

Vector vec(const RectMatrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); }

RectMatrix unvec(const Vector& v, int n, int m) { return Eigen::Map<const RectMatrix>(v.data(), n, m); }

void check_x(const FitSpec& fit, const RectMatrix& x) {
  if (x.rows() != fit.n || x.cols() != fit.m) throw std::invalid_argument("fit: X has wrong shape");
}

// F restricted to A = 0: f + tr(X^T V^{-1} X)/2 + <U, V>; +inf unless V > 0
double smooth_objective(const FitSpec& fit, const SymMatrix& u, const RectMatrix& x, const SymMatrix& v) {
  Eigen::LLT<Eigen::MatrixXd> llt(v.mat());
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  return fit.value(x) + 0.5 * inner(x, llt.solve(x)) + inner(u, v);
}

// stationarity slack accepted when the barrier weight has reached its floor
constexpr double kStallFactor = 1e3;

// Largest step in [0, 1] keeping V + a dV positive definite, scaled by `fraction`.
double boundary_step(const SymMatrix& v, const SymMatrix& dv, double fraction) {
  Eigen::LLT<Eigen::MatrixXd> llt(v.mat());
  Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd t = l.triangularView<Eigen::Lower>().solve(dv.mat());
  t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  double worst = -min_eig(SymMatrix(t));  // V + a dV > 0 iff 1 - a * worst > 0
  if (worst <= 0.0) return 1.0;
  return std::min(1.0, fraction / worst);
}

}  // namespace

double LeastSquares::value(const RectMatrix& x) const {
  check_x(*this, x);
  if (op.rows() == 0) return 0.0;
  return 0.5 * (op * vec(x) - target).squaredNorm();
}

RectMatrix LeastSquares::gradient(const RectMatrix& x) const {
  check_x(*this, x);
  if (op.rows() == 0) return RectMatrix::Zero(n, m);
  return unvec(op.transpose() * (op * vec(x) - target), n, m);
}

std::string to_string(SolveTrace::Status s) {
  switch (s) {
    case SolveTrace::Status::Converged: return "Converged";
    case SolveTrace::Status::IterCap: return "IterCap";
    default: return "Diverged";
  }
}

SolveTrace solve_smooth(const FitSpec& fit, const ProblemData& pd, const SymMatrix& ubar, const RectMatrix& x0,
                        const SymMatrix& v0, const Tolerances& tol, const SmoothOptions& opt) {
  fit.validate();
  const int n = fit.n, m = fit.m;
  if (pd.n() != n || pd.m() != m) throw std::invalid_argument("solve_smooth: problem data dimensions differ from the fit");
  if (!pd.a_is_zero()) throw std::invalid_argument("solve_smooth: requires A = 0");
  if (ubar.dim() != n || min_eig(ubar) < tol.psd_abs) throw std::invalid_argument("solve_smooth: Ubar must be positive definite");
  if (v0.dim() != n || min_eig(v0) <= 0.0) throw std::invalid_argument("solve_smooth: v0 must be positive definite");
  check_x(fit, x0);

  SolveTrace tr;
  RectMatrix x = x0;
  SymMatrix v = v0;
  const int nx = n * m, nv = svec_dim(n), dim = nx + nv;
  std::vector<SymMatrix> basis;
  for (int k = 0; k < nv; ++k) basis.push_back(svec_basis(n, k));
  const Eigen::MatrixXd hf = fit.op.transpose() * fit.op;
  double fval = smooth_objective(fit, ubar, x, v);
  // log-det barrier weight; Newton steps on F - mu logdet V, every accepted step also decreasing F
  double mu = 1e-2 * (1.0 + std::abs(fval)) / n;
  int stalls = 0;

  for (int it = 0; it < opt.max_iter; ++it) {
    Eigen::LLT<Eigen::MatrixXd> llt(v.mat());
    RectMatrix y = llt.solve(x);  // V^{-1} X
    Eigen::MatrixXd vinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    RectMatrix gx = fit.gradient(x) + y;
    Eigen::MatrixXd gv = ubar.mat() - 0.5 * y * y.transpose();
    // stationarity of F in the local metric of V (both blocks scaled by V^{1/2}), which stays
    // meaningful when V tends to a singular limit
    SymMatrix vh = psd_sqrt(v);
    double gn = (vh.mat() * gx).norm() + (vh.mat() * gv * vh.mat()).norm();
    if (gn <= opt.tol_grad * (1.0 + std::abs(fval))) {
      tr.status = SolveTrace::Status::Converged;
      break;
    }
    // gradient and Hessian of the barrier-augmented objective in (vec X, svec V)
    Vector g(dim);
    g.head(nx) = vec(gx);
    Eigen::MatrixXd gvb = gv - mu * vinv;
    for (int k = 0; k < nv; ++k) g(nx + k) = gvb.cwiseProduct(basis[k].mat()).sum();
    // phi'' is <E, V^{-1} E> with E = dX - dV Y
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(nx, dim);
    jac.leftCols(nx).setIdentity();
    for (int k = 0; k < nv; ++k) jac.col(nx + k) = -vec(basis[k].mat() * y);
    Eigen::MatrixXd qj(nx, dim);
    for (int j = 0; j < m; ++j) qj.middleRows(j * n, n) = vinv * jac.middleRows(j * n, n);
    Eigen::MatrixXd h = jac.transpose() * qj;
    h.topLeftCorner(nx, nx) += hf;
    std::vector<Eigen::MatrixXd> vb;
    for (int k = 0; k < nv; ++k) vb.push_back(vinv * basis[k].mat());
    for (int a = 0; a < nv; ++a)
      for (int b = a; b < nv; ++b) {
        double val = mu * vb[a].cwiseProduct(vb[b].transpose()).sum();
        h(nx + a, nx + b) += val;
        if (a != b) h(nx + b, nx + a) += val;
      }
    Vector d;
    double reg = 0.0, scale = std::max(1e-300, h.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::MatrixXd hr = h;
      hr.diagonal().array() += reg;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hr);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        d = -ldlt.solve(g);
        if (d.allFinite() && g.dot(d) < 0) break;
      }
      d.resize(0);
      reg = reg == 0.0 ? 1e-14 * scale : reg * 100.0;
    }
    if (d.size() == 0) d = -g;
    const double slope = g.dot(d);
    const double fmu = fval - mu * std::log(llt.matrixL().toDenseMatrix().diagonal().array().square().prod());
    const double dnorm = d.norm(), pnorm = 1.0 + x.norm() + v.norm();
    // centered for this mu (short Newton step, or no admissible step last time): shrink it
    if (dnorm <= 1e-9 * pnorm || -0.5 * slope <= 1e-15 * (1.0 + std::abs(fmu)) || stalls > 0) {
      stalls = 0;
      // at a center the scaled V gradient is mu I, so mu below tol_grad / n meets the stop rule;
      // smaller weights only push V toward singularity
      const double floor = 0.1 * opt.tol_grad * (1.0 + std::abs(fval)) / n;
      if (mu <= floor) {
        tr.status = gn <= kStallFactor * opt.tol_grad * (1.0 + std::abs(fval)) ? SolveTrace::Status::Converged
                                                                               : SolveTrace::Status::Diverged;
        break;
      }
      mu = std::max(0.1 * mu, floor);
      --it;
      continue;
    }
    RectMatrix dx = unvec(d.head(nx), n, m);
    Eigen::MatrixXd dvm = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < nv; ++k) dvm += d(nx + k) * basis[k].mat();
    SymMatrix dv(dvm);
    double step = boundary_step(v, dv, opt.boundary_fraction);
    bool accepted = false;
    double fn = fval;
    RectMatrix xn;
    SymMatrix vn;
    for (int bt = 0; bt < 60 && step * dnorm > 1e-15 * pnorm; ++bt, step *= 0.5) {
      xn = x + step * dx;
      vn = v + dv * step;
      Eigen::LLT<Eigen::MatrixXd> lt(vn.mat());
      if (lt.info() != Eigen::Success) continue;
      fn = smooth_objective(fit, ubar, xn, vn);
      Eigen::VectorXd ld = lt.matrixL().toDenseMatrix().diagonal();
      double fnmu = fn - 2.0 * mu * ld.array().log().sum();
      if (std::isfinite(fnmu) && fnmu <= fmu + 1e-4 * step * slope && fn <= fval) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // no admissible decrease for this mu
      ++stalls;
      continue;
    }
    x = xn;
    v = vn;
    fval = fn;
    double me = min_eig(v);
    tr.iterates.push_back({fn, gn, me});
    if (!(me > 0.0)) {
      tr.status = SolveTrace::Status::Diverged;
      break;
    }
  }
  tr.final_x = x;
  tr.final_v = v;
  return tr;
}

RectMatrix solve_prox_reference(const FitSpec& fit, const SymMatrix& l, double lambda, const RectMatrix& x0,
                                double tol, int max_iter) {
  fit.validate();
  check_x(fit, x0);
  if (l.dim() != fit.n || (l.mat() - Eigen::MatrixXd::Identity(fit.n, fit.n)).norm() > 1e-12)
    throw std::invalid_argument("reference supports identity weight only");
  if (lambda < 0.0) throw std::invalid_argument("solve_prox_reference: lambda must be nonnegative");
  double lip = fit.op.rows() ? Eigen::JacobiSVD<Eigen::MatrixXd>(fit.op).singularValues()(0) : 0.0;
  lip = lip * lip;
  if (lip == 0.0) return RectMatrix::Zero(fit.n, fit.m);  // f = 0: the minimizer of lambda |X|_* is 0
  const double step = 1.0 / lip;
  auto prox = [&](const RectMatrix& z) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector s = (svd.singularValues().array() - lambda * step).cwiseMax(0.0);
    return RectMatrix(svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose());
  };
  auto total = [&](const RectMatrix& z) { return fit.value(z) + lambda * sv(z).sum(); };
  RectMatrix x = x0, y = x0;
  double t = 1.0, fx = total(x);
  bool restarted = false;
  for (int it = 0; it < max_iter; ++it) {
    RectMatrix xn = prox(y - step * fit.gradient(y));
    double fn = total(xn);
    double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double change = (xn - x).norm();
    if (fn > fx) {
      // a plain prox-gradient step from x cannot increase the objective, so x is a fixed point to rounding
      if (restarted) break;
      // adaptive restart
      y = x;
      t = 1.0;
      restarted = true;
      continue;
    }
    restarted = false;
    y = xn + ((t - 1.0) / tn) * (xn - x);
    x = xn;
    fx = fn;
    t = tn;
    if (change <= tol * (1.0 + x.norm())) break;
  }
  return x;
}

ObjectiveCertificate objective_certificate(const FitSpec& fit, const SymMatrix& ubar, const RectMatrix& x,
                                           const SymMatrix& v, const Tolerances& tol) {
  fit.validate();
  if (min_eig(v) <= 0.0) throw std::invalid_argument("objective_certificate: V must be positive definite");
  ObjectiveCertificate c;
  c.f_value = smooth_objective(fit, ubar, x, v);
  InfProjProblem prob(ProblemData::zero(fit.n, fit.m, tol), hfun::Linear{ubar}, tol);
  c.p_value = eval_p(prob, x).value;
  c.gap = c.p_value.is_finite() ? c.f_value - fit.value(x) - c.p_value.value()
                                : (c.p_value.is_minus_inf() ? std::numeric_limits<double>::infinity()
                                                            : -std::numeric_limits<double>::infinity());
  return c;
}

void write_trace_csv(const SolveTrace& trace, std::ostream& os) {
  os << "iter,F,grad_norm,min_eig_V\n";
  char buf[128];
  for (size_t i = 0; i < trace.iterates.size(); ++i) {
    const auto& r = trace.iterates[i];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i, r.objective, r.grad_norm, r.min_eig_v);
    os << buf;
  }
}

}  // namespace gmfkit
