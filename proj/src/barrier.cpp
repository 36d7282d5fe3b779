#include "gmfkit/barrier.hpp"

#include <cmath>
#include <limits>

namespace gmfkit {

Eigen::MatrixXd AffineMap::at(const Vector& theta) const {
  Eigen::MatrixXd g = base;
  for (int i = 0; i < dim(); ++i)
    if (coeff[i].size() && theta(i) != 0.0) g += theta(i) * coeff[i];
  return g;
}

AffineMap AffineMap::congruence(const Eigen::MatrixXd& m) const {
  AffineMap out(m.transpose() * base * m, dim());
  for (int i = 0; i < dim(); ++i)
    if (coeff[i].size()) out.coeff[i] = m.transpose() * coeff[i] * m;
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Tolerances solver_tol(const Tolerances& tol) {
  Tolerances t = tol;
  t.rank_rel = std::min(tol.rank_rel, 1e-14);
  return t;
}

struct Model {
  double f0 = kInf;       // objective without barrier
  double barrier = 0.0;   // sum of -logdet
  Vector g0, gb;
  Eigen::MatrixXd h0, hb;
};

// Returns false if theta is infeasible. With derivs = false only values are filled.
bool evaluate(const BarrierProblem& pb, const Vector& th, bool derivs, const Tolerances& tol, Model& out) {
  const int d = pb.dim;
  out.barrier = 0.0;
  if (derivs) {
    out.gb = Vector::Zero(d);
    out.hb = Eigen::MatrixXd::Zero(d, d);
    out.g0 = pb.cost;
    out.h0 = Eigen::MatrixXd::Zero(d, d);
  }
  for (const auto& lmi : pb.lmis) {
    Eigen::MatrixXd g = lmi.at(th);
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) return false;
    Eigen::MatrixXd l = llt.matrixL();
    double logdet = 0.0;
    for (int i = 0; i < l.rows(); ++i) {
      if (!(l(i, i) > 0.0)) return false;
      logdet += 2.0 * std::log(l(i, i));
    }
    out.barrier -= logdet;
    if (!derivs) continue;
    Eigen::MatrixXd ginv = llt.solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
    std::vector<int> idx;
    std::vector<Eigen::MatrixXd> bs;
    for (int i = 0; i < d; ++i)
      if (lmi.coeff[i].size()) {
        idx.push_back(i);
        bs.push_back(ginv * lmi.coeff[i]);
      }
    for (size_t a = 0; a < idx.size(); ++a) {
      out.gb(idx[a]) -= bs[a].trace();
      for (size_t b = a; b < idx.size(); ++b) {
        double v = bs[a].cwiseProduct(bs[b].transpose()).sum();
        out.hb(idx[a], idx[b]) += v;
        if (a != b) out.hb(idx[b], idx[a]) += v;
      }
    }
  }
  out.f0 = pb.cost.size() ? pb.cost.dot(th) : 0.0;
  if (pb.pd) {
    SymMatrix v(pb.v_map.at(th));
    RectMatrix x = pb.x_map.at(th);
    GmfCurvature c = eval_gmf_curvature(*pb.pd, x, v, solver_tol(tol));
    if (!c.value.is_finite()) return false;
    out.f0 += c.value.value();
    if (derivs) {
      const RectMatrix& y = c.y;
      Eigen::MatrixXd yyt = y * y.transpose();
      std::vector<int> idx;
      std::vector<RectMatrix> es, qes;
      for (int i = 0; i < d; ++i) {
        bool hx = pb.x_map.coeff[i].size() > 0, hv = pb.v_map.coeff[i].size() > 0;
        if (!hx && !hv) continue;
        RectMatrix e = RectMatrix::Zero(y.rows(), y.cols());
        if (hx) {
          e += pb.x_map.coeff[i];
          out.g0(i) += inner(y, pb.x_map.coeff[i]);
        }
        if (hv) {
          e -= pb.v_map.coeff[i] * y;
          out.g0(i) -= 0.5 * yyt.cwiseProduct(pb.v_map.coeff[i]).sum();
        }
        idx.push_back(i);
        qes.push_back(c.q * e);
        es.push_back(std::move(e));
      }
      for (size_t a = 0; a < idx.size(); ++a)
        for (size_t b = a; b < idx.size(); ++b) {
          double v2 = inner(es[a], qes[b]);
          out.h0(idx[a], idx[b]) += v2;
          if (a != b) out.h0(idx[b], idx[a]) += v2;
        }
    }
  }
  return std::isfinite(out.f0) && std::isfinite(out.barrier);
}

Vector newton_direction(const Eigen::MatrixXd& h, const Vector& g) {
  const int d = static_cast<int>(g.size());
  double scale = std::max(1e-300, h.diagonal().cwiseAbs().maxCoeff());
  double reg = 0.0;
  for (int attempt = 0; attempt < 30; ++attempt) {
    Eigen::MatrixXd hr = h;
    if (reg > 0) hr.diagonal().array() += reg;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hr);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      Vector dir = -ldlt.solve(g);
      if (dir.allFinite() && g.dot(dir) < 0) return dir;
    }
    reg = reg == 0.0 ? 1e-14 * scale : reg * 100.0;
    (void)d;
  }
  return -g;
}

}  // namespace

double barrier_objective(const BarrierProblem& pb, const Vector& theta, const Tolerances& tol) {
  Model m;
  if (!evaluate(pb, theta, false, tol, m)) return kInf;
  return m.f0;
}

bool strictly_feasible(const BarrierProblem& pb, const Vector& theta) {
  for (const auto& lmi : pb.lmis) {
    Eigen::LLT<Eigen::MatrixXd> llt(lmi.at(theta));
    if (llt.info() != Eigen::Success) return false;
    Eigen::MatrixXd l = llt.matrixL();
    for (int i = 0; i < l.rows(); ++i)
      if (!(l(i, i) > 0.0)) return false;
  }
  return true;
}

BarrierResult barrier_minimize(const BarrierProblem& pb, const Vector& theta0, const BarrierOptions& opt,
                               const Tolerances& tol) {
  BarrierResult res;
  res.theta = theta0;
  Model cur;
  if (!evaluate(pb, res.theta, true, tol, cur))
    throw std::invalid_argument("barrier_minimize: starting point is not strictly feasible");
  double nu = 0.0;
  for (const auto& l : pb.lmis) nu += static_cast<double>(l.base.rows());
  double mu = nu > 0 ? (1.0 + std::abs(cur.f0)) / nu : 0.0;
  res.objective = cur.f0;

  while (true) {
    // centering for the current mu
    bool stage_done = false;
    int stage_iters = 0;
    while (!stage_done && stage_iters++ < opt.max_centering) {
      if (res.iterations >= opt.max_newton) {
        res.status = BarrierResult::Status::IterCap;
        return res;
      }
      Vector g = cur.g0 + mu * cur.gb;
      Eigen::MatrixXd h = cur.h0 + mu * cur.hb;
      Vector dir = newton_direction(h, g);
      double slope = g.dot(dir);
      double fmu = cur.f0 + mu * cur.barrier;
      if (-slope * 0.5 <= opt.centering_tol * (1.0 + std::abs(fmu))) break;
      double t = 1.0;
      Model trial;
      bool accepted = false;
      for (int bt = 0; bt < 80; ++bt, t *= 0.5) {
        Vector th = res.theta + t * dir;
        if (!evaluate(pb, th, false, tol, trial)) continue;
        double ftrial = trial.f0 + mu * trial.barrier;
        if (ftrial <= fmu + 1e-4 * t * slope) {
          res.theta = th;
          accepted = true;
          // progress at rounding level: treat the stage as centered
          if (fmu - ftrial <= 1e-14 * (1.0 + std::abs(fmu))) stage_done = true;
          break;
        }
      }
      ++res.iterations;
      if (!accepted) {
        stage_done = true;
        if (mu == 0.0 || mu * nu <= opt.gap_tol * (1.0 + std::abs(cur.f0))) {
          res.status = BarrierResult::Status::Stalled;
          return res;
        }
        break;
      }
      evaluate(pb, res.theta, true, tol, cur);
      res.objective = cur.f0;
      if (cur.f0 < opt.unbounded_below) {
        res.status = BarrierResult::Status::Unbounded;
        return res;
      }
    }
    if (nu == 0.0 || mu * nu <= opt.gap_tol * (1.0 + std::abs(cur.f0))) break;
    mu *= opt.mu_factor;
  }
  // polish on the bare objective with full Newton steps only; a damped step means the
  // minimizer sits on the boundary and the barrier answer is kept
  for (int it = 0; it < opt.polish_steps; ++it) {
    Vector dir = newton_direction(cur.h0, cur.g0);
    double slope = cur.g0.dot(dir);
    if (-slope <= 1e-16 * (1.0 + std::abs(cur.f0))) break;
    Model trial;
    Vector th = res.theta + dir;
    if (!evaluate(pb, th, false, tol, trial) || !(trial.f0 <= cur.f0)) break;
    res.theta = th;
    evaluate(pb, res.theta, true, tol, cur);
    res.objective = cur.f0;
  }
  res.status = BarrierResult::Status::Converged;
  return res;
}

InteriorSearch find_interior(const std::vector<AffineMap>& lmis, const std::vector<bool>& shifted,
                             const Vector& theta0, double threshold, const Tolerances& tol) {
  const int d = static_cast<int>(theta0.size());
  const int dim = d + 1;  // last coordinate is the margin s
  BarrierProblem pb;
  pb.dim = dim;
  pb.cost = Vector::Zero(dim);
  pb.cost(d) = -1.0;

  double s0 = kInf, cap = 1.0;
  for (size_t j = 0; j < lmis.size(); ++j) {
    SymMatrix g(lmis[j].at(theta0));
    cap = std::max(cap, 2.0 * (1.0 + g.norm()));
    if (shifted[j]) s0 = std::min(s0, min_eig(g));
  }
  if (!std::isfinite(s0)) s0 = 0.0;
  s0 -= 1.0;

  for (size_t j = 0; j < lmis.size(); ++j) {
    AffineMap a(lmis[j].base, dim);
    for (int i = 0; i < d; ++i) a.coeff[i] = lmis[j].coeff[i];
    if (shifted[j]) a.coeff[d] = -Eigen::MatrixXd::Identity(a.base.rows(), a.base.cols());
    pb.lmis.push_back(std::move(a));
  }
  // s < cap and |theta_i - theta0_i| < radius
  const double radius = 1e3 * (1.0 + theta0.cwiseAbs().maxCoeff());
  AffineMap capm(Eigen::MatrixXd::Constant(1, 1, cap), dim);
  capm.coeff[d] = -Eigen::MatrixXd::Ones(1, 1);
  pb.lmis.push_back(capm);
  if (d > 0) {
    AffineMap box(Eigen::MatrixXd::Zero(2 * d, 2 * d), dim);
    for (int i = 0; i < d; ++i) {
      box.base(2 * i, 2 * i) = radius - theta0(i);
      box.base(2 * i + 1, 2 * i + 1) = radius + theta0(i);
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * d, 2 * d);
      c(2 * i, 2 * i) = 1.0;
      c(2 * i + 1, 2 * i + 1) = -1.0;
      box.coeff[i] = c;
    }
    pb.lmis.push_back(box);
  }

  Vector start(dim);
  start.head(d) = theta0;
  start(d) = s0;
  BarrierOptions opt;
  opt.gap_tol = 1e-9;
  opt.polish_steps = 0;
  opt.unbounded_below = -kInf;
  BarrierResult r = barrier_minimize(pb, start, opt, tol);
  InteriorSearch out;
  out.margin = r.theta(d);
  if (out.margin > threshold) out.theta = Vector(r.theta.head(d));
  return out;
}

}  // namespace gmfkit
