#include "criteria.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "gmfkit/infproj.hpp"
#include "gmfkit/smooth.hpp"
#include "gmfkit/vgf.hpp"
#include "oracles.hpp"

namespace gmfkit::acceptance {
namespace {

using namespace gmfkit::oracle;

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel(double got, double want) { return std::abs(got - want) / (1.0 + std::abs(want)); }

// NaN-safe running maximum: a NaN error poisons the result to +inf
void worsen(double& worst, double err) { worst = std::isnan(err) ? kInf : std::max(worst, err); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

SymMatrix scalar(double v) { return SymMatrix(Eigen::MatrixXd::Constant(1, 1, v)); }

CriterionResult gmf_vs_oracle(const Config& cfg) {
  CriterionResult r{1, "GMF closed form vs oracles (200 instances)"};
  r.tolerance = 1e-8;
  Rng rng(cfg.seed + 1);
  const Tolerances& tol = cfg.tol;
  double worst = 0.0;
  int deficient = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 200; ++i) {
    const int n = uniform_int(rng, 1, 6), m = uniform_int(rng, 1, 6), l = uniform_int(rng, 1, 3);
    ProblemData pd = random_problem(rng, n, m, l, cfg.tol);
    if (rank(pd.A(), tol) < std::min(n, l)) ++deficient;
    SymMatrix v = random_interior(rng, pd);
    RectMatrix x = gaussian(rng, n, m);
    GmfEval e = eval_gmf(pd, x, v, tol);
    if (!e.value.is_finite()) {
      worst = kInf;
      continue;
    }
    const double val = e.value.value();
    worsen(worst, rel(val, eval_gmf_oracle(pd, x, v, tol).value.to_double()));
    worsen(worst, rel(val, gmf_value_kkt(pd.A(), pd.B(), x, v.mat())));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.measured = worst;
  r.pass = worst <= r.tolerance && secs < 10.0;
  r.detail = std::to_string(deficient) + " rank-deficient A; runtime limit 10 s";
  return r;
}

CriterionResult scalar_gmf(const Config& cfg) {
  CriterionResult r{2, "scalar GMF values, exact"};
  const ProblemData pd = ProblemData::zero(1, 1, cfg.tol);
  const Tolerances& tol = cfg.tol;
  struct Case {
    double x, v;
    ExtReal want;
  };
  const Case cases[] = {{1, 2, ExtReal::finite(0.25)},
                        {1, 0, ExtReal::plus_inf()},
                        {0, 0, ExtReal::finite(0.0)},
                        {1, -1, ExtReal::plus_inf()}};
  int bad = 0;
  std::ostringstream os;
  for (const Case& c : cases) {
    ExtReal got = eval_gmf(pd, RectMatrix::Constant(1, 1, c.x), scalar(c.v), tol).value;
    os << "phi(" << c.x << "," << c.v << ")=" << got.str() << " ";
    if (!(got == c.want)) ++bad;
  }
  r.measured = bad;
  r.pass = bad == 0;
  r.detail = os.str();
  return r;
}

CriterionResult improper_p(const Config& cfg) {
  CriterionResult r{3, "improper p: h(v) = -v, A = B = 0"};
  InfProjProblem prob(ProblemData::zero(1, 1, cfg.tol), hfun::Linear{scalar(-1.0)}, cfg.tol);
  int bad = 0;
  std::ostringstream os;
  for (double xv : {-2.0, 0.0, 3.0}) {
    RectMatrix x = RectMatrix::Constant(1, 1, xv);
    InfProjEval e = eval_p(prob, x);
    if (!e.value.is_minus_inf() || !e.unbounded_certificate || !e.unbounded_origin) {
      ++bad;
      os << "x=" << xv << " value " << e.value.str() << "; ";
      continue;
    }
    if (!certify_unbounded_ray(prob, x, *e.unbounded_origin, *e.unbounded_certificate)) ++bad;
    // recheck the ray with the QR oracle: phi + h must fall without bound
    const RectMatrix zero_a = RectMatrix::Zero(1, 1);
    double prev = kInf;
    bool falling = true;
    for (double t = 1.0; t <= 1e6; t *= 10.0) {
      SymMatrix vt = *e.unbounded_origin + *e.unbounded_certificate * t;
      if (min_eig(vt) <= 0.0) {
        falling = false;
        break;
      }
      double val = gmf_value_kkt(zero_a, zero_a, x, vt.mat()) - vt.trace();
      falling = falling && val < prev;
      prev = val;
    }
    if (!falling || prev > -1e3) ++bad;
  }
  CQReport rep = cq_report(prob);
  os << "BPCQ " << to_string(rep.bpcq);
  if (rep.bpcq != Decision::Fails) ++bad;
  r.measured = bad;
  r.pass = bad == 0;
  r.detail = os.str();
  return r;
}

CriterionResult domain_examples(const Config& cfg) {
  CriterionResult r{4, "domain examples and CQ report"};
  int bad = 0;
  std::ostringstream os;
  {
    // dom p = [0,1] e1 + span{(1,1)}
    RectMatrix a(2, 2), b(2, 1), vb(2, 2);
    a << 1, 1, 1, 1;
    b << 1, 1;
    vb << 2, 1, 1, 0;
    InfProjProblem prob(ProblemData(a, b, cfg.tol), hfun::Indicator{set::Hull{{SymMatrix::zero(2), SymMatrix(vb)}}},
                        cfg.tol);
    const std::pair<std::array<double, 2>, bool> pts[] = {{{0.5, 0.0}, true},   {{1.5, 0.0}, false},
                                                          {{2.5, 2.0}, true},   {{-1.7, -2.0}, true},
                                                          {{3.0, 1.0}, false},  {{-0.5, 0.0}, false}};
    for (const auto& [pt, want] : pts) {
      RectMatrix x(2, 1);
      x << pt[0], pt[1];
      if (dom_p_member(prob, x) != want) {
        ++bad;
        os << "(" << pt[0] << "," << pt[1] << ") wrong; ";
      }
    }
  }
  {
    // dom h n K_A = Hull{0, e1 e1^T}: dom p = span{e1}
    RectMatrix a(2, 2), b(2, 1), d(2, 2);
    a << 1, 0, 0, 0;
    b << 1, 0;
    d << 1, 0, 0, 0;
    InfProjProblem prob(ProblemData(a, b, cfg.tol), hfun::Indicator{set::Hull{{SymMatrix::zero(2), SymMatrix(d)}}},
                        cfg.tol);
    CQReport rep = cq_report(prob);
    os << "CCQ " << to_string(rep.ccq) << " BPCQ " << to_string(rep.bpcq) << " SPCQ " << to_string(rep.spcq)
       << " PCQ " << to_string(rep.pcq);
    if (rep.ccq != Decision::Fails || rep.bpcq != Decision::Holds || rep.spcq != Decision::Holds ||
        rep.pcq != Decision::Holds)
      ++bad;
    const std::pair<std::array<double, 2>, bool> pts[] = {
        {{1.0, 0.0}, true}, {{-2.5, 0.0}, true}, {{0.0, 0.0}, true}, {{0.0, 1.0}, false}, {{1.0, 1.0}, false}};
    for (const auto& [pt, want] : pts) {
      RectMatrix x(2, 1);
      x << pt[0], pt[1];
      if (dom_p_member(prob, x) != want) {
        ++bad;
        os << "; (" << pt[0] << "," << pt[1] << ") wrong";
      }
    }
  }
  r.measured = bad;
  r.pass = bad == 0;
  r.detail = os.str();
  return r;
}

// Shared by the nuclear-norm and duality criteria.
struct NormInstance {
  RectMatrix x;
  std::vector<SymMatrix> weights;  // L
};

std::vector<NormInstance> norm_instances(const Config& cfg) {
  Rng rng(cfg.seed + 5);
  std::vector<NormInstance> out;
  for (int i = 0; i < 50; ++i) {
    const int n = uniform_int(rng, 1, 6), m = uniform_int(rng, 1, 5);
    NormInstance inst{gaussian(rng, n, m), {SymMatrix::identity(n)}};
    inst.weights.push_back(random_spd(rng, n));
    inst.weights.push_back(random_spd(rng, n));
    out.push_back(std::move(inst));
  }
  return out;
}

InfProjProblem weighted_nuclear(const NormInstance& inst, const SymMatrix& l, const Tolerances& tol) {
  const int n = static_cast<int>(inst.x.rows()), m = static_cast<int>(inst.x.cols());
  return InfProjProblem(ProblemData::zero(n, m, tol), hfun::Linear{SymMatrix(0.5 * l.mat() * l.mat().transpose())},
                        tol);
}

CriterionResult nuclear_norm(const Config& cfg) {
  CriterionResult r{5, "linear h gives weighted nuclear norm"};
  r.tolerance = 1e-6;
  double worst = 0.0;
  for (const NormInstance& inst : norm_instances(cfg)) {
    const double scale = 1.0 + Eigen::JacobiSVD<Eigen::MatrixXd>(inst.x).singularValues().sum();
    for (const SymMatrix& l : inst.weights) {
      ExtReal p = eval_p(weighted_nuclear(inst, l, cfg.tol), inst.x).value;
      double want = Eigen::JacobiSVD<Eigen::MatrixXd>(l.mat().transpose() * inst.x).singularValues().sum();
      worsen(worst, std::abs(p.to_double() - want) / scale);
    }
  }
  r.measured = worst;
  r.pass = worst <= r.tolerance;
  r.detail = "50 X, L = I and two random L > 0; error relative to 1 + |X|_*";
  return r;
}

CriterionResult zero_gap(const Config& cfg) {
  CriterionResult r{6, "zero duality gap"};
  r.tolerance = 1e-6;
  double worst = 0.0;
  for (const NormInstance& inst : norm_instances(cfg))
    for (const SymMatrix& l : inst.weights) {
      InfProjProblem prob = weighted_nuclear(inst, l, cfg.tol);
      double p = eval_p(prob, inst.x).value.to_double();
      worsen(worst, rel(dual_value(prob, inst.x).to_double(), p));
    }
  r.measured = worst;
  r.pass = worst <= r.tolerance;
  r.detail = "same 150 instances as the nuclear-norm criterion";
  return r;
}

// grid resolution by input size: wide grids for two unknowns, shallow ones for four
GridConj grid_for(const std::function<double(const RectMatrix&)>& f, const RectMatrix& y, double radius,
                  std::uint64_t seed) {
  if (y.size() <= 2) return grid_conjugate(f, y, radius, 21, 6, 0.25, seed);
  return grid_conjugate(f, y, radius, 5, 11, 0.5, seed);
}

CriterionResult indicator_conjugate(const Config& cfg) {
  CriterionResult r{7, "indicator conjugate vs grid Fenchel conjugate"};
  r.tolerance = 1e-3;
  Rng rng(cfg.seed + 7);
  const ConvexSetSpec sets[] = {set::SpectralBox{0.0, 1.0}, set::Fantope{1}, set::Fantope{2}, set::TraceBall{1.0}};
  double worst = 0.0;
  int cases = 0;
  for (const ConvexSetSpec& s : sets)
    for (int m : {1, 2}) {
      InfProjProblem prob(ProblemData::zero(2, m, cfg.tol), hfun::Indicator{s}, cfg.tol);
      RectMatrix y = 0.6 * gaussian(rng, 2, m);
      auto p = [&](const RectMatrix& x) { return eval_p(prob, x).value.to_double(); };
      GridConj g = grid_for(p, y, 1.25 * y.norm() + 0.25, cfg.seed + 700 + cases);
      double c = eval_p_conj(prob, y).value.to_double();
      worsen(worst, std::abs(c - g.value));
      ++cases;
    }
  r.measured = worst;
  r.pass = worst <= r.tolerance;
  r.detail = std::to_string(cases) + " (set, shape) cases on 2x1 and 2x2; rotated-lattice grid values are lower bounds";
  return r;
}

ConvexSetSpec bounded_set(Rng& rng, int n) {
  switch (uniform_int(rng, 0, 5)) {
    case 0: return set::SpectralBox{uniform(rng, -1.0, 0.0), uniform(rng, 0.2, 2.0)};
    case 1: return set::TraceBall{uniform(rng, 0.2, 2.0)};
    case 2: return set::Fantope{uniform_int(rng, 1, n)};
    case 3: {
      set::Hull h;
      for (int i = 0, q = uniform_int(rng, 1, 3); i < q; ++i) h.vertices.push_back(random_spd(rng, n, 0.0, 1.5));
      return h;
    }
    case 4: return set::ShiftedPSDCap{random_spd(rng, n, 0.1, 1.5)};
    default: return set::Singleton{random_spd(rng, n, 0.1, 1.5)};
  }
}

CriterionResult vgf_suite(const Config& cfg) {
  CriterionResult r{8, "VGF suite"};
  Rng rng(cfg.seed + 8);
  std::ostringstream os;
  bool ok = true;

  // Ray(I): Phi is the indicator of {0}
  int ray_bad = 0;
  {
    VgfInstance inst(set::Ray{SymMatrix::identity(2)}, 2, 1, cfg.tol);
    for (int i = -2; i <= 2; ++i)
      for (int k = -2; k <= 2; ++k) {
        RectMatrix y(2, 1);
        y << 0.5 * i, 0.5 * k;
        ExtReal got = vgf_eval(inst, y);
        if (!(got == (i == 0 && k == 0 ? ExtReal::finite(0.0) : ExtReal::plus_inf()))) ++ray_bad;
      }
    RectMatrix tiny(2, 1);
    tiny << 1e-8, 0.0;
    if (!vgf_eval(inst, tiny).is_plus_inf()) ++ray_bad;
  }
  os << "ray mismatches " << ray_bad;
  ok = ok && ray_bad == 0;

  // homogeneity, convexity and Fenchel-Young on 100 samples
  double hom = 0.0, cvx = 0.0, fy = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = uniform_int(rng, 1, 4), m = uniform_int(rng, 1, 3);
    VgfInstance inst(bounded_set(rng, n), n, m, cfg.tol);
    RectMatrix y1 = gaussian(rng, n, m), y2 = gaussian(rng, n, m);
    const double t = uniform(rng, 0.1, 3.0), th = uniform(rng, 0.0, 1.0);
    const double f1 = vgf_eval(inst, y1).to_double(), f2 = vgf_eval(inst, y2).to_double();
    worsen(hom, rel(vgf_eval(inst, t * y1).to_double(), t * t * f1));
    const double mid = vgf_eval(inst, th * y1 + (1.0 - th) * y2).to_double();
    worsen(cvx, std::max(0.0, mid - (th * f1 + (1.0 - th) * f2)) / (1.0 + std::abs(f1) + std::abs(f2)));
    VgfSubgradient sg = vgf_subdiff(inst, y1);
    const double conj = vgf_conj(inst, sg.subgradient).value.to_double();
    worsen(fy, std::abs(f1 + conj - inner(sg.subgradient, y1)) / (1.0 + std::abs(f1)));
  }
  os << "; homogeneity " << fmt(hom) << " convexity " << fmt(cvx) << " (tol 1e-9)";
  os << "; Fenchel-Young " << fmt(fy) << " (tol 1e-6)";
  ok = ok && hom <= 1e-9 && cvx <= 1e-9 && fy <= 1e-6;

  // conjugate vs grid
  double grid_err = 0.0;
  const ConvexSetSpec sets[] = {set::SpectralBox{0.0, 1.0}, set::Fantope{1}, set::TraceBall{1.0}};
  for (const ConvexSetSpec& s : sets)
    for (int m : {1, 2}) {
      VgfInstance inst(s, 2, m, cfg.tol);
      RectMatrix x = 0.5 * gaussian(rng, 2, m);
      auto f = [&](const RectMatrix& y) { return vgf_eval(inst, y).to_double(); };
      const double nuc = Eigen::JacobiSVD<Eigen::MatrixXd>(x).singularValues().sum();
      const std::uint64_t rot = cfg.seed + 800 + static_cast<std::uint64_t>(m);
      GridConj g = x.size() <= 2 ? grid_conjugate(f, x, 1.5 * nuc + 0.25, 41, 8, 0.2, rot)
                                 : grid_conjugate(f, x, 1.5 * nuc + 0.25, 9, 16, 0.5, rot);
      worsen(grid_err, std::abs(vgf_conj(inst, x).value.to_double() - g.value));
    }
  os << "; conjugate vs grid " << fmt(grid_err) << " (tol 1e-3)";
  ok = ok && grid_err <= 1e-3;

  r.measured = std::max({static_cast<double>(ray_bad), hom, cvx, fy, grid_err});
  r.tolerance = 1e-3;
  r.pass = ok;
  r.detail = os.str();
  return r;
}

CriterionResult squared_gauge(const Config& cfg) {
  CriterionResult r{9, "VGF as half squared gauge"};
  r.tolerance = 1e-6;
  Rng rng(cfg.seed + 9);
  double worst = 0.0;
  int inconsistent = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = uniform_int(rng, 1, 4), m = uniform_int(rng, 1, 3);
    ConvexSetSpec s = i % 2 == 0 ? ConvexSetSpec(set::SpectralBox{uniform(rng, -1.0, 0.0), uniform(rng, 0.2, 2.0)})
                                 : ConvexSetSpec(set::TraceBall{uniform(rng, 0.2, 2.0)});
    VgfInstance inst(s, n, m, cfg.tol);
    RectMatrix y = gaussian(rng, n, m);
    const double phi = vgf_eval(inst, y).to_double();
    GaugeDecomp d = vgf_gauge_decomp(inst, y);
    if (!d.consistent) ++inconsistent;
    const double sf = d.sigma_f.to_double();
    worsen(worst, rel(0.5 * sf * sf, phi));
    worsen(worst, rel(0.5 * psd_support_oracle(s, gram(y)), phi));
  }
  r.measured = worst;
  r.pass = worst <= r.tolerance && inconsistent == 0;
  r.detail = "25 spectral-box and 25 trace-ball sets; " + std::to_string(inconsistent) + " flagged inconsistent";
  return r;
}

CriterionResult ky_fan(const Config& cfg) {
  CriterionResult r{10, "Ky Fan (2,k) bridge and special norms"};
  r.tolerance = 1e-8;
  Rng rng(cfg.seed + 10);
  double worst = 0.0, special = 0.0;
  int identity_false = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = uniform_int(rng, 1, 5), m = uniform_int(rng, 1, 4);
    RectMatrix x = gaussian(rng, n, m);
    // every valid k, 1..min(n, m)
    for (int k = 1; k <= std::min(n, m); ++k) {
      const double phi = vgf_eval(VgfInstance(set::Fantope{k}, n, m, cfg.tol), x).to_double();
      const double kf = kyfan_norm({2.0, k}, x), ko = kyfan_eig(x, 2.0, k);
      worsen(worst, rel(0.5 * kf * kf, phi));
      worsen(worst, rel(0.5 * ko * ko, phi));
      if (!kyfan_vgf_identity({2.0, k}, x, cfg.tol)) ++identity_false;
    }
    Vector s = Eigen::JacobiSVD<Eigen::MatrixXd>(x).singularValues();
    const int q = static_cast<int>(s.size());
    worsen(special, rel(kyfan_norm({1.0, q}, x), s.sum()));
    worsen(special, rel(kyfan_norm({2.0, q}, x), x.norm()));
    worsen(special, rel(kyfan_norm({kInf, q}, x), s(0)));
    worsen(special, rel(kyfan_norm({3.0, 1}, x), s(0)));
  }
  r.measured = worst;
  r.pass = worst <= r.tolerance && special <= 1e-10 && identity_false == 0;
  r.detail = "special cases " + fmt(special) + " (tol 1e-10); identity check false " + std::to_string(identity_false);
  return r;
}

CriterionResult gradient_check(const Config& cfg) {
  CriterionResult r{11, "GMF gradient vs central differences"};
  r.tolerance = 1e-5;
  Rng rng(cfg.seed + 11);
  const Tolerances& tol = cfg.tol;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = uniform_int(rng, 1, 5), m = uniform_int(rng, 1, 4), l = uniform_int(rng, 1, 3);
    ProblemData pd = random_problem(rng, n, m, l, cfg.tol);
    SymMatrix v = random_interior(rng, pd, 0.5);
    RectMatrix x = gaussian(rng, n, m);
    GmfGradient g = grad_gmf(pd, x, v, tol);
    RectMatrix fx = fd_gradient([&](const RectMatrix& z) { return eval_gmf(pd, z, v, tol).value.to_double(); }, x);
    SymMatrix fv = fd_gradient_sym([&](const SymMatrix& w) { return eval_gmf(pd, x, w, tol).value.to_double(); }, v);
    const double err = (g.gx - fx).norm() + (g.gv.mat() - fv.mat()).norm();
    worsen(worst, err / std::max(1.0, g.gx.norm() + g.gv.norm()));
  }
  r.measured = worst;
  r.pass = worst <= r.tolerance;
  r.detail = "50 interior points; error relative to max(1, |gradient|)";
  return r;
}

bool trace_ok(const SolveTrace& tr) {
  for (std::size_t i = 0; i < tr.iterates.size(); ++i) {
    if (!(tr.iterates[i].min_eig_v > 0.0)) return false;
    if (i > 0 && tr.iterates[i].objective > tr.iterates[i - 1].objective) return false;
  }
  return true;
}

CriterionResult smoothing(const Config& cfg) {
  CriterionResult r{12, "smoothing solver vs soft threshold and proximal reference"};
  r.tolerance = 1e-4;
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream os;
  int bad_traces = 0, converged = 0;

  // min (x - 3)^2 / 2 + |x|
  auto fit1 = LeastSquares::mask(1, 1, {{0, 0}}, Vector::Constant(1, 3.0));
  SolveTrace t1 = solve_smooth(fit1, ProblemData::zero(1, 1, cfg.tol), scalar(0.5), RectMatrix::Zero(1, 1),
                               SymMatrix::identity(1), cfg.tol);
  const double err1 = std::abs(t1.final_x(0, 0) - soft_threshold(3.0, 1.0));
  if (!trace_ok(t1)) ++bad_traces;
  if (t1.status == SolveTrace::Status::Converged) ++converged;
  os << "scalar error " << fmt(err1) << " (tol 1e-6)";

  Rng rng(cfg.seed + 12), restart_rng(cfg.seed + 112);
  double worst = 0.0, obj_gap = 0.0;
  int accepted = 0, draws = 0, ambiguous = 0;
  auto total = [](const LeastSquares& f, const RectMatrix& x) {
    return f.value(x) + Eigen::JacobiSVD<Eigen::MatrixXd>(x).singularValues().sum();
  };
  while (accepted < 10 && draws < 40) {
    ++draws;
    const int n = uniform_int(rng, 5, 8), m = uniform_int(rng, 5, 8);
    RectMatrix truth = gaussian(rng, n, 2) * gaussian(rng, 2, m);
    std::vector<std::pair<int, int>> obs;
    std::vector<double> vals;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        if (uniform(rng, 0.0, 1.0) < 0.6) {
          obs.push_back({i, j});
          vals.push_back(truth(i, j));
        }
    auto fit = LeastSquares::mask(n, m, obs, Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
    const double lambda = 1.0;
    SolveTrace tr = solve_smooth(fit, ProblemData::zero(n, m, cfg.tol), SymMatrix::identity(n) * (0.5 * lambda * lambda),
                                 RectMatrix::Zero(n, m), SymMatrix::identity(n), cfg.tol);
    RectMatrix ref = solve_prox_reference(fit, SymMatrix::identity(n), lambda, RectMatrix::Zero(n, m));
    if (!trace_ok(tr)) ++bad_traces;
    if (tr.status == SolveTrace::Status::Converged) ++converged;
    worsen(obj_gap, rel(total(fit, tr.final_x), total(fit, ref)));
    // a second reference run from a far start; disagreement means the minimizer is not unique
    RectMatrix ref2 =
        solve_prox_reference(fit, SymMatrix::identity(n), lambda, truth + 2.0 * gaussian(restart_rng, n, m));
    if ((ref2 - ref).norm() > 1e-6 * (1.0 + ref.norm())) {
      ++ambiguous;
      continue;
    }
    ++accepted;
    worsen(worst, (tr.final_x - ref).norm() / (1.0 + ref.norm()));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  os << "; completion vs reference " << fmt(worst) << " on " << accepted << " instances (" << ambiguous
     << " skipped: references from two starts disagree, minimizer not unique); objective gap " << fmt(obj_gap)
     << " (tol 1e-6, all draws); bad traces " << bad_traces << "; converged " << converged << "/" << draws + 1
     << "; runtime limit 60 s";
  r.measured = worst;
  r.pass = err1 <= 1e-6 && accepted == 10 && worst <= r.tolerance && obj_gap <= 1e-6 && bad_traces == 0 &&
           secs < 60.0;
  r.detail = os.str();
  return r;
}

CriterionResult cq_chain(const Config& cfg) {
  CriterionResult r{13, "CQ implication chain (500 instances)"};
  Rng rng(cfg.seed + 13);
  int violations = 0, errors = 0, undecided = 0, gated = 0;
  std::string first_error;
  for (int i = 0; i < 500; ++i) {
    const int n = uniform_int(rng, 1, 3), m = uniform_int(rng, 1, 2);
    const bool zero_case = uniform(rng, 0.0, 1.0) < 0.3;
    ProblemData pd =
        zero_case ? ProblemData::zero(n, m, cfg.tol) : random_problem(rng, n, m, uniform_int(rng, 1, 2), cfg.tol);
    HSpec h = random_h(rng, n);
    if (zero_case) {
      // the equivalence case needs an indicator; keep the draw's set when it has one
      if (!std::holds_alternative<hfun::Indicator>(h))
        h = hfun::Indicator{std::holds_alternative<hfun::Support>(h) ? std::get<hfun::Support>(h).set
                                                                      : ConvexSetSpec(set::TraceBall{1.0})};
    }
    try {
      CQReport rep = cq_report(InfProjProblem(pd, h, cfg.tol));
      auto holds = [](Decision d) { return d == Decision::Holds; };
      auto fails = [](Decision d) { return d == Decision::Fails; };
      if (holds(rep.bpcq) && fails(rep.spcq)) ++violations;
      if (holds(rep.spcq) && fails(rep.pcq)) ++violations;
      if (holds(rep.bpcq) && fails(rep.pcq)) ++violations;
      // the three-way equivalence assumes the set meets the PSD cone; with an empty intersection
      // PCQ and SPCQ hold (dom h* is everything) while BPCQ fails by definition
      if (zero_case && !meets_KA(std::get<hfun::Indicator>(h).set, pd, cfg.tol)) ++gated;
      else if (zero_case) {
        const Decision ds[] = {rep.pcq, rep.spcq, rep.bpcq};
        bool any_h = std::any_of(std::begin(ds), std::end(ds), holds);
        bool any_f = std::any_of(std::begin(ds), std::end(ds), fails);
        if (any_h && any_f) ++violations;
      }
      if (rep.pcq == Decision::Undecided || rep.spcq == Decision::Undecided || rep.bpcq == Decision::Undecided)
        ++undecided;
    } catch (const std::exception& e) {
      if (errors++ == 0) first_error = e.what();
    }
  }
  r.measured = violations + errors;
  r.tolerance = 0;
  r.pass = violations == 0 && errors == 0;
  r.detail = std::to_string(violations) + " violations, " + std::to_string(errors) + " errors, " +
             std::to_string(undecided) + " reports with an Undecided primal CQ, " + std::to_string(gated) +
             " zero-A indicator sets missing the PSD cone (chain only)" +
             (first_error.empty() ? "" : "; first error: " + first_error);
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const Config& cfg) {
  using Fn = CriterionResult (*)(const Config&);
  static const Fn table[kCriterionCount] = {gmf_vs_oracle,  scalar_gmf,     improper_p,    domain_examples, nuclear_norm,
                                            zero_gap,       indicator_conjugate, vgf_suite, squared_gauge,  ky_fan,
                                            gradient_check, smoothing,      cq_chain};
  if (id < 1 || id > kCriterionCount) throw std::out_of_range("criterion id must be 1.." + std::to_string(kCriterionCount));
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    cfg.tol.validate();
    r = table[id - 1](cfg);
  } catch (const std::exception& e) {
    r.id = id;
    r.title = "criterion " + std::to_string(id);
    r.pass = false;
    r.measured = kInf;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> run_all(const Config& cfg) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, cfg));
  return out;
}

std::string format_line(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d  ", r.pass ? "PASS" : "FAIL", r.id);
  std::ostringstream os;
  os << head << r.title << "  measured=" << fmt(r.measured) << " tol=" << fmt(r.tolerance) << "  ("
     << fmt(r.seconds) << " s)";
  if (!r.detail.empty()) os << "  " << r.detail;
  return os.str();
}

}  // namespace gmfkit::acceptance
