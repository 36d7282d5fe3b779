#include "gmfkit/hset.hpp"

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

double slack(const Tolerances& tol, const SymMatrix& v) { return tol.psd_abs * (1.0 + v.norm()); }

// Minimum-norm point of conv{p_i} (Wolfe's algorithm). Columns of pts are the points.
Vector min_norm_point(const Eigen::MatrixXd& pts, Vector* weights) {
  const int q = static_cast<int>(pts.cols());
  const double scale = std::max(1.0, pts.colwise().squaredNorm().maxCoeff());
  const double eps = 1e-13;
  int j0 = 0;
  pts.colwise().squaredNorm().minCoeff(&j0);
  std::vector<int> s{j0};
  Vector lam = Vector::Zero(q);
  lam(j0) = 1.0;
  Vector x = pts.col(j0);
  for (int outer = 0; outer < 50 * q + 100; ++outer) {
    Vector dots = pts.transpose() * x;
    int j = 0;
    dots.minCoeff(&j);
    if (dots(j) >= x.squaredNorm() - eps * scale) break;
    if (std::find(s.begin(), s.end(), j) != s.end()) break;
    s.push_back(j);
    for (int minor = 0; minor < 10 * q + 10; ++minor) {
      const int k = static_cast<int>(s.size());
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) kkt(a, b) = pts.col(s[a]).dot(pts.col(s[b]));
      kkt.block(0, k, k, 1).setOnes();
      kkt.block(k, 0, 1, k).setOnes();
      Vector rhs = Vector::Zero(k + 1);
      rhs(k) = 1.0;
      Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      Vector alpha = sol.head(k);
      if (alpha.minCoeff() > eps) {
        lam.setZero();
        for (int a = 0; a < k; ++a) lam(s[a]) = alpha(a);
        break;
      }
      double theta = 1.0;
      for (int a = 0; a < k; ++a)
        if (alpha(a) <= eps) {
          double la = lam(s[a]);
          double denom = la - alpha(a);
          if (denom > 0) theta = std::min(theta, la / denom);
        }
      for (int a = 0; a < k; ++a) lam(s[a]) = theta * alpha(a) + (1.0 - theta) * lam(s[a]);
      std::vector<int> keep;
      for (int a : s)
        if (lam(a) > eps) keep.push_back(a);
        else lam(a) = 0.0;
      if (keep.empty()) {
        keep.push_back(s.back());
        lam(s.back()) = 1.0;
      }
      s = keep;
      lam /= lam.sum();
    }
    x = pts * lam;
  }
  if (weights) *weights = lam;
  return x;
}

double hull_distance(const std::vector<SymMatrix>& verts, const SymMatrix& v, Vector* weights = nullptr) {
  const int n = v.dim();
  Eigen::MatrixXd pts(n * n, verts.size());
  for (size_t i = 0; i < verts.size(); ++i) {
    Eigen::MatrixXd d = verts[i].mat() - v.mat();
    pts.col(static_cast<int>(i)) = Eigen::Map<const Vector>(d.data(), n * n);
  }
  return min_norm_point(pts, weights).norm();
}

bool in_order_cone(const SymMatrix& w, const RectMatrix& nb, const Tolerances& tol) {
  double s = 1.0 + w.norm();
  Eigen::MatrixXd proj = nb * nb.transpose();
  if ((w.mat() - proj * w.mat() * proj).norm() > tol.feas_abs * s) return false;
  return min_eig(w) >= -tol.psd_abs * s;
}

SymMatrix random_sym(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = nd(rng);
  return SymMatrix(m);
}

}  // namespace

void validate_set(const ConvexSetSpec& s, int n) {
  auto dim_check = [n](const SymMatrix& m, const char* who) {
    if (m.dim() != n)
      throw std::invalid_argument(std::string(who) + ": matrix must be " + std::to_string(n) + "x" +
                                  std::to_string(n));
  };
  std::visit(overloaded{
                 [&](const set::Singleton& x) { dim_check(x.u, "Singleton"); },
                 [&](const set::SpectralBox& x) {
                   if (!std::isfinite(x.lo) || !std::isfinite(x.hi) || x.lo > x.hi)
                     throw std::invalid_argument("SpectralBox: need finite lo <= hi");
                 },
                 [&](const set::TraceBall& x) {
                   if (!std::isfinite(x.r) || x.r < 0) throw std::invalid_argument("TraceBall: need finite r >= 0");
                 },
                 [&](const set::Fantope& x) {
                   if (x.k < 1 || x.k > n) throw std::invalid_argument("Fantope: need 1 <= k <= n");
                 },
                 [&](const set::Hull& x) {
                   if (x.vertices.empty()) throw std::invalid_argument("Hull: vertex list is empty");
                   for (const auto& v : x.vertices) dim_check(v, "Hull");
                 },
                 [&](const set::Ray& x) { dim_check(x.d, "Ray"); },
                 [&](const set::ShiftedPSDCap& x) {
                   dim_check(x.u, "ShiftedPSDCap");
                   if (min_eig(x.u) < -1e-9 * (1.0 + x.u.norm()))
                     throw std::invalid_argument("ShiftedPSDCap: U must be positive semidefinite");
                 },
             },
             s);
}

void validate_h(const HSpec& h, int n) {
  std::visit(overloaded{
                 [&](const hfun::Linear& x) {
                   if (x.u.dim() != n) throw std::invalid_argument("Linear: U has wrong dimension");
                 },
                 [&](const hfun::Indicator& x) { validate_set(x.set, n); },
                 [&](const hfun::Support& x) { validate_set(x.set, n); },
             },
             h);
}

std::string set_name(const ConvexSetSpec& s) {
  return std::visit(overloaded{
                        [](const set::Singleton&) { return std::string("singleton"); },
                        [](const set::SpectralBox&) { return std::string("spectral_box"); },
                        [](const set::TraceBall&) { return std::string("trace_ball"); },
                        [](const set::Fantope&) { return std::string("fantope"); },
                        [](const set::Hull&) { return std::string("hull"); },
                        [](const set::Ray&) { return std::string("ray"); },
                        [](const set::ShiftedPSDCap&) { return std::string("shifted_psd_cap"); },
                    },
                    s);
}

bool is_bounded(const ConvexSetSpec& s) {
  if (auto r = std::get_if<set::Ray>(&s)) return r->d.norm() == 0.0;
  return true;
}

bool member(const ConvexSetSpec& s, const SymMatrix& v, const Tolerances& tol) {
  const double sl = slack(tol, v);
  return std::visit(
      overloaded{
          [&](const set::Singleton& x) { return (v - x.u).norm() <= tol.feas_abs * (1.0 + x.u.norm()); },
          [&](const set::SpectralBox& x) {
            Vector ev = sym_eig(v).values;
            return ev.size() == 0 || (ev(ev.size() - 1) >= x.lo - sl && ev(0) <= x.hi + sl);
          },
          [&](const set::TraceBall& x) {
            return min_eig(v) >= -sl && v.trace() <= x.r + tol.feas_abs * (1.0 + v.norm());
          },
          [&](const set::Fantope& x) {
            Vector ev = sym_eig(v).values;
            return ev(ev.size() - 1) >= -sl && ev(0) <= 1.0 + sl &&
                   v.trace() <= x.k + tol.feas_abs * (1.0 + v.norm());
          },
          [&](const set::Hull& x) {
            return hull_distance(x.vertices, v) <= tol.feas_abs * (1.0 + v.norm());
          },
          [&](const set::Ray& x) {
            double dn = x.d.norm();
            if (dn == 0.0) return v.norm() <= tol.feas_abs;
            double t = inner(v, x.d) / (dn * dn);
            if (t < -tol.feas_abs) return false;
            return (v - x.d * std::max(t, 0.0)).norm() <= tol.feas_abs * (1.0 + v.norm());
          },
          [&](const set::ShiftedPSDCap& x) { return min_eig(v) >= -sl && min_eig(x.u - v) >= -sl; },
      },
      s);
}

bool contains_zero(const ConvexSetSpec& s, int n, const Tolerances& tol) {
  if (auto b = std::get_if<set::SpectralBox>(&s)) return b->lo <= 0.0 && b->hi >= 0.0;
  return member(s, SymMatrix::zero(n), tol);
}

bool is_psd_family(const ConvexSetSpec& s, const Tolerances& tol) {
  auto psd = [&](const SymMatrix& m) { return min_eig(m) >= -slack(tol, m); };
  return std::visit(overloaded{
                        [&](const set::Singleton& x) { return psd(x.u); },
                        [&](const set::SpectralBox& x) { return x.lo >= 0.0; },
                        [&](const set::TraceBall&) { return true; },
                        [&](const set::Fantope&) { return true; },
                        [&](const set::Hull& x) {
                          return std::all_of(x.vertices.begin(), x.vertices.end(), psd);
                        },
                        [&](const set::Ray& x) { return psd(x.d); },
                        [&](const set::ShiftedPSDCap&) { return true; },
                    },
                    s);
}

SupportEval support(const ConvexSetSpec& s, const SymMatrix& g) {
  const int n = g.dim();
  auto from_weights = [](const SymEig& e, const Vector& mu) {
    return SymMatrix(e.vectors * mu.asDiagonal() * e.vectors.transpose());
  };
  return std::visit(
      overloaded{
          [&](const set::Singleton& x) -> SupportEval { return {ExtReal::finite(inner(x.u, g)), x.u}; },
          [&](const set::SpectralBox& x) -> SupportEval {
            SymEig e = sym_eig(g);
            Vector mu(n);
            for (int i = 0; i < n; ++i) mu(i) = e.values(i) > 0 ? x.hi : x.lo;
            return {ExtReal::finite(mu.dot(e.values)), from_weights(e, mu)};
          },
          [&](const set::TraceBall& x) -> SupportEval {
            SymEig e = sym_eig(g);
            Vector mu = Vector::Zero(n);
            if (e.values(0) > 0) mu(0) = x.r;
            return {ExtReal::finite(mu.dot(e.values)), from_weights(e, mu)};
          },
          [&](const set::Fantope& x) -> SupportEval {
            SymEig e = sym_eig(g);
            Vector mu = Vector::Zero(n);
            for (int i = 0; i < std::min(x.k, n); ++i)
              if (e.values(i) > 0) mu(i) = 1.0;
            return {ExtReal::finite(mu.dot(e.values)), from_weights(e, mu)};
          },
          [&](const set::Hull& x) -> SupportEval {
            size_t best = 0;
            double bv = -std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < x.vertices.size(); ++i) {
              double val = inner(x.vertices[i], g);
              if (val > bv) bv = val, best = i;
            }
            return {ExtReal::finite(bv), x.vertices[best]};
          },
          [&](const set::Ray& x) -> SupportEval {
            if (inner(x.d, g) <= 0.0) return {ExtReal::finite(0.0), SymMatrix::zero(n)};
            return {ExtReal::plus_inf(), std::nullopt};
          },
          [&](const set::ShiftedPSDCap& x) -> SupportEval {
            // {0 <= V <= U} = R {0 <= W <= I} R with R = U^{1/2}
            SymMatrix r = psd_sqrt(x.u);
            SymEig e = sym_eig(SymMatrix(r.mat() * g.mat() * r.mat()));
            Vector mu(n);
            for (int i = 0; i < n; ++i) mu(i) = e.values(i) > 0 ? 1.0 : 0.0;
            SymMatrix w = from_weights(e, mu);
            return {ExtReal::finite(mu.dot(e.values)), SymMatrix(r.mat() * w.mat() * r.mat())};
          },
      },
      s);
}

ExtReal gauge(const ConvexSetSpec& s, const SymMatrix& g, const Tolerances& tol) {
  const int n = g.dim();
  if (!contains_zero(s, n, tol)) throw std::invalid_argument("gauge requires 0 in S");
  if (g.norm() == 0.0) return ExtReal::finite(0.0);
  const double sl = slack(tol, g);
  const ExtReal inf = ExtReal::plus_inf();
  auto bisect = [&]() -> ExtReal {
    double hi = std::max(g.norm(), 1e-300);
    // bracket: shrink first, then grow
    while (hi > 1e-300 && member(s, g * (1.0 / (hi * 0.5)), tol)) hi *= 0.5;
    int grow = 0;
    while (!member(s, g * (1.0 / hi), tol)) {
      hi *= 2.0;
      if (++grow > 200) return inf;
    }
    double lo = hi * 0.5;
    if (member(s, g * (1.0 / lo), tol)) lo = 0.0;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (mid <= 0.0) break;
      if (member(s, g * (1.0 / mid), tol)) hi = mid;
      else lo = mid;
    }
    return ExtReal::finite(hi);
  };
  return std::visit(
      overloaded{
          [&](const set::Singleton&) { return inf; },  // U = 0 here, and g != 0
          [&](const set::SpectralBox& x) {
            Vector ev = sym_eig(g).values;
            double t = 0.0;
            if (ev(0) > sl) {
              if (x.hi <= 0.0) return inf;
              t = std::max(t, ev(0) / x.hi);
            }
            if (ev(n - 1) < -sl) {
              if (x.lo >= 0.0) return inf;
              t = std::max(t, ev(n - 1) / x.lo);
            }
            return ExtReal::finite(t);
          },
          [&](const set::TraceBall& x) {
            if (min_eig(g) < -sl) return inf;
            if (x.r == 0.0) return inf;
            return ExtReal::finite(std::max(0.0, g.trace()) / x.r);
          },
          [&](const set::Fantope& x) {
            if (min_eig(g) < -sl) return inf;
            return ExtReal::finite(std::max(max_eig(g), g.trace() / x.k));
          },
          [&](const set::Hull&) { return bisect(); },
          [&](const set::Ray&) { return member(s, g, tol) ? ExtReal::finite(0.0) : inf; },
          [&](const set::ShiftedPSDCap&) { return bisect(); },
      },
      s);
}

ExtReal h_eval(const HSpec& h, const SymMatrix& v, const Tolerances& tol) {
  return std::visit(overloaded{
                        [&](const hfun::Linear& x) { return ExtReal::finite(inner(x.u, v)); },
                        [&](const hfun::Indicator& x) {
                          return member(x.set, v, tol) ? ExtReal::finite(0.0) : ExtReal::plus_inf();
                        },
                        [&](const hfun::Support& x) { return support(x.set, v).value; },
                    },
                    h);
}

ExtReal h_conj(const HSpec& h, const SymMatrix& w, const Tolerances& tol) {
  return std::visit(overloaded{
                        [&](const hfun::Linear& x) {
                          return member(set::Singleton{x.u}, w, tol) ? ExtReal::finite(0.0) : ExtReal::plus_inf();
                        },
                        [&](const hfun::Indicator& x) { return support(x.set, w).value; },
                        [&](const hfun::Support& x) {
                          return member(x.set, w, tol) ? ExtReal::finite(0.0) : ExtReal::plus_inf();
                        },
                    },
                    h);
}

CompatibilityResult cone_compatible(const ConvexSetSpec& s, const std::vector<std::pair<SymMatrix, SymMatrix>>& pairs,
                                    const RectMatrix& nb, const Tolerances& tol) {
  CompatibilityResult out;
  for (const auto& [x, y] : pairs) {
    if (!in_order_cone(y, nb, tol) || !member(s, y, tol)) continue;
    if (!in_order_cone(x, nb, tol) || !in_order_cone(y - x, nb, tol)) continue;
    ++out.pairs_checked;
    if (!member(s, x, tol)) {
      out.compatible = false;
      out.counterexample = std::make_pair(x, y);
      return out;
    }
  }
  return out;
}

CompatibilityResult cone_compatible(const ConvexSetSpec& s, const RectMatrix& nb, int samples, std::mt19937_64& rng,
                                    const Tolerances& tol) {
  const int n = static_cast<int>(nb.rows());
  const int d = static_cast<int>(nb.cols());
  if (!contains_zero(s, n, tol)) throw std::invalid_argument("cone_compatible requires 0 in S");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> nd;
  auto in_k = [&](const SymMatrix& y) { return in_order_cone(y, nb, tol); };

  // candidate tops y in K n S: extreme points of S that lie in K, and scaled random cone elements
  std::vector<SymMatrix> tops;
  if (auto h = std::get_if<set::Hull>(&s))
    for (const auto& v : h->vertices)
      if (in_k(v)) tops.push_back(v);
  if (auto r = std::get_if<set::Ray>(&s))
    if (in_k(r->d)) tops.push_back(r->d);
  if (auto c = std::get_if<set::ShiftedPSDCap>(&s))
    if (in_k(c->u)) tops.push_back(c->u);
  for (int i = 0; i < samples && d > 0; ++i) {
    SymMatrix g = random_sym(n, rng);
    SupportEval se = support(s, g);
    if (se.witness && in_k(*se.witness)) tops.push_back(*se.witness);
    int rk = 1 + static_cast<int>(unif(rng) * d) % d;
    Eigen::MatrixXd f(d, rk);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < rk; ++b) f(a, b) = nd(rng);
    SymMatrix y0(nb * f * f.transpose() * nb.transpose());
    ExtReal gam = gauge(s, y0, tol);
    if (!gam.is_finite()) continue;
    double scale = gam.value() > 0 ? 1.0 / gam.value() : 1.0;
    if (unif(rng) < 0.5) scale *= unif(rng);
    tops.push_back(y0 * scale);
  }

  std::vector<std::pair<SymMatrix, SymMatrix>> pairs;
  for (const auto& y : tops) {
    SymMatrix zy(nb.transpose() * y.mat() * nb);
    Eigen::MatrixXd r = psd_sqrt(zy).mat();
    for (int t = 0; t < 4; ++t) {
      Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(random_sym(d, rng).mat()).householderQ();
      Vector c(d);
      for (int a = 0; a < d; ++a) c(a) = t == 0 ? 0.5 : (t == 1 ? (unif(rng) < 0.5 ? 0.0 : 1.0) : unif(rng));
      Eigen::MatrixXd cm = q * c.asDiagonal() * q.transpose();
      pairs.emplace_back(SymMatrix(nb * r * cm * r * nb.transpose()), y);
    }
  }
  return cone_compatible(s, pairs, nb, tol);
}

namespace {

// Max of u^T G u over unit u by sampling plus projected ascent; independent of eigensolvers.
double rayleigh_max(const SymMatrix& g, std::mt19937_64& rng) {
  const int n = g.dim();
  std::normal_distribution<double> nd;
  double best = -std::numeric_limits<double>::infinity();
  Vector bu;
  for (int s = 0; s < 64; ++s) {
    Vector u(n);
    for (int i = 0; i < n; ++i) u(i) = nd(rng);
    u.normalize();
    double val = u.dot(g.mat() * u);
    if (val > best) best = val, bu = u;
  }
  double step = 1.0 / (1.0 + g.norm());
  for (int it = 0; it < 2000; ++it) {
    Vector u = (bu + step * (g.mat() * bu)).normalized();
    double val = u.dot(g.mat() * u);
    if (val < best) break;
    best = val;
    bu = u;
  }
  return best;
}

}  // namespace

PolarCheckResult polar_support_identity_check(const ConvexSetSpec& c, const ConeSpec& k,
                                              const std::vector<SymMatrix>& samples, std::mt19937_64& rng,
                                              const Tolerances& tol) {
  PolarCheckResult out;
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& g : samples) {
    const double gate = tol.conj_rel * (1.0 + g.norm());
    // right-hand side: sigma_C + indicator of the polar cone
    bool in_polar = std::visit(overloaded{
                                   [&](const cone::Psd&) { return max_eig(g) <= gate; },
                                   [&](const cone::Nsd&) { return min_eig(g) >= -gate; },
                                   [&](const cone::RayCone& r) { return inner(r.d, g) <= gate; },
                               },
                               k);
    double rhs = in_polar ? support(c, g).value.to_double() : inf;

    // left-hand side by brute force
    double cone_part = std::visit(overloaded{
                                      [&](const cone::Psd&) { return rayleigh_max(g, rng) > gate ? inf : 0.0; },
                                      [&](const cone::Nsd&) { return rayleigh_max(g * -1.0, rng) > gate ? inf : 0.0; },
                                      [&](const cone::RayCone& r) { return inner(r.d, g) > gate ? inf : 0.0; },
                                  },
                                  k);
    double set_part = std::visit(
        overloaded{
            [&](const set::Singleton& x) { return inner(x.u, g); },
            [&](const set::Hull& x) {
              double b = -inf;
              for (const auto& v : x.vertices) b = std::max(b, inner(v, g));
              return b;
            },
            [&](const set::TraceBall& x) { return x.r * std::max(0.0, rayleigh_max(g, rng)); },
            [&](const auto&) -> double {
              throw UndecidedError("polar_support_identity_check: brute force supports Singleton, Hull, TraceBall");
            },
        },
        c);
    double lhs = cone_part == inf ? inf : set_part;
    ++out.samples;
    if (std::isinf(lhs) || std::isinf(rhs)) {
      if (lhs != rhs) out.consistent = false;
      continue;
    }
    double err = std::abs(lhs - rhs);
    out.max_error = std::max(out.max_error, err);
    if (err > tol.conj_rel * (1.0 + std::abs(rhs))) out.consistent = false;
  }
  return out;
}

}  // namespace gmfkit
