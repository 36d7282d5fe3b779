#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "criteria.hpp"
#include "gmfkit/infproj.hpp"
#include "gmfkit/smooth.hpp"
#include "gmfkit/vgf.hpp"
#include "oracles.hpp"

namespace gmfkit::cli {
namespace {

using io::Json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything one run reads or produces besides the final report layout.
struct Context {
  const Options& opt;
  Tolerances tol;
  std::uint64_t seed = kDefaultSeed;
  std::vector<std::string> warnings;
  std::string digest_bytes;
  Json outputs = Json::object();
  Json timing = Json::object();
  int exit_code = kOk;

  void note(const std::string& label, const std::string& canonical) {
    digest_bytes += label + "\n" + canonical + "\n";
  }
};

std::string csv_text(const RectMatrix& m) {
  std::ostringstream os;
  io::write_matrix_csv(m, os);
  return os.str();
}

Tolerances with_flags(Tolerances t, const Options& o) {
  if (o.tol_rank) t.rank_rel = *o.tol_rank;
  if (o.tol_psd) t.psd_abs = *o.tol_psd;
  if (o.tol_feas) t.feas_abs = *o.tol_feas;
  if (o.tol_conj) t.conj_rel = *o.tol_conj;
  t.validate();
  return t;
}

RectMatrix need_matrix(Context& c, const std::string& path, const std::string& flag) {
  if (path.empty()) throw UsageError("missing --" + flag);
  RectMatrix m = io::read_matrix_csv(path);
  c.note(flag, csv_text(m));
  return m;
}

void expect_shape(const RectMatrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols)
    throw std::invalid_argument("dimension mismatch: " + what + " is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                                std::to_string(cols));
}

io::Bundle load_bundle(Context& c) {
  if (c.opt.bundle.empty()) throw UsageError("missing --bundle");
  io::Bundle b = io::read_bundle(c.opt.bundle);
  b.tol = with_flags(b.tol, c.opt);
  c.tol = b.tol;
  c.warnings.insert(c.warnings.end(), b.warnings.begin(), b.warnings.end());
  c.note("bundle", io::dump(io::bundle_to_json(b)));
  return b;
}

// (A, B) from the bundle, or from --A/--B where "zero" means a zero row block sized by X.
ProblemData problem_data(Context& c, const RectMatrix& x) {
  if (!c.opt.bundle.empty()) {
    io::Bundle b = load_bundle(c);
    ProblemData pd(b.a, b.b, c.tol);
    expect_shape(x, pd.n(), pd.m(), "X");
    return pd;
  }
  if (c.opt.a.empty() || c.opt.b.empty()) throw UsageError("need --A and --B, or --bundle");
  const Eigen::Index n = x.rows(), m = x.cols();
  RectMatrix a;
  if (c.opt.a == "zero") {
    a = RectMatrix::Zero(1, n);
    c.note("A", "zero");
  } else {
    a = need_matrix(c, c.opt.a, "A");
  }
  RectMatrix b;
  if (c.opt.b == "zero") {
    b = RectMatrix::Zero(a.rows(), m);
    c.note("B", "zero");
  } else {
    b = need_matrix(c, c.opt.b, "B");
  }
  if (a.cols() != n) throw std::invalid_argument("dimension mismatch: A has " + std::to_string(a.cols()) +
                                                 " columns, X has " + std::to_string(n) + " rows");
  expect_shape(b, a.rows(), m, "B");
  return ProblemData(a, b, c.tol);
}

SymMatrix need_sym(Context& c, const std::string& path, const std::string& flag, int n) {
  RectMatrix m = need_matrix(c, path, flag);
  expect_shape(m, n, n, flag);
  return io::to_symmetric(m, c.tol, &c.warnings, flag);
}

ConvexSetSpec load_set(Context& c) {
  if (!c.opt.set.empty()) {
    const bool inline_json = c.opt.set.find('{') != std::string::npos;
    Json j = io::parse_json(inline_json ? c.opt.set : io::read_text(c.opt.set), "--set");
    ConvexSetSpec s = io::set_from_json(j, "--set");
    c.note("set", io::dump(io::set_to_json(s)));
    return s;
  }
  if (!c.opt.bundle.empty()) {
    io::Bundle b = load_bundle(c);
    if (auto ind = std::get_if<hfun::Indicator>(&b.h)) return ind->set;
    if (auto sup = std::get_if<hfun::Support>(&b.h)) return sup->set;
    throw UsageError("the bundle's h carries no set (linear h)");
  }
  throw UsageError("missing --set");
}

Json opt_matrix(const std::optional<SymMatrix>& m) { return m ? io::matrix_to_json(m->mat()) : Json(nullptr); }
Json opt_matrix(const std::optional<RectMatrix>& m) { return m ? io::matrix_to_json(*m) : Json(nullptr); }

// ---- commands

void cmd_eval_gmf(Context& c) {
  RectMatrix x = need_matrix(c, c.opt.x, "X");
  ProblemData pd = problem_data(c, x);
  SymMatrix v = need_sym(c, c.opt.v, "V", pd.n());
  GmfEval e = eval_gmf(pd, x, v, c.tol);
  c.outputs["value"] = io::ext_to_json(e.value);
  c.outputs["unique_witness"] = e.unique;
  c.outputs["witness_y"] = opt_matrix(e.witness_y);
  c.outputs["witness_multiplier"] = opt_matrix(e.witness_multiplier);
}

void cmd_eval_p(Context& c) {
  io::Bundle b = load_bundle(c);
  InfProjProblem prob = b.problem();
  RectMatrix x = need_matrix(c, c.opt.x, "X");
  expect_shape(x, prob.pd.n(), prob.pd.m(), "X");
  InfProjEval e = eval_p(prob, x);
  c.outputs["value"] = io::ext_to_json(e.value);
  c.outputs["argmin_v"] = opt_matrix(e.argmin_v);
  c.outputs["inner_iterations"] = e.inner_iterations;
  c.outputs["unbounded_certificate"] = opt_matrix(e.unbounded_certificate);
  c.outputs["unbounded_origin"] = opt_matrix(e.unbounded_origin);
}

void cmd_conjugate(Context& c) {
  io::Bundle b = load_bundle(c);
  InfProjProblem prob = b.problem();
  RectMatrix y = need_matrix(c, c.opt.y, "Y");
  expect_shape(y, prob.pd.n(), prob.pd.m(), "Y");
  ConjEval e = eval_p_conj(prob, y, c.opt.assume_ccq);
  c.outputs["value"] = io::ext_to_json(e.value);
  c.outputs["witness"] = opt_matrix(e.witness);
  c.outputs["assumed_ccq"] = c.opt.assume_ccq;
}

void cmd_dual_gap(Context& c) {
  io::Bundle b = load_bundle(c);
  InfProjProblem prob = b.problem();
  RectMatrix x = need_matrix(c, c.opt.x, "X");
  expect_shape(x, prob.pd.n(), prob.pd.m(), "X");
  ExtReal p = eval_p(prob, x).value;
  ExtReal d = dual_value(prob, x);
  c.outputs["primal"] = io::ext_to_json(p);
  c.outputs["dual"] = io::ext_to_json(d);
  if (p.is_finite() && d.is_finite()) {
    const double gap = p.value() - d.value();
    c.outputs["gap"] = gap;
    c.outputs["zero_gap"] = std::abs(gap) <= c.tol.conj_rel * (1.0 + std::abs(p.value()));
  } else {
    c.outputs["gap"] = nullptr;
    c.outputs["zero_gap"] = p == d;
  }
}

void cmd_subdiff(Context& c) {
  io::Bundle b = load_bundle(c);
  InfProjProblem prob = b.problem();
  RectMatrix x = need_matrix(c, c.opt.x, "X");
  expect_shape(x, prob.pd.n(), prob.pd.m(), "X");
  SubdiffWitness w = subdiff_p_witness(prob, x);
  c.outputs["subgradient"] = io::matrix_to_json(w.y);
  c.outputs["v"] = io::matrix_to_json(w.v.mat());
  c.outputs["t"] = io::matrix_to_json(w.t.mat());
  c.outputs["p_value"] = w.p_value;
  c.outputs["conj_value"] = w.conj_value;
  c.outputs["fenchel_residual"] = w.fenchel_residual;
}

void cmd_cq_report(Context& c) {
  io::Bundle b = load_bundle(c);
  CQReport r = cq_report(b.problem());
  const std::pair<const char*, Decision> items[] = {
      {"ccq", r.ccq}, {"sccq", r.sccq}, {"pcq", r.pcq}, {"spcq", r.spcq}, {"bpcq", r.bpcq}};
  for (const auto& [name, d] : items) {
    c.outputs[name] = to_string(d);
    if (d == Decision::Undecided) c.exit_code = kUndecided;
  }
  Json diag = Json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = v;
  c.outputs["diagnostics"] = diag;
  c.outputs["certificate"] = opt_matrix(r.certificate);
}

void cmd_vgf(Context& c) {
  ConvexSetSpec s = load_set(c);
  RectMatrix y = need_matrix(c, c.opt.y, "Y");
  VgfInstance inst(s, static_cast<int>(y.rows()), static_cast<int>(y.cols()), c.tol);
  c.outputs["value"] = io::ext_to_json(vgf_eval(inst, y));
  const bool bounded = vgf_bounded(inst);
  c.outputs["bounded"] = bounded;
  if (bounded) {
    VgfSubgradient g = vgf_subdiff(inst, y);
    c.outputs["subgradient"] = io::matrix_to_json(g.subgradient);
    c.outputs["vbar"] = io::matrix_to_json(g.vbar.mat());
    c.outputs["fenchel_residual"] = g.fenchel_residual;
  }
  if (!c.opt.x.empty()) {
    RectMatrix x = need_matrix(c, c.opt.x, "X");
    expect_shape(x, y.rows(), y.cols(), "X");
    VgfConj conj = vgf_conj(inst, x);
    c.outputs["conjugate"] = io::ext_to_json(conj.value);
    c.outputs["conjugate_witness"] = opt_matrix(conj.witness);
  }
}

double parse_p(const std::string& text) {
  if (text.empty()) throw UsageError("missing --p");
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) throw UsageError("--p: expected a number or \"inf\", got \"" + text + "\"");
  if (!(p >= 1.0)) throw std::invalid_argument("--p must be at least 1");
  return p;
}

void cmd_kyfan(Context& c) {
  RectMatrix x = need_matrix(c, c.opt.x, "X");
  const double p = parse_p(c.opt.p);
  if (!c.opt.k) throw UsageError("missing --k");
  KyFanParams params{p, *c.opt.k};
  c.outputs["value"] = kyfan_norm(params, x);
  if (p == 2.0) c.outputs["fantope_identity"] = kyfan_vgf_identity(params, x, c.tol);
}

void cmd_gauge_check(Context& c) {
  ConvexSetSpec s = load_set(c);
  RectMatrix y = need_matrix(c, c.opt.y, "Y");
  VgfInstance inst(s, static_cast<int>(y.rows()), static_cast<int>(y.cols()), c.tol);
  GaugeDecomp d = vgf_gauge_decomp(inst, y);
  c.outputs["vgf_value"] = io::ext_to_json(vgf_eval(inst, y));
  c.outputs["sigma_f"] = io::ext_to_json(d.sigma_f);
  c.outputs["consistent"] = d.consistent;
  if (!d.consistent) c.exit_code = kError;
}

// min (1/2)|mask o (X - target)|^2 + lambda |X|_* through the smoothing reformulation
void cmd_solve(Context& c) {
  RectMatrix target = need_matrix(c, c.opt.x, "X");
  const int n = static_cast<int>(target.rows()), m = static_cast<int>(target.cols());
  RectMatrix mask = RectMatrix::Ones(n, m);
  if (!c.opt.mask.empty()) {
    mask = need_matrix(c, c.opt.mask, "mask");
    expect_shape(mask, n, m, "mask");
  }
  const double lambda = c.opt.lambda.value_or(1.0);
  if (!(lambda > 0.0)) throw std::invalid_argument("--lambda must be positive");
  std::vector<std::pair<int, int>> obs;
  std::vector<double> vals;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) {
      if (mask(i, j) != 0.0 && mask(i, j) != 1.0) throw io::ParseError("mask: entries must be 0 or 1");
      if (mask(i, j) == 1.0) {
        obs.push_back({i, j});
        vals.push_back(target(i, j));
      }
    }
  LeastSquares fit = LeastSquares::mask(n, m, obs, Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  SmoothOptions so;
  if (c.opt.max_iter) so.max_iter = *c.opt.max_iter;
  const SymMatrix ubar = SymMatrix::identity(n) * (0.5 * lambda * lambda);
  SolveTrace tr = solve_smooth(fit, ProblemData::zero(n, m, c.tol), ubar, RectMatrix::Zero(n, m),
                               SymMatrix::identity(n), c.tol, so);
  ObjectiveCertificate cert = objective_certificate(fit, ubar, tr.final_x, tr.final_v, c.tol);
  RectMatrix ref = solve_prox_reference(fit, SymMatrix::identity(n), lambda, RectMatrix::Zero(n, m));
  c.outputs["status"] = to_string(tr.status);
  c.outputs["iterations"] = static_cast<int>(tr.iterates.size());
  c.outputs["objective"] = cert.f_value;
  c.outputs["p_value"] = io::ext_to_json(cert.p_value);
  c.outputs["certificate_gap"] = cert.gap;
  c.outputs["final_x"] = io::matrix_to_json(tr.final_x);
  c.outputs["final_v"] = io::matrix_to_json(tr.final_v.mat());
  c.outputs["reference_distance"] = (tr.final_x - ref).norm();
  if (!c.opt.trace.empty()) {
    std::ofstream os(c.opt.trace);
    if (!os) throw std::runtime_error(c.opt.trace + ": cannot write trace");
    write_trace_csv(tr, os);
  }
  if (tr.status == SolveTrace::Status::Diverged) c.exit_code = kError;
}

// eval_gmf against the direct oracles: on the given input, or on 200 seeded random instances
void cmd_oracle_compare(Context& c) {
  if (!c.opt.x.empty()) {
    RectMatrix x = need_matrix(c, c.opt.x, "X");
    ProblemData pd = problem_data(c, x);
    SymMatrix v = need_sym(c, c.opt.v, "V", pd.n());
    if (!in_int_KA(pd, v, c.tol)) throw std::invalid_argument("oracle-compare needs V in the interior of K_A");
    const double val = eval_gmf(pd, x, v, c.tol).value.to_double();
    const double o1 = eval_gmf_oracle(pd, x, v, c.tol).value.to_double();
    const double o2 = oracle::gmf_value_kkt(pd.A(), pd.B(), x, v.mat());
    GmfGradient g = grad_gmf(pd, x, v, c.tol);
    RectMatrix fx = oracle::fd_gradient([&](const RectMatrix& z) { return eval_gmf(pd, z, v, c.tol).value.to_double(); }, x);
    SymMatrix fv =
        oracle::fd_gradient_sym([&](const SymMatrix& w) { return eval_gmf(pd, x, w, c.tol).value.to_double(); }, v);
    const double err = std::max(std::abs(val - o1), std::abs(val - o2)) / (1.0 + std::abs(val));
    const double gerr =
        ((g.gx - fx).norm() + (g.gv.mat() - fv.mat()).norm()) / std::max(1.0, g.gx.norm() + g.gv.norm());
    c.outputs["value"] = val;
    c.outputs["oracle_value"] = o1;
    c.outputs["kkt_value"] = o2;
    c.outputs["max_rel_error"] = err;
    c.outputs["gradient_rel_error"] = gerr;
    c.outputs["agree"] = err <= 1e-8 && gerr <= 1e-5;
  } else {
    oracle::Rng rng(c.seed);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const int n = oracle::uniform_int(rng, 1, 6), m = oracle::uniform_int(rng, 1, 6), l = oracle::uniform_int(rng, 1, 3);
      ProblemData pd = oracle::random_problem(rng, n, m, l, c.tol);
      SymMatrix v = oracle::random_interior(rng, pd);
      RectMatrix x = oracle::gaussian(rng, n, m);
      const double val = eval_gmf(pd, x, v, c.tol).value.to_double();
      const double err = std::max(std::abs(val - eval_gmf_oracle(pd, x, v, c.tol).value.to_double()),
                                  std::abs(val - oracle::gmf_value_kkt(pd.A(), pd.B(), x, v.mat()))) /
                         (1.0 + std::abs(val));
      worst = std::isnan(err) ? std::numeric_limits<double>::infinity() : std::max(worst, err);
    }
    c.outputs["instances"] = 200;
    c.outputs["max_rel_error"] = worst;
    c.outputs["agree"] = worst <= 1e-8;
  }
  if (!c.outputs["agree"].get<bool>()) c.exit_code = kError;
}

void cmd_selftest(Context& c, std::ostream& err) {
  acceptance::Config cfg{c.seed, c.tol};
  Json rows = Json::array();
  Json secs = Json::array();
  bool all = true;
  for (int id = 1; id <= acceptance::kCriterionCount; ++id) {
    acceptance::CriterionResult r = acceptance::run_criterion(id, cfg);
    err << acceptance::format_line(r) << std::endl;
    rows.push_back(Json{{"id", r.id},
                        {"title", r.title},
                        {"pass", r.pass},
                        {"measured", r.measured},
                        {"tolerance", r.tolerance},
                        {"detail", r.detail}});
    secs.push_back(r.seconds);
    all = all && r.pass;
  }
  c.timing["criterion_seconds"] = secs;
  c.outputs["criteria"] = rows;
  c.outputs["all_pass"] = all;
  if (!all) c.exit_code = kError;
}

Json echo(const Options& o) {
  Json opts = Json::object();
  auto put = [&](const char* k, const std::string& v) {
    if (!v.empty()) opts[k] = v;
  };
  put("A", o.a);
  put("B", o.b);
  put("X", o.x);
  put("V", o.v);
  put("Y", o.y);
  put("bundle", o.bundle);
  put("set", o.set);
  put("mask", o.mask);
  put("trace", o.trace);
  put("p", o.p);
  if (o.k) opts["k"] = *o.k;
  if (o.max_iter) opts["max_iter"] = *o.max_iter;
  if (o.lambda) opts["lambda"] = *o.lambda;
  if (o.assume_ccq) opts["assume_ccq"] = true;
  return Json{{"name", o.command}, {"options", opts}};
}

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("GMFKIT_SEED")) {
    std::string s(env);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) throw UsageError("GMFKIT_SEED: expected a non-negative integer, got \"" + s + "\"");
    return v;
  }
  return kDefaultSeed;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"eval-gmf", "eval-p",      "conjugate", "dual-gap",
                                                 "subdiff",  "cq-report",   "vgf",       "kyfan",
                                                 "gauge-check", "solve",    "oracle-compare", "selftest"};
  return names;
}

const std::vector<std::string>& command_help() {
  static const std::vector<std::string> help = {
      "phi(X, V) with witness; --A/--B (or --bundle), --X, --V",
      "p(X) = inf_V phi(X, V) + h(V); --bundle, --X",
      "p*(Y); --bundle, --Y [--assume-ccq]",
      "p(X) against the dual value; --bundle, --X",
      "one subgradient of p at X with its Fenchel certificate; --bundle, --X",
      "constraint qualification report; --bundle",
      "variational Gram function value, subgradient and conjugate; --set (or --bundle), --Y [--X]",
      "Ky Fan (p, k) norm; --X, --p, --k",
      "squared-gauge representation check; --set (or --bundle), --Y",
      "nuclear-norm regularized completion by smoothing; --X target [--mask] [--lambda] [--max-iter] [--trace]",
      "closed form vs direct oracles; --A/--B/--X/--V, or seeded random instances",
      "run every acceptance criterion; --seed"};
  return help;
}

io::Json strip_timing(io::Json report) {
  report.erase("timing");
  return report;
}

int run(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  Context c{opt};
  std::string error;
  try {
    c.seed = resolve_seed(opt);
    c.tol = with_flags(Tolerances{}, opt);
    static const std::map<std::string, std::function<void(Context&, std::ostream&)>> table = {
        {"eval-gmf", [](Context& x, std::ostream&) { cmd_eval_gmf(x); }},
        {"eval-p", [](Context& x, std::ostream&) { cmd_eval_p(x); }},
        {"conjugate", [](Context& x, std::ostream&) { cmd_conjugate(x); }},
        {"dual-gap", [](Context& x, std::ostream&) { cmd_dual_gap(x); }},
        {"subdiff", [](Context& x, std::ostream&) { cmd_subdiff(x); }},
        {"cq-report", [](Context& x, std::ostream&) { cmd_cq_report(x); }},
        {"vgf", [](Context& x, std::ostream&) { cmd_vgf(x); }},
        {"kyfan", [](Context& x, std::ostream&) { cmd_kyfan(x); }},
        {"gauge-check", [](Context& x, std::ostream&) { cmd_gauge_check(x); }},
        {"solve", [](Context& x, std::ostream&) { cmd_solve(x); }},
        {"oracle-compare", [](Context& x, std::ostream&) { cmd_oracle_compare(x); }},
        {"selftest", [](Context& x, std::ostream& e) { cmd_selftest(x, e); }},
    };
    auto it = table.find(opt.command);
    if (it == table.end()) throw UsageError("unknown command \"" + opt.command + "\"");
    it->second(c, err);
  } catch (const UndecidedError& e) {
    c.exit_code = kUndecided;
    c.outputs = Json{{"undecided", e.what()}};
  } catch (const std::exception& e) {
    c.exit_code = kError;
    error = e.what();
    c.outputs = Json{{"error", error}};
  }
  for (const std::string& w : c.warnings) err << "warning: " << w << "\n";
  if (!error.empty()) err << "error: " << error << "\n";

  Json report{{"command", echo(opt)},
              {"inputs_digest", io::fnv1a_hex(c.digest_bytes)},
              {"seed", c.seed},
              {"tolerances", io::tol_to_json(c.tol)},
              {"warnings", c.warnings},
              {"outputs", c.outputs},
              {"exit_code", c.exit_code}};
  c.timing["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report["timing"] = c.timing;
  const std::string text = io::dump(report) + "\n";
  if (opt.out.empty()) {
    out << text;
  } else {
    std::ofstream f(opt.out);
    if (!f) {
      err << "error: " << opt.out << ": cannot write report\n";
      return kError;
    }
    f << text;
  }
  return c.exit_code;
}

}  // namespace gmfkit::cli
