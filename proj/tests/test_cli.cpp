#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "helpers.hpp"

using namespace gmfkit;
using gmfkit::cli::Options;

namespace {
const std::string kData = GMFKIT_DATA_DIR;

struct Result {
  int code;
  io::Json report;
  std::string err;
};

Result run(Options opt) {
  std::ostringstream out, err;
  int code = cli::run(opt, out, err);
  io::Json j = out.str().empty() ? io::Json() : io::parse_json(out.str(), "report");
  return {code, j, err.str()};
}

Options cmd(const std::string& name) {
  Options o;
  o.command = name;
  return o;
}

std::string temp_file(const std::string& name, const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / ("gmfkit_test_" + name);
  std::ofstream(p) << text;
  return p.string();
}
}  // namespace

TEST_CASE("eval-gmf on the scalar example") {
  Options o = cmd("eval-gmf");
  o.a = o.b = "zero";
  o.x = kData + "/x1.csv";
  o.v = kData + "/v2.csv";
  Result r = run(o);
  CHECK(r.code == 0);
  CHECK(r.report["outputs"]["value"] == 0.25);
  CHECK(r.report["outputs"]["witness_y"][0][0] == 0.5);
  CHECK(r.report["command"]["name"] == "eval-gmf");
  CHECK(r.report["inputs_digest"].get<std::string>().size() == 16);
}

TEST_CASE("cq-report on the improper bundle") {
  Options o = cmd("cq-report");
  o.bundle = kData + "/improper.json";
  Result r = run(o);
  CHECK(r.code == 0);
  CHECK(r.report["outputs"]["bpcq"] == "Fails");
}

TEST_CASE("eval-p reports -inf with a ray") {
  Options o = cmd("eval-p");
  o.bundle = kData + "/improper.json";
  o.x = kData + "/x1.csv";
  Result r = run(o);
  CHECK(r.report["outputs"]["value"] == "-inf");
  CHECK(r.report["outputs"]["unbounded_certificate"].is_array());
}

TEST_CASE("kyfan on diag(3, 4)") {
  Options o = cmd("kyfan");
  o.x = kData + "/diag340.csv";
  o.p = "1";
  o.k = 2;
  CHECK(run(o).report["outputs"]["value"] == 7.0);
  o.p = "2";
  Result r = run(o);
  CHECK(r.report["outputs"]["value"] == 5.0);
  CHECK(r.report["outputs"]["fantope_identity"] == true);
  o.p = "inf";
  o.k = 1;
  CHECK(run(o).report["outputs"]["value"] == 4.0);
  o.p = "abc";
  CHECK(run(o).code == cli::kError);
}

TEST_CASE("reports are identical apart from timing") {
  Options o = cmd("oracle-compare");
  o.seed = 5;
  Result a = run(o), b = run(o);
  CHECK(a.code == 0);
  CHECK(io::dump(cli::strip_timing(a.report)) == io::dump(cli::strip_timing(b.report)));
  CHECK(a.report["seed"] == 5);
  CHECK(a.report.contains("timing"));
  CHECK_FALSE(cli::strip_timing(a.report).contains("timing"));
}

TEST_CASE("seed precedence: flag, then environment, then default") {
  Options o = cmd("kyfan");
  o.x = kData + "/diag340.csv";
  o.p = "1";
  o.k = 1;
  ::unsetenv("GMFKIT_SEED");
  CHECK(run(o).report["seed"] == cli::kDefaultSeed);
  ::setenv("GMFKIT_SEED", "77", 1);
  CHECK(run(o).report["seed"] == 77);
  o.seed = 3;
  CHECK(run(o).report["seed"] == 3);
  o.seed.reset();
  ::setenv("GMFKIT_SEED", "x7", 1);
  CHECK(run(o).code == cli::kError);
  ::unsetenv("GMFKIT_SEED");
}

TEST_CASE("undecided outcomes exit with 2") {
  Options o = cmd("vgf");
  o.set = R"({"variant": "ray", "D": [[1, 0], [0, 0]]})";
  o.y = kData + "/x23.csv";
  o.x = kData + "/x23.csv";
  Result r = run(o);
  CHECK(r.code == cli::kUndecided);
  CHECK(r.report["outputs"].contains("undecided"));

  Options g = cmd("gauge-check");
  g.set = R"({"variant": "hull", "vertices": [[[0, 0], [0, 0]], [[1, 0], [0, 1]]]})";
  g.y = kData + "/x23.csv";
  CHECK(run(g).code == cli::kUndecided);
}

TEST_CASE("errors exit with 1 and say where") {
  Options o = cmd("eval-p");
  o.bundle = temp_file("bad.json", "{\"A\": [[1, 0]],\n \"B\": ");
  o.x = kData + "/x1.csv";
  Result r = run(o);
  CHECK(r.code == cli::kError);
  CHECK(r.err.find("bad.json") != std::string::npos);
  CHECK(r.err.find("line 2") != std::string::npos);

  Options d = cmd("eval-gmf");
  d.a = d.b = "zero";
  d.x = kData + "/x23.csv";
  d.v = kData + "/v2.csv";
  Result dr = run(d);
  CHECK(dr.code == cli::kError);
  CHECK(dr.err.find("dimension mismatch") != std::string::npos);

  CHECK(run(cmd("no-such-command")).code == cli::kError);
  CHECK(run(cmd("eval-p")).code == cli::kError);
}

TEST_CASE("tolerance flags override the bundle and are validated") {
  Options o = cmd("cq-report");
  o.bundle = kData + "/improper.json";
  o.tol_conj = 1e-4;
  CHECK(run(o).report["tolerances"]["conj_rel"] == 1e-4);
  o.tol_psd = 0.5;
  CHECK(run(o).code == cli::kError);
}

TEST_CASE("asymmetric V warns") {
  Options o = cmd("eval-gmf");
  o.a = o.b = "zero";
  o.x = temp_file("x2.csv", "1\n1\n");
  o.v = temp_file("v_asym.csv", "2,1\n0,2\n");
  Result r = run(o);
  CHECK(r.code == 0);
  CHECK(r.report["warnings"].size() == 1);
  CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("report goes to --out when given") {
  Options o = cmd("kyfan");
  o.x = kData + "/diag340.csv";
  o.p = "1";
  o.k = 2;
  o.out = (std::filesystem::temp_directory_path() / "gmfkit_test_report.json").string();
  std::ostringstream out, err;
  CHECK(cli::run(o, out, err) == 0);
  CHECK(out.str().empty());
  CHECK(io::parse_json(io::read_text(o.out), "out")["outputs"]["value"] == 7.0);
}

TEST_CASE("solve writes a trace and matches its reference") {
  Options o = cmd("solve");
  o.x = kData + "/completion_target.csv";
  o.mask = kData + "/completion_mask.csv";
  o.lambda = 0.5;
  o.trace = (std::filesystem::temp_directory_path() / "gmfkit_test_trace.csv").string();
  Result r = run(o);
  CHECK(r.code == 0);
  CHECK(r.report["outputs"]["status"] == "Converged");
  CHECK(r.report["outputs"]["reference_distance"].get<double>() <= 1e-4);
  CHECK(io::read_text(o.trace).rfind("iter,F,grad_norm,min_eig_V", 0) == 0);
  o.lambda = -1.0;
  CHECK(run(o).code == cli::kError);
}

TEST_CASE("the remaining bundle commands") {
  Options o = cmd("dual-gap");
  o.bundle = kData + "/nuclear.json";
  o.x = kData + "/x23.csv";
  Result r = run(o);
  CHECK(r.report["outputs"]["zero_gap"] == true);
  o.command = "subdiff";
  CHECK(run(o).code == 0);
  o.command = "conjugate";
  o.x.clear();
  o.y = kData + "/x23.csv";
  CHECK(run(o).report["outputs"]["value"] == "+inf");
}

TEST_CASE("every command has help text") {
  CHECK(cli::command_names().size() == 12);
  CHECK(cli::command_help().size() == cli::command_names().size());
}
