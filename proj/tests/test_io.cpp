#include <sstream>

#include "helpers.hpp"
#include "gmfkit/io.hpp"

using namespace gmfkit;
using namespace gmfkit::test;

TEST_CASE("CSV round trip is exact") {
  Rng rng(71);
  for (int i = 0; i < 20; ++i) {
    RectMatrix m = oracle::gaussian(rng, oracle::uniform_int(rng, 1, 5), oracle::uniform_int(rng, 1, 5)) * 1e3;
    m(0, 0) = 0.1;
    std::ostringstream os;
    io::write_matrix_csv(m, os);
    CHECK(io::parse_matrix_csv(os.str()) == m);
  }
}

TEST_CASE("CSV errors carry a location") {
  try {
    io::parse_matrix_csv("1,2\n3\n", "m.csv");
    FAIL("expected a parse error");
  } catch (const io::ParseError& e) {
    CHECK(std::string(e.what()).find("m.csv") != std::string::npos);
    CHECK(std::string(e.what()).find("m.csv:2") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_matrix_csv("1,x\n"), io::ParseError);
  CHECK_THROWS_AS(io::parse_matrix_csv(""), io::ParseError);
  CHECK_THROWS_AS(io::read_matrix_csv("/nonexistent/file.csv"), io::ParseError);
}

TEST_CASE("asymmetric input is symmetrized with a warning") {
  std::vector<std::string> warnings;
  SymMatrix s = io::to_symmetric(mat(2, 2, {1, 2, 0, 1}), {}, &warnings, "V");
  CHECK(s(0, 1) == 1.0);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("V") == 0);
  warnings.clear();
  io::to_symmetric(mat(2, 2, {1, 2, 2, 1}), {}, &warnings, "V");
  CHECK(warnings.empty());
}

TEST_CASE("set and h specs round trip through JSON") {
  Rng rng(72);
  const std::vector<ConvexSetSpec> sets = {set::Singleton{oracle::random_sym(rng, 2)},
                                           set::SpectralBox{-1.0, 0.5},
                                           set::TraceBall{2.0},
                                           set::Fantope{1},
                                           set::Hull{{oracle::random_sym(rng, 2), SymMatrix::zero(2)}},
                                           set::Ray{oracle::random_sym(rng, 2)},
                                           set::ShiftedPSDCap{oracle::random_spd(rng, 2)}};
  for (const auto& s : sets) {
    io::Json j = io::set_to_json(s);
    CHECK(io::dump(io::set_to_json(io::set_from_json(j))) == io::dump(j));
    io::Json h = io::h_to_json(hfun::Support{s});
    CHECK(io::dump(io::h_to_json(io::h_from_json(h))) == io::dump(h));
  }
  CHECK_THROWS_AS(io::set_from_json(io::Json{{"variant", "disc"}}), io::ParseError);
  CHECK_THROWS_AS(io::set_from_json(io::Json{{"variant", "fantope"}, {"k", 1.5}}), io::ParseError);
  CHECK_THROWS_AS(io::h_from_json(io::Json{{"kind", "linear"}}), io::ParseError);
}

TEST_CASE("bundles round trip and keep tolerances") {
  io::Bundle b{mat(1, 2, {1, 0}), mat(1, 1, {2}), hfun::Linear{SymMatrix::identity(2)}, {}, {}};
  b.tol.conj_rel = 1e-5;
  io::Bundle c = io::bundle_from_json(io::bundle_to_json(b));
  CHECK(c.a == b.a);
  CHECK(c.b == b.b);
  CHECK(c.tol.conj_rel == 1e-5);
  CHECK(c.problem().pd.n() == 2);
  CHECK_THROWS_AS(io::bundle_from_json(io::Json{{"A", {{1}}}}), io::ParseError);
}

TEST_CASE("partial tolerance objects override only the given fields") {
  Tolerances t = io::tol_from_json(io::Json{{"psd_abs", 1e-7}});
  CHECK(t.psd_abs == 1e-7);
  CHECK(t.rank_rel == Tolerances{}.rank_rel);
}

TEST_CASE("extended reals in JSON") {
  CHECK(io::ext_to_json(ExtReal::plus_inf()) == "+inf");
  CHECK(io::ext_from_json(io::Json("-inf"), "x").is_minus_inf());
  CHECK(io::ext_from_json(io::Json(0.5), "x") == ExtReal::finite(0.5));
  CHECK_THROWS_AS(io::ext_from_json(io::Json("inf"), "x"), io::ParseError);
}

TEST_CASE("dump prints round-trip digits and is stable") {
  io::Json j{{"b", 0.1}, {"a", {1, 2}}};
  CHECK(io::dump(j, 0).find("0.10000000000000001") != std::string::npos);
  CHECK(io::dump(j) == io::dump(io::parse_json(io::dump(j), "t")));
}

TEST_CASE("JSON parse errors name the source") {
  try {
    io::parse_json("{\"a\": [1,", "bundle.json");
    FAIL("expected a parse error");
  } catch (const io::ParseError& e) {
    CHECK(std::string(e.what()).find("bundle.json") != std::string::npos);
  }
}

TEST_CASE("FNV-1a reference values") {
  CHECK(io::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(io::fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(io::fnv1a_hex("foobar") == "85944171f73967e8");
}
