#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmfkit/hset.hpp"
#include "gmfkit/infproj.hpp"

namespace gmfkit::io {

using Json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Whole file as bytes; ParseError when it cannot be opened.
std::string read_text(const std::string& path);
// JSON text to a value; ParseError prefixed with `where`.
Json parse_json(const std::string& text, const std::string& where);

// CSV text: comma-separated decimals, one row per line, no header. `where` prefixes messages.
RectMatrix parse_matrix_csv(const std::string& text, const std::string& where = "<csv>");
RectMatrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const RectMatrix& m, std::ostream& os);

// Symmetrizes; appends a warning when the asymmetry exceeds feas_abs.
SymMatrix to_symmetric(const RectMatrix& m, const Tolerances& tol, std::vector<std::string>* warnings,
                       const std::string& name);

Json matrix_to_json(const RectMatrix& m);
RectMatrix matrix_from_json(const Json& j, const std::string& where);

Json ext_to_json(const ExtReal& x);  // number, or "+inf" / "-inf"
ExtReal ext_from_json(const Json& j, const std::string& where);

Json set_to_json(const ConvexSetSpec& s);
ConvexSetSpec set_from_json(const Json& j, const std::string& where = "set");

Json h_to_json(const HSpec& h);
HSpec h_from_json(const Json& j, const std::string& where = "h");

Json tol_to_json(const Tolerances& t);
Tolerances tol_from_json(const Json& j, const Tolerances& base = {});

struct Bundle {
  RectMatrix a, b;
  HSpec h;
  Tolerances tol;
  std::vector<std::string> warnings;

  InfProjProblem problem() const;
};

Json bundle_to_json(const Bundle& b);
Bundle bundle_from_json(const Json& j);
Bundle read_bundle(const std::string& path);

// Deterministic text with every number printed as %.17g.
std::string dump(const Json& j, int indent = 2);

// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace gmfkit::io
