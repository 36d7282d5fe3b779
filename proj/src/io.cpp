#include "gmfkit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gmfkit::io {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double number_at(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where + ": non-finite entry");
  return v;
}

SymMatrix sym_field(const Json& j, const char* key, const std::string& where, std::vector<std::string>* warn) {
  if (!j.contains(key)) throw ParseError(where + ": missing field \"" + key + "\"");
  std::string w = where + "." + key;
  RectMatrix m = matrix_from_json(j.at(key), w);
  if (m.rows() != m.cols()) throw ParseError(w + ": matrix must be square");
  return to_symmetric(m, Tolerances{}, warn, w);
}

void format_number(double v, std::string& out) {
  if (!std::isfinite(v)) {
    out += v > 0 ? "\"+inf\"" : (v < 0 ? "\"-inf\"" : "null");
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void dump_rec(const Json& j, int indent, int depth, std::string& out) {
  auto pad = [&](int d) {
    if (indent > 0) {
      out += '\n';
      out.append(static_cast<size_t>(d * indent), ' ');
    }
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        pad(depth + 1);
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_rec(it.value(), indent, depth + 1, out);
      }
      pad(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // rows of numbers stay on one line
      bool flat = true;
      for (const auto& e : j)
        if (e.is_structured()) flat = false;
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) pad(depth + 1);
        dump_rec(e, indent, depth + 1, out);
      }
      if (!flat) pad(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      format_number(j.get<double>(), out);
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

RectMatrix parse_matrix_csv(const std::string& text, const std::string& where) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    int col = 0;
    while (std::getline(ls, cell, ',')) {
      ++col;
      std::string c = trim(cell);
      std::string loc = where + ":" + std::to_string(lineno) + ":" + std::to_string(col);
      if (c.empty()) throw ParseError(loc + ": empty entry");
      size_t used = 0;
      double v;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        throw ParseError(loc + ": not a number: \"" + c + "\"");
      }
      if (used != c.size()) throw ParseError(loc + ": not a number: \"" + c + "\"");
      if (!std::isfinite(v)) throw ParseError(loc + ": NaN or Inf entry");
      row.push_back(v);
    }
    if (!line.empty() && trim(line).back() == ',')
      throw ParseError(where + ":" + std::to_string(lineno) + ": trailing comma");
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(where + ":" + std::to_string(lineno) + ": ragged row (" + std::to_string(row.size()) +
                       " entries, expected " + std::to_string(rows.front().size()) + ")");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(where + ": empty matrix");
  RectMatrix m(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  return m;
}

std::string read_text(const std::string& path) { return slurp(path); }

Json parse_json(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(where + ": " + e.what());
  }
}

RectMatrix read_matrix_csv(const std::string& path) { return parse_matrix_csv(slurp(path), path); }

void write_matrix_csv(const RectMatrix& m, std::ostream& os) {
  char buf[40];
  for (int i = 0; i < m.rows(); ++i) {
    for (int k = 0; k < m.cols(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, k));
      os << (k ? "," : "") << buf;
    }
    os << '\n';
  }
}

SymMatrix to_symmetric(const RectMatrix& m, const Tolerances& tol, std::vector<std::string>* warnings,
                       const std::string& name) {
  if (m.rows() != m.cols()) throw ParseError(name + ": symmetric input must be square");
  double asym = SymMatrix::asymmetry(m);
  if (asym > tol.feas_abs && warnings)
    warnings->push_back(name + ": asymmetric input symmetrized (asymmetry " + std::to_string(asym) + ")");
  return SymMatrix(m);
}

Json matrix_to_json(const RectMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

RectMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a nonempty array of rows");
  const size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw ParseError(where + ": rows must be nonempty arrays");
  RectMatrix m(j.size(), cols);
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string wr = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array()) throw ParseError(wr + ": expected an array");
    if (j[i].size() != cols) throw ParseError(wr + ": ragged row");
    for (size_t k = 0; k < cols; ++k) m(i, k) = number_at(j[i][k], wr + "[" + std::to_string(k) + "]");
  }
  return m;
}

Json ext_to_json(const ExtReal& x) {
  if (x.is_plus_inf()) return "+inf";
  if (x.is_minus_inf()) return "-inf";
  return x.value();
}

ExtReal ext_from_json(const Json& j, const std::string& where) {
  if (j.is_string()) {
    if (j == "+inf") return ExtReal::plus_inf();
    if (j == "-inf") return ExtReal::minus_inf();
    throw ParseError(where + ": expected a number, \"+inf\" or \"-inf\"");
  }
  return ExtReal::finite(number_at(j, where));
}

Json set_to_json(const ConvexSetSpec& s) {
  Json j;
  j["variant"] = set_name(s);
  std::visit(overloaded{
                 [&](const set::Singleton& x) { j["U"] = matrix_to_json(x.u.mat()); },
                 [&](const set::SpectralBox& x) {
                   j["lo"] = x.lo;
                   j["hi"] = x.hi;
                 },
                 [&](const set::TraceBall& x) { j["r"] = x.r; },
                 [&](const set::Fantope& x) { j["k"] = x.k; },
                 [&](const set::Hull& x) {
                   Json v = Json::array();
                   for (const auto& u : x.vertices) v.push_back(matrix_to_json(u.mat()));
                   j["vertices"] = std::move(v);
                 },
                 [&](const set::Ray& x) { j["D"] = matrix_to_json(x.d.mat()); },
                 [&](const set::ShiftedPSDCap& x) { j["U"] = matrix_to_json(x.u.mat()); },
             },
             s);
  return j;
}

ConvexSetSpec set_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  if (!j.contains("variant") || !j["variant"].is_string()) throw ParseError(where + ": missing \"variant\" tag");
  const std::string tag = j["variant"];
  auto num = [&](const char* key) {
    if (!j.contains(key)) throw ParseError(where + ": missing field \"" + key + "\"");
    return number_at(j[key], where + "." + key);
  };
  if (tag == "singleton") return set::Singleton{sym_field(j, "U", where, nullptr)};
  if (tag == "spectral_box") return set::SpectralBox{num("lo"), num("hi")};
  if (tag == "trace_ball") return set::TraceBall{num("r")};
  if (tag == "fantope") {
    double k = num("k");
    if (k != std::floor(k)) throw ParseError(where + ".k: expected an integer");
    return set::Fantope{static_cast<int>(k)};
  }
  if (tag == "hull") {
    if (!j.contains("vertices") || !j["vertices"].is_array() || j["vertices"].empty())
      throw ParseError(where + ": hull needs a nonempty \"vertices\" array");
    set::Hull h;
    for (size_t i = 0; i < j["vertices"].size(); ++i) {
      std::string w = where + ".vertices[" + std::to_string(i) + "]";
      RectMatrix m = matrix_from_json(j["vertices"][i], w);
      h.vertices.push_back(to_symmetric(m, Tolerances{}, nullptr, w));
    }
    return h;
  }
  if (tag == "ray") return set::Ray{sym_field(j, "D", where, nullptr)};
  if (tag == "shifted_psd_cap") return set::ShiftedPSDCap{sym_field(j, "U", where, nullptr)};
  throw ParseError(where + ": unknown variant tag \"" + tag + "\"");
}

Json h_to_json(const HSpec& h) {
  Json j;
  std::visit(overloaded{
                 [&](const hfun::Linear& x) {
                   j["kind"] = "linear";
                   j["U"] = matrix_to_json(x.u.mat());
                 },
                 [&](const hfun::Indicator& x) {
                   j["kind"] = "indicator";
                   j["set"] = set_to_json(x.set);
                 },
                 [&](const hfun::Support& x) {
                   j["kind"] = "support";
                   j["set"] = set_to_json(x.set);
                 },
             },
             h);
  return j;
}

HSpec h_from_json(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ParseError(where + ": expected an object with a \"kind\" tag");
  const std::string kind = j["kind"];
  if (kind == "linear") return hfun::Linear{sym_field(j, "U", where, nullptr)};
  if (kind == "indicator" || kind == "support") {
    if (!j.contains("set")) throw ParseError(where + ": missing \"set\"");
    ConvexSetSpec s = set_from_json(j["set"], where + ".set");
    if (kind == "indicator") return hfun::Indicator{std::move(s)};
    return hfun::Support{std::move(s)};
  }
  throw ParseError(where + ": unknown kind \"" + kind + "\"");
}

Json tol_to_json(const Tolerances& t) {
  return Json{{"rank_rel", t.rank_rel}, {"psd_abs", t.psd_abs}, {"feas_abs", t.feas_abs}, {"conj_rel", t.conj_rel}};
}

Tolerances tol_from_json(const Json& j, const Tolerances& base) {
  Tolerances t = base;
  if (j.is_null()) return t;
  if (!j.is_object()) throw ParseError("tol: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    double v = number_at(it.value(), "tol." + it.key());
    if (it.key() == "rank_rel") t.rank_rel = v;
    else if (it.key() == "psd_abs") t.psd_abs = v;
    else if (it.key() == "feas_abs") t.feas_abs = v;
    else if (it.key() == "conj_rel") t.conj_rel = v;
    else throw ParseError("tol: unknown field \"" + it.key() + "\"");
  }
  return t;
}

InfProjProblem Bundle::problem() const { return InfProjProblem(ProblemData(a, b, tol), h, tol); }

Json bundle_to_json(const Bundle& b) {
  return Json{{"A", matrix_to_json(b.a)}, {"B", matrix_to_json(b.b)}, {"h", h_to_json(b.h)}, {"tol", tol_to_json(b.tol)}};
}

Bundle bundle_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("bundle: expected an object");
  for (const char* key : {"A", "B", "h"})
    if (!j.contains(key)) throw ParseError(std::string("bundle: missing field \"") + key + "\"");
  Bundle b{matrix_from_json(j["A"], "A"), matrix_from_json(j["B"], "B"), h_from_json(j["h"]), {}, {}};
  if (j.contains("tol")) b.tol = tol_from_json(j["tol"]);
  if (b.a.rows() != b.b.rows()) throw ParseError("bundle: A and B must have the same number of rows");
  // re-read symmetric fields with the bundle tolerance so warnings are reported
  auto check = [&](const Json& m, const std::string& w) {
    to_symmetric(matrix_from_json(m, w), b.tol, &b.warnings, w);
  };
  const Json& h = j["h"];
  if (h.contains("U")) check(h["U"], "h.U");
  if (h.contains("set")) {
    const Json& s = h["set"];
    for (const char* key : {"U", "D"})
      if (s.contains(key)) check(s[key], std::string("h.set.") + key);
    if (s.contains("vertices"))
      for (size_t i = 0; i < s["vertices"].size(); ++i)
        check(s["vertices"][i], "h.set.vertices[" + std::to_string(i) + "]");
  }
  return b;
}

Bundle read_bundle(const std::string& path) {
  Json j = parse_json(slurp(path), path);
  try {
    return bundle_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gmfkit::io
