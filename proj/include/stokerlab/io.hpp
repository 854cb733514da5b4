#pragma once

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "stokerlab/polyhedron.hpp"
#include "stokerlab/repvar.hpp"
#include "stokerlab/tolerances.hpp"

// File formats:
//   polyhedron  {"vertices": [[x,y,z], ...], "faces": [[i,j,k,...], ...]}
//   matrices    {"matrices": [[[[re,im],[re,im]],[[re,im],[re,im]]], ...]}
//   angles      {"angles": [a_0, ...]} or a bare array
//   presentation text, one directive per line:
//     gens <n>
//     rel <signed indices>
//     loop <signed indices>
//   with '#' starting a comment.

namespace stokerlab::io {

using Json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out << text;
}

/// FNV-1a, 64 bit, as 16 hex digits.
inline std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

namespace detail {

inline std::string position_of(const std::string& text, std::size_t byte) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw Error(ErrorKind::ParseError, what + ": malformed JSON at " + position_of(text, byte));
  }
}

[[noreturn]] inline void schema_error(const std::string& what, const std::string& msg) {
  throw Error(ErrorKind::ParseError, what + ": " + msg);
}

inline double number(const Json& j, const std::string& what, const std::string& where) {
  if (!j.is_number()) schema_error(what, where + " is not a number");
  return j.get<double>();
}

}  // namespace detail

/// Raw polyhedron data, before combinatorial validation.
struct PolyhedronData {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
};

inline PolyhedronData parse_polyhedron_data(const std::string& text, const std::string& what = "polyhedron") {
  const Json j = detail::parse_json(text, what);
  if (!j.is_object()) detail::schema_error(what, "top level must be an object");
  if (!j.contains("vertices") || !j["vertices"].is_array()) detail::schema_error(what, "missing array 'vertices'");
  if (!j.contains("faces") || !j["faces"].is_array()) detail::schema_error(what, "missing array 'faces'");
  PolyhedronData data;
  for (std::size_t v = 0; v < j["vertices"].size(); ++v) {
    const Json& row = j["vertices"][v];
    const std::string where = "vertices[" + std::to_string(v) + "]";
    if (!row.is_array() || row.size() != 3) detail::schema_error(what, where + " must have 3 coordinates");
    data.vertices.emplace_back(detail::number(row[0], what, where), detail::number(row[1], what, where),
                               detail::number(row[2], what, where));
  }
  for (std::size_t f = 0; f < j["faces"].size(); ++f) {
    const Json& row = j["faces"][f];
    const std::string where = "faces[" + std::to_string(f) + "]";
    if (!row.is_array()) detail::schema_error(what, where + " must be an array");
    Face face;
    for (const Json& idx : row) {
      if (!idx.is_number_integer()) detail::schema_error(what, where + " has a non-integer index");
      face.push_back(idx.get<int>());
    }
    data.faces.push_back(std::move(face));
  }
  return data;
}

/// Parses and builds the combinatorics; the embedding itself is not validated.
inline EmbeddedPolyhedron parse_polyhedron(const std::string& text, const std::string& what = "polyhedron") {
  PolyhedronData data = parse_polyhedron_data(text, what);
  const int n = static_cast<int>(data.vertices.size());
  return EmbeddedPolyhedron(CombinatorialType::from_faces(n, std::move(data.faces)), std::move(data.vertices));
}

inline Json polyhedron_json(const EmbeddedPolyhedron& p) {
  Json j;
  j["vertices"] = Json::array();
  for (const Vec3& x : p.positions) j["vertices"].push_back({x(0), x(1), x(2)});
  j["faces"] = Json::array();
  for (const Face& f : p.comb().faces()) j["faces"].push_back(f);
  return j;
}

/// Shortest round-trip decimal form for every double.
inline std::string emit_polyhedron(const EmbeddedPolyhedron& p) { return polyhedron_json(p).dump(2) + "\n"; }

inline std::vector<double> parse_angles(const std::string& text, const std::string& what = "angles") {
  const Json j = detail::parse_json(text, what);
  const Json& arr = j.is_object() && j.contains("angles") ? j["angles"] : j;
  if (!arr.is_array()) detail::schema_error(what, "expected an array of angles");
  std::vector<double> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(detail::number(arr[i], what, "angles[" + std::to_string(i) + "]"));
  return out;
}

struct PresentationFile {
  Presentation presentation;
  std::vector<Word> loops;
};

inline PresentationFile parse_presentation(const std::string& text, const std::string& what = "presentation") {
  PresentationFile out;
  bool have_gens = false;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::ParseError, what + ": line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(lines, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string keyword;
    if (!(tokens >> keyword)) continue;
    std::vector<int> values;
    std::string tok;
    while (tokens >> tok) {
      std::size_t used = 0;
      int value = 0;
      try {
        value = std::stoi(tok, &used);
      } catch (const std::exception&) {
        fail("'" + tok + "' is not an integer");
      }
      if (used != tok.size()) fail("'" + tok + "' is not an integer");
      values.push_back(value);
    }
    if (keyword == "gens") {
      if (have_gens) fail("duplicate 'gens'");
      if (values.size() != 1 || values[0] < 0) fail("'gens' takes one non-negative count");
      out.presentation.generator_count = values[0];
      have_gens = true;
    } else if (keyword == "rel" || keyword == "loop") {
      if (!have_gens) fail("'" + keyword + "' before 'gens'");
      if (values.empty()) fail("empty word");
      for (int letter : values)
        if (letter == 0 || std::abs(letter) > out.presentation.generator_count)
          fail("letter " + std::to_string(letter) + " out of range");
      (keyword == "rel" ? out.presentation.relators : out.loops).push_back(values);
    } else {
      fail("unknown directive '" + keyword + "'");
    }
  }
  if (!have_gens) throw Error(ErrorKind::ParseError, what + ": missing 'gens'");
  return out;
}

inline std::string emit_presentation(const PresentationFile& file) {
  std::ostringstream out;
  out << "gens " << file.presentation.generator_count << "\n";
  auto word = [&out](const char* key, const Word& w) {
    out << key;
    for (int letter : w) out << ' ' << letter;
    out << "\n";
  };
  for (const Word& r : file.presentation.relators) word("rel", r);
  for (const Word& l : file.loops) word("loop", l);
  return out.str();
}

inline Representation parse_matrices(const std::string& text, const std::string& what = "matrices") {
  const Json j = detail::parse_json(text, what);
  if (!j.is_object() || !j.contains("matrices") || !j["matrices"].is_array())
    detail::schema_error(what, "missing array 'matrices'");
  Representation rho;
  for (std::size_t g = 0; g < j["matrices"].size(); ++g) {
    const Json& m = j["matrices"][g];
    const std::string where = "matrices[" + std::to_string(g) + "]";
    if (!m.is_array() || m.size() != 2) detail::schema_error(what, where + " must be 2x2");
    Mat2c mat;
    for (int r = 0; r < 2; ++r) {
      if (!m[r].is_array() || m[r].size() != 2) detail::schema_error(what, where + " must be 2x2");
      for (int c = 0; c < 2; ++c) {
        const Json& z = m[r][c];
        if (z.is_number()) mat(r, c) = Complex(z.get<double>(), 0.0);
        else if (z.is_array() && z.size() == 2)
          mat(r, c) = Complex(detail::number(z[0], what, where), detail::number(z[1], what, where));
        else detail::schema_error(what, where + " entries must be numbers or [re, im]");
      }
    }
    rho.images.push_back(mat);
  }
  return rho;
}

inline Json complex_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Json matrix_json(const Mat2c& m) {
  return Json::array({Json::array({complex_json(m(0, 0)), complex_json(m(0, 1))}),
                      Json::array({complex_json(m(1, 0)), complex_json(m(1, 1))})});
}

inline std::string emit_matrices(const Representation& rho) {
  Json j;
  j["matrices"] = Json::array();
  for (const Mat2c& m : rho.images) j["matrices"].push_back(matrix_json(m));
  return j.dump(2) + "\n";
}

inline Json vector_json(const Eigen::VectorXd& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

inline Json tolerances_json(const Tolerances& t) {
  return Json{{"ball", t.ball},
              {"norm", t.norm},
              {"iso", t.iso},
              {"axis", t.axis},
              {"light", t.light},
              {"rank_degenerate", t.rank_degenerate},
              {"planar", t.planar},
              {"convex", t.convex},
              {"rank_rel", t.rank_rel},
              {"principal_angle", t.principal_angle},
              {"relator", t.relator},
              {"det", t.det},
              {"irreducible", t.irreducible}};
}

/// Serialized result of one command. Every verdict records the value judged,
/// the tolerance and the comparison used.
class RunReport {
 public:
  RunReport(std::string command, const Tolerances& tol) : command_(std::move(command)), tol_(tol) {}

  void add_input(const std::string& role, const std::string& path, const std::string& bytes) {
    inputs_.push_back({{"role", role}, {"path", path}, {"digest", digest(bytes)}});
  }

  Json& config() { return config_; }
  Json& results() { return results_; }

  /// `relation` is one of "<", "<=", ">", ">=", "==".
  bool verdict(const std::string& name, double value, const std::string& relation, double tolerance) {
    bool pass = false;
    if (relation == "<") pass = value < tolerance;
    else if (relation == "<=") pass = value <= tolerance;
    else if (relation == ">") pass = value > tolerance;
    else if (relation == ">=") pass = value >= tolerance;
    else if (relation == "==") pass = value == tolerance;
    verdicts_.push_back({{"name", name}, {"value", value}, {"relation", relation}, {"tolerance", tolerance}, {"pass", pass}});
    return pass;
  }

  void fail(ErrorKind kind, const std::string& message) {
    errors_.push_back({{"kind", std::string(to_string(kind))}, {"message", message}});
  }

  bool all_pass() const {
    if (!errors_.empty()) return false;
    for (const Json& v : verdicts_)
      if (!v["pass"].get<bool>()) return false;
    return true;
  }

  Json json() const {
    Json j;
    j["command"] = command_;
    j["inputs"] = inputs_;
    j["config"] = config_;
    j["tolerances"] = tolerances_json(tol_);
    j["results"] = results_;
    j["verdicts"] = verdicts_;
    j["errors"] = errors_;
    j["pass"] = all_pass();
    return j;
  }

  std::string dump() const { return json().dump(2) + "\n"; }

 private:
  std::string command_;
  Tolerances tol_;
  Json inputs_ = Json::array();
  Json config_ = Json::object();
  Json results_ = Json::object();
  Json verdicts_ = Json::array();
  Json errors_ = Json::array();
};

}  // namespace stokerlab::io
