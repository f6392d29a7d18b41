#pragma once

// Flat key=value report documents, TSV tables, and the JSON space file.

#include "covlab/builders.hpp"
#include "covlab/constants.hpp"
#include "covlab/covering.hpp"
#include "covlab/maximal.hpp"
#include "covlab/numeric.hpp"
#include "covlab/space.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace covlab {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// Ordered key=value lines. '#' starts a comment line.
class KvDocument {
 public:
  void set(const std::string& key, std::string value) {
    for (auto& kv : entries_)
      if (kv.first == key) {
        kv.second = std::move(value);
        return;
      }
    entries_.emplace_back(key, std::move(value));
  }
  std::optional<std::string> get(const std::string& key) const {
    for (const auto& kv : entries_)
      if (kv.first == key) return kv.second;
    return std::nullopt;
  }
  const std::string& require(const std::string& key) const {
    for (const auto& kv : entries_)
      if (kv.first == key) return kv.second;
    throw ParseError("key " + key, "missing");
  }
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  void append(const KvDocument& other, const std::string& prefix = "") {
    for (const auto& [k, v] : other.entries_) set(prefix + k, v);
  }

  std::string str() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
    return out;
  }

  static KvDocument parse(std::istream& in) {
    KvDocument doc;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("line " + std::to_string(no), "expected key=value");
      auto strip = [](std::string s) {
        const auto a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      std::string key = strip(line.substr(0, eq));
      if (key.empty()) throw ParseError("line " + std::to_string(no), "empty key");
      doc.set(key, strip(line.substr(eq + 1)));
    }
    return doc;
  }
  static KvDocument parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

inline std::string join(const std::vector<std::string>& parts, const std::string& sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

inline RadiusWindow parse_window(const std::string& text) {
  std::string s = text;
  if (!s.empty() && (s.front() == '(' || s.front() == '[')) s.erase(0, 1);
  if (!s.empty() && (s.back() == ']' || s.back() == ')')) s.pop_back();
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ParseError("window", "expected lo,hi");
  RadiusWindow w;
  w.lo = parse_rational(s.substr(0, comma));
  const std::string hi = s.substr(comma + 1);
  if (hi != "inf" && hi != "+inf") w.hi = parse_rational(hi);
  if (w.lo < 0 || (w.hi && *w.hi <= w.lo)) throw ParseError("window", "need 0 <= lo < hi");
  return w;
}

inline void put_constant(KvDocument& doc, const std::string& key, const Space* space, const ExtendedConstant& c) {
  doc.set(key, c.value.str());
  if (!c.witness) return;
  auto name = [&](std::size_t i) { return space ? space->label(i) : "#" + std::to_string(i); };
  doc.set(key + ".witness_x", name(c.witness->x));
  if (c.witness->y) doc.set(key + ".witness_y", name(*c.witness->y));
  doc.set(key + ".interval", c.witness->interval.str());
}

inline KvDocument to_kv(const ConstantsReport& r, const Space* space = nullptr) {
  KvDocument doc;
  doc.set("t", to_string(r.t));
  doc.set("T", to_string(r.T));
  doc.set("k2_mode", r.k2_mode == K2Mode::combined ? "combined" : "bounded");
  doc.set("k2_ratio", to_string(r.k2_ratio()));
  doc.set("window", r.window.str());
  put_constant(doc, "c_mu", space, r.c_mu);
  put_constant(doc, "k_micro", space, r.k_micro);
  put_constant(doc, "k_strong", space, r.k_strong);
  put_constant(doc, "k_blossom", space, r.k_blossom);
  put_constant(doc, "k_blossom_bounded", space, r.k_blossom_bounded);
  put_constant(doc, "k2", space, r.k2);
  return doc;
}

// Reads the values back; witnesses are not restored. Keys absent from the
// document keep the defaults of `base`.
inline ConstantsReport constants_from_kv(const KvDocument& doc, ConstantsReport base = {}) {
  auto field = [&](const char* key, auto&& apply) {
    if (auto v = doc.get(key)) {
      try {
        apply(*v);
      } catch (const std::exception& e) {
        throw ParseError(std::string("key ") + key, e.what());
      }
    }
  };
  field("t", [&](const std::string& v) { base.t = parse_rational(v); });
  field("T", [&](const std::string& v) { base.T = parse_rational(v); });
  field("k2_mode", [&](const std::string& v) {
    if (v == "combined") base.k2_mode = K2Mode::combined;
    else if (v == "bounded") base.k2_mode = K2Mode::bounded;
    else throw std::invalid_argument("expected combined or bounded");
  });
  field("window", [&](const std::string& v) { base.window = parse_window(v); });
  auto constant = [&](const char* key, ExtendedConstant& c) {
    field(key, [&](const std::string& v) {
      c.value = parse_extended(v);
      if (c.value < Extended(Rational(0))) throw std::invalid_argument("negative constant");
      c.witness.reset();
    });
  };
  constant("c_mu", base.c_mu);
  constant("k_micro", base.k_micro);
  constant("k_strong", base.k_strong);
  constant("k_blossom", base.k_blossom);
  constant("k_blossom_bounded", base.k_blossom_bounded);
  constant("k2", base.k2);
  return base;
}

inline std::string point_list(const Space& space, const PointSet& s) {
  std::vector<std::string> names;
  s.for_each([&](std::size_t i) { names.push_back(space.label(i)); });
  return "{" + join(names, " ") + "}";
}

inline KvDocument to_kv(const VerificationReport& vr) {
  KvDocument doc;
  doc.set("verification", vr.passed() ? "pass" : "fail");
  for (const auto& c : vr.checks) {
    doc.set("check." + c.name, verdict_name(c.verdict));
    doc.set("check." + c.name + ".lhs", c.lhs);
    doc.set("check." + c.name + ".rhs", c.rhs);
  }
  return doc;
}

inline KvDocument to_kv(const SelectionOutcome& out, const Space& space) {
  KvDocument doc;
  doc.set("mode", mode_name(out.family.mode));
  doc.set("t", to_string(out.family.t));
  doc.set("family_size", std::to_string(out.family.balls.size()));
  std::vector<std::string> acc;
  for (std::size_t i : out.accepted) acc.push_back(std::to_string(i));
  doc.set("accepted", join(acc));
  for (std::size_t j = 0; j < out.accepted.size(); ++j) {
    const Ball& b = out.family.balls[out.accepted[j]];
    const std::string key = "D." + std::to_string(out.accepted[j]);
    doc.set(key + ".ball", "B(" + space.label(b.center) + "," + to_string(b.radius) + ")");
    doc.set(key, point_list(space, out.disjoint[j]));
  }
  doc.set("U", point_list(space, out.u_set));
  doc.set("V", point_list(space, out.v_set));
  doc.set("mu_U", to_string(measure(space, out.u_set)));
  doc.set("mu_V", to_string(measure(space, out.v_set)));
  std::vector<std::string> dens;
  Rational max_density = 0;
  for (const auto& d : out.density) {
    dens.push_back(to_string(d));
    if (d > max_density) max_density = d;
  }
  doc.set("density", join(dens));
  doc.set("max_density", to_string(max_density));
  return doc;
}

inline KvDocument to_kv(const WeakTypeProfile& p) {
  KvDocument doc;
  doc.set("norm", to_string(p.norm));
  doc.set("levels", std::to_string(p.rows.size()));
  doc.set("weak_ratio_sup", to_string(p.supremum));
  doc.set("weak_ratio_argmax_level", to_string(p.argmax_level));
  return doc;
}

inline KvDocument to_kv(const BoundsReport& b) {
  KvDocument doc;
  auto put = [&](const char* key, const BoundValue& v) { doc.set(key, v.vacuous ? "vacuous" : format_double(v.value)); };
  put("sparse_bound", b.sparse_bound);
  put("naor_tao_bound", b.naor_tao_bound);
  doc.set("naor_tao_steps", std::to_string(b.naor_tao_steps));
  put("full_bound", b.full_bound);
  if (b.d) {
    doc.set("d", std::to_string(*b.d));
    doc.set("lebesgue_sparse_bound", format_double(*b.lebesgue_sparse_bound));
  }
  doc.set("cube_sparse_bound", format_double(b.cube_sparse_bound));
  return doc;
}

inline std::string levels_tsv(const WeakTypeProfile& p) {
  std::string out = "level\tmeasure_ge\tratio\n";
  for (const auto& row : p.rows) out += to_string(row.level) + "\t" + to_string(row.measure) + "\t" + to_string(row.ratio) + "\n";
  return out;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> out;
  if (text.empty()) return out;
  for (const auto& part : split(text, ',')) out.push_back(parse_rational(part));
  return out;
}

// "three-point-delta", "grid:d=2,hw=6[,origin_weight=1/2]", "lshape[:pitch=1/12]",
// "ngon:n=6".
inline SpaceSpec parse_space_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::vector<std::pair<std::string, std::string>> params;
  if (colon != std::string::npos) {
    for (const auto& part : split(text.substr(colon + 1), ',')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw ParseError("space " + text, "expected key=value, got '" + part + "'");
      params.emplace_back(part.substr(0, eq), part.substr(eq + 1));
    }
  }
  auto integer = [&](const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const int out = std::stoi(v, &used);
      if (used != v.size()) throw std::invalid_argument("trailing characters");
      return out;
    } catch (const std::exception&) {
      throw ParseError("space " + text, key + " must be an integer");
    }
  };
  auto unknown = [&](const std::string& key) { return ParseError("space " + text, "unknown parameter " + key); };
  if (name == "three-point-delta") {
    if (!params.empty()) throw unknown(params.front().first);
    return ThreePointDelta{};
  }
  if (name == "grid") {
    GridZd g;
    for (const auto& [k, v] : params) {
      if (k == "d") g.d = integer(k, v);
      else if (k == "hw") g.half_width = integer(k, v);
      else if (k == "origin_weight") g.origin_weight = parse_rational(v);
      else throw unknown(k);
    }
    return g;
  }
  if (name == "lshape") {
    LShapeNet l;
    for (const auto& [k, v] : params) {
      if (k == "pitch") l.pitch = parse_rational(v);
      else throw unknown(k);
    }
    return l;
  }
  if (name == "ngon") {
    NgonChordal g;
    for (const auto& [k, v] : params) {
      if (k == "n") g.n = integer(k, v);
      else throw unknown(k);
    }
    return g;
  }
  throw ParseError("space " + text, "unknown space; expected three-point-delta, grid, lshape or ngon");
}

// A point given as its label, as "#index", or as coordinates "a;b;...".
inline std::size_t parse_point(const Space& space, const std::string& token) {
  if (auto i = space.find_label(token)) return *i;
  if (!token.empty() && token.front() == '#') {
    std::size_t used = 0;
    std::size_t idx = 0;
    try {
      idx = std::stoul(token.substr(1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used + 1 != token.size()) throw ParseError("point " + token, "bad index");
    space.check_index(idx);
    return idx;
  }
  if (token.find(';') != std::string::npos) {
    std::vector<Rational> c;
    for (const auto& part : split(token, ';')) c.push_back(parse_rational(part));
    if (auto i = space.find_coordinates(c)) return *i;
  }
  throw ParseError("point " + token, "no such point");
}

// "center:radius,center:radius,..."
inline std::vector<Ball> parse_balls(const Space& space, const std::string& text) {
  std::vector<Ball> out;
  if (text.empty()) return out;
  // commas inside parentheses belong to coordinate labels such as (1,-1)
  std::vector<std::string> parts(1);
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) parts.emplace_back();
    else parts.back().push_back(c);
  }
  for (const auto& part : parts) {
    const auto colon = part.rfind(':');
    if (colon == std::string::npos) throw ParseError("ball " + part, "expected center:radius");
    Ball b{parse_point(space, part.substr(0, colon)), Rational(0), Closure::open};
    try {
      b.radius = parse_rational(part.substr(colon + 1));
    } catch (const std::exception& e) {
      throw ParseError("ball " + part, e.what());
    }
    out.push_back(b);
  }
  return out;
}

// Space file: JSON object with "distance_matrix" or "points" + "norm", plus
// "weights" and optional "labels". Numbers may be JSON numbers or strings
// ("1/3", "0.25"); "exact": false selects tolerant float validation.
namespace detail {

inline Rational json_rational(const nlohmann::json& v, const std::string& field) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.dump());
    // Shortest round-trip form of the parsed double; equals the literal for
    // literals of up to 15 significant digits.
    if (v.is_number_float()) return parse_rational(v.dump());
  } catch (const std::exception& e) {
    throw ParseError("field " + field, e.what());
  }
  throw ParseError("field " + field, "expected a number or numeric string");
}

inline const nlohmann::json& json_array(const nlohmann::json& doc, const std::string& field) {
  if (!doc.contains(field)) throw ParseError("field " + field, "missing");
  const auto& v = doc.at(field);
  if (!v.is_array()) throw ParseError("field " + field, "expected an array");
  return v;
}

}  // namespace detail

inline Space parse_space_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // byte offset -> line number
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ParseError("line " + std::to_string(line), e.what());
  }
  if (!doc.is_object()) throw ParseError("line 1", "space file must be a JSON object");

  std::vector<Rational> weights;
  const auto& w = detail::json_array(doc, "weights");
  for (std::size_t i = 0; i < w.size(); ++i) weights.push_back(detail::json_rational(w[i], "weights[" + std::to_string(i) + "]"));
  std::vector<std::string> labels;
  if (doc.contains("labels")) {
    const auto& l = detail::json_array(doc, "labels");
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (!l[i].is_string()) throw ParseError("field labels[" + std::to_string(i) + "]", "expected a string");
      labels.push_back(l[i].get<std::string>());
    }
  }
  bool exact = true;
  if (doc.contains("exact")) {
    if (!doc["exact"].is_boolean()) throw ParseError("field exact", "expected true or false");
    exact = doc["exact"].get<bool>();
  }
  const bool has_matrix = doc.contains("distance_matrix"), has_points = doc.contains("points");
  if (has_matrix == has_points) throw ParseError("field distance_matrix", "give exactly one of distance_matrix and points");

  if (has_points) {
    PointCloud pc;
    const auto& pts = detail::json_array(doc, "points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string f = "points[" + std::to_string(i) + "]";
      if (!pts[i].is_array()) throw ParseError("field " + f, "expected a coordinate array");
      std::vector<Rational> p;
      for (std::size_t k = 0; k < pts[i].size(); ++k) p.push_back(detail::json_rational(pts[i][k], f + "[" + std::to_string(k) + "]"));
      pc.points.push_back(std::move(p));
    }
    const std::string norm = doc.value("norm", std::string("linf"));
    if (norm == "linf") pc.norm = Norm::linf;
    else if (norm == "l1") pc.norm = Norm::l1;
    else if (norm == "l2") pc.norm = Norm::l2;
    else throw ParseError("field norm", "expected linf, l1 or l2");
    pc.weights = std::move(weights);
    pc.labels = std::move(labels);
    return build_point_cloud(pc);
  }

  const auto& m = detail::json_array(doc, "distance_matrix");
  std::vector<std::vector<Rational>> dist;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::string f = "distance_matrix[" + std::to_string(i) + "]";
    if (!m[i].is_array()) throw ParseError("field " + f, "expected a row array");
    std::vector<Rational> row;
    for (std::size_t j = 0; j < m[i].size(); ++j) row.push_back(detail::json_rational(m[i][j], f + "[" + std::to_string(j) + "]"));
    dist.push_back(std::move(row));
  }
  if (exact) return Space::from_distances(dist, weights, labels);
  std::vector<std::vector<double>> fd(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i)
    for (const auto& v : dist[i]) fd[i].push_back(to_double(v));
  return Space::from_float_distances(fd, weights, labels);
}

inline Space read_space_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open space file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_space_json(buf.str());
}

// Always written as a distance matrix of exact decimal or p/q strings, so a
// re-read reproduces distances and weights exactly.
inline std::string space_to_json(const Space& space) {
  nlohmann::ordered_json doc;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < space.size(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < space.size(); ++j) row.push_back(to_string(space.distance(i, j)));
    rows.push_back(std::move(row));
  }
  doc["distance_matrix"] = std::move(rows);
  auto w = nlohmann::ordered_json::array();
  for (const auto& x : space.weights()) w.push_back(to_string(x));
  doc["weights"] = std::move(w);
  doc["labels"] = space.labels();
  if (!space.exact_distances()) doc["exact"] = false;
  return doc.dump(1) + "\n";
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace covlab
