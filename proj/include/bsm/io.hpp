#pragma once
// Text format for discrete data and isomorphisms, plus builders for surface
// data and the bundled case studies.
//
// A data file is JSON preceded by optional `//` comment lines:
//   groups:   { name: {"kind":"finite_table","table":[[...]]}
//                   | {"kind":"fg_abelian","free_rank":r,"torsion":[...]} }
//   vertices: [ {"id","sign":"+|-","group"} ]
//   edges:    [ {"id","pos_vertex","neg_vertex","period":"p/q","H",
//                "phi_plus","phi_minus","hol","gamma_plus","gamma_minus"} ]
// Homs are {"images":[...]} except between fg_abelian groups, which use
// {"matrix":[[...]]} with one row per target coordinate. Elements are an
// index (finite_table) or an integer vector (fg_abelian).

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsm/picard.hpp"

namespace bsm::io {

using json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, const std::string& msg, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(format(path, msg, line, column)), path_(path), line_(line), column_(column) {}
  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& path, const std::string& msg, std::size_t line, std::size_t col) {
    std::string s;
    if (line) s += "line " + std::to_string(line) + ", column " + std::to_string(col) + ": ";
    if (!path.empty()) s += path + ": ";
    return s + msg;
  }
  std::string path_;
  std::size_t line_, column_;
};

struct DataFile {
  std::vector<std::string> comments;  // leading `//` lines, verbatim
  DiscreteData data;
};

// ---------------------------------------------------------------------------
// Canonical printing: sorted keys, scalar arrays inline, arrays of scalar
// arrays one row per line, two-space indentation.

namespace detail {

inline bool is_scalar_array(const json& j) {
  if (!j.is_array()) return false;
  for (const auto& x : j)
    if (x.is_structured()) return false;
  return true;
}

inline void print(std::ostream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string pad2(static_cast<std::size_t>(indent + 2), ' ');
  if (!j.is_structured()) {
    os << j.dump();
    return;
  }
  if (j.empty()) {
    os << (j.is_array() ? "[]" : "{}");
    return;
  }
  if (is_scalar_array(j)) {
    os << '[';
    bool first = true;
    for (const auto& x : j) {
      os << (first ? "" : ", ") << x.dump();
      first = false;
    }
    os << ']';
    return;
  }
  if (j.is_array()) {
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      os << pad2;
      print(os, j[i], indent + 2);
      os << (i + 1 < j.size() ? ",\n" : "\n");
    }
    os << pad << ']';
    return;
  }
  os << "{\n";
  std::size_t i = 0;
  for (auto it = j.begin(); it != j.end(); ++it, ++i) {
    os << pad2 << json(it.key()).dump() << ": ";
    print(os, it.value(), indent + 2);
    os << (i + 1 < j.size() ? ",\n" : "\n");
  }
  os << pad << '}';
}

}  // namespace detail

inline std::string dump_canonical(const json& j) {
  std::ostringstream os;
  detail::print(os, j, 0);
  os << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Field helpers

namespace detail {

inline const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path, "missing field '" + key + "'");
  return *it;
}

inline std::string get_string(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = field(obj, key, path);
  if (!v.is_string()) throw ParseError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

inline Int get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ParseError(path, "expected an integer");
  return v.get<Int>();
}

inline void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      throw ParseError(path + "." + it.key(), "unknown field");
}

}  // namespace detail

inline Rational parse_period(const std::string& s, const std::string& path) {
  Int num = 0, den = 1;
  auto slash = s.find('/');
  try {
    std::size_t used = 0;
    num = std::stoll(s.substr(0, slash), &used);
    if (used != (slash == std::string::npos ? s.size() : slash)) throw std::invalid_argument(s);
    if (slash != std::string::npos) {
      den = std::stoll(s.substr(slash + 1), &used);
      if (used != s.size() - slash - 1) throw std::invalid_argument(s);
    }
  } catch (const std::logic_error&) {
    throw ParseError(path, "period '" + s + "' is not of the form num/den");
  }
  if (den == 0) throw ParseError(path, "period '" + s + "' has zero denominator");
  Rational r(num, den);
  if (r <= Rational(0)) throw ParseError(path, "period '" + s + "' must be positive");
  return r;
}

inline json group_to_json(const Group& g) {
  if (g.kind() == GroupKind::FiniteTable) return {{"kind", "finite_table"}, {"table", g.table()}};
  return {{"kind", "fg_abelian"}, {"free_rank", g.free_rank()}, {"torsion", g.torsion()}};
}

inline GroupPtr group_from_json(const json& j, const std::string& path) {
  const std::string kind = detail::get_string(j, "kind", path);
  try {
    if (kind == "finite_table") {
      detail::only_keys(j, {"kind", "table"}, path);
      const auto& t = detail::field(j, "table", path);
      if (!t.is_array()) throw ParseError(path + ".table", "expected an array of rows");
      Group::Table table;
      for (std::size_t r = 0; r < t.size(); ++r) {
        if (!t[r].is_array()) throw ParseError(path + ".table[" + std::to_string(r) + "]", "expected a row");
        std::vector<Int> row;
        for (std::size_t c = 0; c < t[r].size(); ++c)
          row.push_back(detail::get_int(t[r][c], path + ".table[" + std::to_string(r) + "][" + std::to_string(c) + "]"));
        table.push_back(std::move(row));
      }
      return Group::finite_table(std::move(table));
    }
    if (kind == "fg_abelian") {
      detail::only_keys(j, {"kind", "free_rank", "torsion"}, path);
      Int r = detail::get_int(detail::field(j, "free_rank", path), path + ".free_rank");
      std::vector<Int> tors;
      if (j.contains("torsion")) {
        const auto& t = j["torsion"];
        if (!t.is_array()) throw ParseError(path + ".torsion", "expected an array");
        for (std::size_t i = 0; i < t.size(); ++i)
          tors.push_back(detail::get_int(t[i], path + ".torsion[" + std::to_string(i) + "]"));
      }
      return Group::fg_abelian(static_cast<int>(r), std::move(tors));
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, e.what());
  }
  throw ParseError(path + ".kind", "unknown group kind '" + kind + "'");
}

inline json elem_to_json(const Element& x, const Group& g) {
  if (g.kind() == GroupKind::FiniteTable) return x.c.at(0);
  return x.c;
}

inline Element elem_from_json(const json& j, const GroupPtr& g, const std::string& path) {
  Element x;
  if (g->kind() == GroupKind::FiniteTable) {
    x = Element::index(detail::get_int(j, path));
  } else {
    if (!j.is_array()) throw ParseError(path, "expected an integer vector");
    for (std::size_t i = 0; i < j.size(); ++i) x.c.push_back(detail::get_int(j[i], path + "[" + std::to_string(i) + "]"));
    if (x.c.size() != g->rank())
      throw ParseError(path, "vector has length " + std::to_string(x.c.size()) + ", group rank is " +
                                 std::to_string(g->rank()));
    x = g->canonical(std::move(x));
  }
  if (!g->contains(x)) throw ParseError(path, "element " + x.str() + " is not in " + g->describe());
  return x;
}

inline json hom_to_json(const Hom& f) {
  if (f.source()->kind() == GroupKind::FgAbelian && f.target()->kind() == GroupKind::FgAbelian)
    return {{"matrix", f.matrix()}};
  json imgs = json::array();
  for (const auto& x : f.images()) imgs.push_back(elem_to_json(x, *f.target()));
  return {{"images", imgs}};
}

inline Hom hom_from_json(const json& j, const GroupPtr& src, const GroupPtr& dst, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected a hom object");
  const bool matrix = src->kind() == GroupKind::FgAbelian && dst->kind() == GroupKind::FgAbelian;
  try {
    if (matrix) {
      detail::only_keys(j, {"matrix"}, path);
      const auto& m = detail::field(j, "matrix", path);
      if (!m.is_array() || m.size() != dst->rank())
        throw ParseError(path + ".matrix", "expected " + std::to_string(dst->rank()) + " rows");
      linalg::Mat mat;
      for (std::size_t r = 0; r < m.size(); ++r) {
        const std::string rp = path + ".matrix[" + std::to_string(r) + "]";
        if (!m[r].is_array() || m[r].size() != src->rank())
          throw ParseError(rp, "expected " + std::to_string(src->rank()) + " entries");
        linalg::Vec row;
        for (std::size_t c = 0; c < m[r].size(); ++c) row.push_back(detail::get_int(m[r][c], rp + "[" + std::to_string(c) + "]"));
        mat.push_back(std::move(row));
      }
      return Hom::from_matrix(src, dst, mat);
    }
    detail::only_keys(j, {"images"}, path);
    const auto& im = detail::field(j, "images", path);
    if (!im.is_array()) throw ParseError(path + ".images", "expected an array");
    std::vector<Element> imgs;
    for (std::size_t i = 0; i < im.size(); ++i)
      imgs.push_back(elem_from_json(im[i], dst, path + ".images[" + std::to_string(i) + "]"));
    return Hom(src, dst, std::move(imgs));
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, e.what());
  }
}

// ---------------------------------------------------------------------------
// Data files

inline json data_to_json(const DiscreteData& Gr) {
  json groups = json::object();
  for (const auto& [name, g] : Gr.groups) groups[name] = group_to_json(*g);
  json vertices = json::array();
  for (const auto& v : Gr.vertices) vertices.push_back({{"id", v.id}, {"sign", sign_str(v.sign)}, {"group", v.group}});
  json edges = json::array();
  for (const auto& e : Gr.edges) {
    const auto& D = e.hol;
    edges.push_back({{"id", e.id},
                     {"pos_vertex", e.pos_vertex},
                     {"neg_vertex", e.neg_vertex},
                     {"period", rational_str(e.period)},
                     {"H", e.H},
                     {"phi_plus", hom_to_json(D.iso.phi_plus)},
                     {"phi_minus", hom_to_json(D.iso.phi_minus)},
                     {"hol", hom_to_json(D.hol)},
                     {"gamma_plus", elem_to_json(D.gamma_plus, *D.iso.G_plus)},
                     {"gamma_minus", elem_to_json(D.gamma_minus, *D.iso.G_minus)}});
  }
  return {{"groups", groups}, {"vertices", vertices}, {"edges", edges}};
}

inline DiscreteData data_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("", "top level must be an object");
  detail::only_keys(j, {"groups", "vertices", "edges"}, "");
  DiscreteData Gr;
  const auto& groups = detail::field(j, "groups", "");
  if (!groups.is_object()) throw ParseError("groups", "expected an object keyed by group name");
  for (auto it = groups.begin(); it != groups.end(); ++it)
    Gr.add_group(it.key(), group_from_json(it.value(), "groups." + it.key()));
  const auto& vs = detail::field(j, "vertices", "");
  if (!vs.is_array()) throw ParseError("vertices", "expected an array");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string p = "vertices[" + std::to_string(i) + "]";
    detail::only_keys(vs[i], {"id", "sign", "group"}, p);
    std::string id = detail::get_string(vs[i], "id", p);
    std::string sign = detail::get_string(vs[i], "sign", p);
    std::string group = detail::get_string(vs[i], "group", p);
    if (sign != "+" && sign != "-") throw ParseError(p + ".sign", "sign must be \"+\" or \"-\"");
    if (!Gr.groups.count(group)) throw ParseError(p + ".group", "unknown group '" + group + "'");
    if (Gr.vertex_index(id)) throw ParseError(p + ".id", "duplicate vertex id '" + id + "'");
    Gr.add_vertex(id, sign == "+" ? Sign::Plus : Sign::Minus, group);
  }
  const auto& es = detail::field(j, "edges", "");
  if (!es.is_array()) throw ParseError("edges", "expected an array");
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string p = "edges[" + std::to_string(i) + "]";
    const auto& e = es[i];
    detail::only_keys(e, {"id", "pos_vertex", "neg_vertex", "period", "H", "phi_plus", "phi_minus", "hol",
                          "gamma_plus", "gamma_minus"},
                      p);
    std::string id = detail::get_string(e, "id", p);
    if (Gr.edge_index(id)) throw ParseError(p + ".id", "duplicate edge id '" + id + "'");
    std::string pos = detail::get_string(e, "pos_vertex", p);
    std::string neg = detail::get_string(e, "neg_vertex", p);
    if (!Gr.vertex_index(pos)) throw ParseError(p + ".pos_vertex", "unknown vertex '" + pos + "'");
    if (!Gr.vertex_index(neg)) throw ParseError(p + ".neg_vertex", "unknown vertex '" + neg + "'");
    Rational rho = parse_period(detail::get_string(e, "period", p), p + ".period");
    std::string hname = detail::get_string(e, "H", p);
    if (!Gr.groups.count(hname)) throw ParseError(p + ".H", "unknown group '" + hname + "'");
    auto H = Gr.group(hname);
    auto Gp = Gr.group(Gr.vertex(pos).group);
    auto Gm = Gr.group(Gr.vertex(neg).group);
    Hom pp = hom_from_json(detail::field(e, "phi_plus", p), H, Gp, p + ".phi_plus");
    Hom pm = hom_from_json(detail::field(e, "phi_minus", p), H, Gm, p + ".phi_minus");
    Hom hol = hom_from_json(detail::field(e, "hol", p), H, H, p + ".hol");
    Element gp = elem_from_json(detail::field(e, "gamma_plus", p), Gp, p + ".gamma_plus");
    Element gm = elem_from_json(detail::field(e, "gamma_minus", p), Gm, p + ".gamma_minus");
    Gr.add_edge(id, pos, neg, rho, hname, pp.images(), pm.images(), hol.images(), gp, gm);
  }
  return Gr;
}

inline DataFile parse_data(const std::string& text) {
  DataFile f;
  std::string body = text;
  // Leading comment lines are blanked so parser offsets still match the text.
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t eol = body.find('\n', pos);
    if (eol == std::string::npos) eol = body.size();
    std::string line = body.substr(pos, eol - pos);
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      pos = eol + 1;
      continue;
    }
    if (line.compare(first, 2, "//") != 0) break;
    f.comments.push_back(line);
    std::fill(body.begin() + static_cast<std::ptrdiff_t>(pos), body.begin() + static_cast<std::ptrdiff_t>(eol), ' ');
    pos = eol + 1;
  }
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    auto at = msg.find("syntax error");
    throw ParseError("", at == std::string::npos ? msg : msg.substr(at), line, col);
  }
  f.data = data_from_json(j);
  return f;
}

inline std::string serialize_data(const DataFile& f) {
  std::string out;
  for (const auto& c : f.comments) out += c + "\n";
  return out + dump_canonical(data_to_json(f.data));
}

inline std::string serialize_data(const DiscreteData& Gr) { return serialize_data(DataFile{{}, Gr}); }

inline DataFile read_data_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_data(ss.str());
}

// ---------------------------------------------------------------------------
// Isomorphisms

inline json iso_to_json(const DiscreteDataIso& F, const DiscreteData& Gr1, const DiscreteData& Gr2) {
  json vm = json::object(), em = json::object(), isos = json::object(), coc = json::object();
  for (std::size_t v = 0; v < F.vertex_map.size(); ++v) vm[Gr1.vertices[v].id] = Gr2.vertices[F.vertex_map[v]].id;
  for (std::size_t e = 0; e < F.edge_map.size(); ++e) {
    em[Gr1.edges[e].id] = Gr2.edges[F.edge_map[e]].id;
    const auto& m = F.edge_isos[e];
    isos[Gr1.edges[e].id] = {{"psi", hom_to_json(m.iso.psi)},
                             {"psi_minus", hom_to_json(m.iso.psi_minus)},
                             {"psi_plus", hom_to_json(m.iso.psi_plus)},
                             {"h", elem_to_json(m.h, *m.iso.psi.target())}};
  }
  for (std::size_t v = 0; v < F.cocycles.size(); ++v) {
    const auto& t = F.cocycles[v];
    if (t.edges.empty()) continue;
    const auto G2 = Gr2.vertex_group(F.vertex_map[v]);
    json ids = json::array(), rows = json::array();
    for (auto e : t.edges) ids.push_back(Gr1.edges[e].id);
    for (const auto& row : t.g) {
      json r = json::array();
      for (const auto& x : row) r.push_back(elem_to_json(x, *G2));
      rows.push_back(r);
    }
    coc[Gr1.vertices[v].id] = {{"edges", ids}, {"g", rows}};
  }
  return {{"orientation", orientation_str(F.orientation)},
          {"vertex_map", vm},
          {"edge_map", em},
          {"edge_isos", isos},
          {"cocycles", coc}};
}

inline DiscreteDataIso iso_from_json(const json& j, const DiscreteData& Gr1, const DiscreteData& Gr2) {
  DiscreteDataIso F;
  const std::string o = detail::get_string(j, "orientation", "");
  if (o != "preserving" && o != "reversing") throw ParseError("orientation", "expected preserving or reversing");
  F.orientation = o == "preserving" ? Orientation::Preserving : Orientation::Reversing;
  const auto& vm = detail::field(j, "vertex_map", "");
  for (const auto& v : Gr1.vertices) {
    const std::string p = "vertex_map." + v.id;
    auto idx = Gr2.vertex_index(detail::get_string(vm, v.id, "vertex_map"));
    if (!idx) throw ParseError(p, "unknown target vertex");
    F.vertex_map.push_back(*idx);
  }
  const auto& em = detail::field(j, "edge_map", "");
  const auto& isos = detail::field(j, "edge_isos", "");
  for (std::size_t e = 0; e < Gr1.edges.size(); ++e) {
    const auto& id = Gr1.edges[e].id;
    auto idx = Gr2.edge_index(detail::get_string(em, id, "edge_map"));
    if (!idx) throw ParseError("edge_map." + id, "unknown target edge");
    F.edge_map.push_back(*idx);
    const auto& D1 = Gr1.edges[e].hol;
    const auto& D2 = Gr2.edges[*idx].hol;
    const std::string p = "edge_isos." + id;
    const auto& m = detail::field(isos, id, "edge_isos");
    HolonomyIso hi;
    hi.iso.orientation = F.orientation;
    hi.iso.psi = hom_from_json(detail::field(m, "psi", p), D1.iso.H, D2.iso.H, p + ".psi");
    for (Sign s : {Sign::Minus, Sign::Plus}) {
      const std::string key = s == Sign::Plus ? "psi_plus" : "psi_minus";
      hi.iso.side(s) = hom_from_json(detail::field(m, key, p), D1.iso.G(s),
                                     D2.iso.G(image_side(F.orientation, s)), p + "." + key);
    }
    hi.h = elem_from_json(detail::field(m, "h", p), D2.iso.H, p + ".h");
    F.edge_isos.push_back(std::move(hi));
  }
  const json empty = json::object();
  const json& coc = j.contains("cocycles") ? j["cocycles"] : empty;
  for (std::size_t v = 0; v < Gr1.vertices.size(); ++v) {
    CocycleTable t = blank_cocycle_table(Gr1, v);
    const std::size_t k = t.edges.size();
    if (k > 0) {
      const std::string p = "cocycles." + Gr1.vertices[v].id;
      const auto& c = detail::field(coc, Gr1.vertices[v].id, "cocycles");
      const auto& ids = detail::field(c, "edges", p);
      if (!ids.is_array() || ids.size() != k) throw ParseError(p + ".edges", "must list the incident edges");
      for (std::size_t a = 0; a < k; ++a)
        if (ids[a] != Gr1.edges[t.edges[a]].id) throw ParseError(p + ".edges", "must list the incident edges in order");
      const auto& g = detail::field(c, "g", p);
      if (!g.is_array() || g.size() != k) throw ParseError(p + ".g", "expected a square table");
      const auto G2 = Gr2.vertex_group(F.vertex_map[v]);
      t.g.assign(k, std::vector<Element>(k));
      for (std::size_t a = 0; a < k; ++a) {
        if (!g[a].is_array() || g[a].size() != k) throw ParseError(p + ".g", "expected a square table");
        for (std::size_t b = 0; b < k; ++b)
          t.g[a][b] = elem_from_json(g[a][b], G2, p + ".g[" + std::to_string(a) + "][" + std::to_string(b) + "]");
      }
    }
    F.cocycles.push_back(std::move(t));
  }
  return F;
}

// ---------------------------------------------------------------------------
// Builders

struct SurfaceRegion {
  std::string id;
  Sign sign = Sign::Plus;
  int genus = 0;
  int boundaries = 1;
};

struct SurfaceCircle {
  std::string id;
  std::string pos_region, neg_region;
  Rational period{1};
};

struct SurfaceSpec {
  std::vector<SurfaceRegion> regions;
  std::vector<SurfaceCircle> circles;
};

/// Planar regions only: a disk has trivial fundamental group, an annulus Z.
/// H is trivial for every circle; gamma is the identity on a disk side and
/// the generator 1 on an annulus side.
inline DiscreteData build_surface(const SurfaceSpec& spec) {
  if (spec.circles.empty()) throw std::invalid_argument("a surface without singular circles has no discrete data");
  DiscreteData Gr;
  Gr.add_group("1", Group::trivial());
  std::map<std::string, int> count;
  for (const auto& c : spec.circles) {
    ++count[c.pos_region];
    ++count[c.neg_region];
  }
  for (const auto& r : spec.regions) {
    if (r.genus != 0) throw UnsupportedBackend("region " + r.id + ": positive genus has non-abelian fundamental group");
    if (r.boundaries < 1 || r.boundaries > 2)
      throw UnsupportedBackend("region " + r.id + ": only disks and annuli are supported");
    if (count[r.id] != r.boundaries)
      throw std::invalid_argument("region " + r.id + " has " + std::to_string(r.boundaries) + " boundary circles but " +
                                  std::to_string(count[r.id]) + " circles touch it");
    if (r.boundaries == 2 && !Gr.groups.count("Z")) Gr.add_group("Z", Group::free_abelian(1));
    Gr.add_vertex(r.id, r.sign, r.boundaries == 1 ? "1" : "Z");
  }
  auto gamma = [&](const std::string& region) {
    auto v = Gr.vertex_index(region);
    if (!v) throw std::invalid_argument("unknown region '" + region + "'");
    return Gr.vertices[*v].group == "Z" ? Element({1}) : Element(std::vector<Int>{});
  };
  for (const auto& c : spec.circles) {
    auto gp = gamma(c.pos_region);
    auto gm = gamma(c.neg_region);
    Gr.add_edge(c.id, c.pos_region, c.neg_region, c.period, "1", {}, {}, {}, gp, gm);
  }
  return Gr;
}

inline SurfaceSpec surface_spec_from_json(const json& j) {
  SurfaceSpec s;
  const auto& rs = detail::field(j, "regions", "");
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const std::string p = "regions[" + std::to_string(i) + "]";
    SurfaceRegion r;
    r.id = detail::get_string(rs[i], "id", p);
    std::string sign = detail::get_string(rs[i], "sign", p);
    if (sign != "+" && sign != "-") throw ParseError(p + ".sign", "sign must be \"+\" or \"-\"");
    r.sign = sign == "+" ? Sign::Plus : Sign::Minus;
    r.genus = rs[i].contains("genus") ? static_cast<int>(detail::get_int(rs[i]["genus"], p + ".genus")) : 0;
    r.boundaries = static_cast<int>(detail::get_int(detail::field(rs[i], "boundaries", p), p + ".boundaries"));
    s.regions.push_back(r);
  }
  const auto& cs = detail::field(j, "circles", "");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string p = "circles[" + std::to_string(i) + "]";
    SurfaceCircle c;
    c.id = detail::get_string(cs[i], "id", p);
    c.pos_region = detail::get_string(cs[i], "pos", p);
    c.neg_region = detail::get_string(cs[i], "neg", p);
    c.period = parse_period(detail::get_string(cs[i], "period", p), p + ".period");
    s.circles.push_back(c);
  }
  return s;
}

inline DataFile radko_sphere(Rational rho) {
  DataFile f;
  f.comments = {"// Radko sphere: one singular circle on S^2 with modular period " + rational_str(rho) + ".",
                "// Two disk orbits, trivial isotropy and holonomy."};
  f.data = build_surface({{{"north", Sign::Plus, 0, 1}, {"south", Sign::Minus, 0, 1}}, {{"z", "north", "south", rho}}});
  return f;
}

inline DataFile cavalcanti_one_curve(Rational rho) {
  DataFile f;
  f.comments = {"// CP^2 # -CP^2 with one singular locus S^1 x S^2 placed in a disk fibre neighbourhood.",
                "// Both open leaves simply connected; isotropy and holonomy trivial. Period " + rational_str(rho) + "."};
  DiscreteData& Gr = f.data;
  Gr.add_group("pt", Group::trivial());
  Gr.add_vertex("inside", Sign::Plus, "pt");
  Gr.add_vertex("outside", Sign::Minus, "pt");
  Gr.add_edge("s1_x_s2", "inside", "outside", rho, "pt", {}, {}, {}, Element(std::vector<Int>{}), Element(std::vector<Int>{}));
  return f;
}

/// Conventions for the doubled Lefschetz fibration with a single Dehn twist.
struct LefschetzConvention {
  bool phi_second_coordinate = true;  // phi+- = pr2 (else pr1)
  bool gamma_plus_generator = true;   // gamma+ = 1 (else 0)
  bool gamma_minus_generator = true;  // gamma- = 1 (else 0)
};

inline DataFile lefschetz_dehn_twist(const LefschetzConvention& c = {}, Rational rho = Rational(1)) {
  DataFile f;
  f.comments = {
      "// Two copies of a Lefschetz fibration over D^2 with one right-handed Dehn twist on T^2,",
      "// glued along the boundary mapping torus. H = pi_1(T^2) = Z^2, G+- = Z.",
      "// Convention: hol acts on column vectors, hol = [[1,1],[0,1]] (theta1 -> theta1 + theta2).",
      std::string("// Convention: phi+- = ") + (c.phi_second_coordinate ? "pr2" : "pr1") +
          ", gamma+ = " + (c.gamma_plus_generator ? "1" : "0") + ", gamma- = " + (c.gamma_minus_generator ? "1" : "0") +
          ".",
      "// Under these conventions the computed Picard group is R x Z2 x Z2 (OutAut = Z x Z2 x Z2:",
      "// the matrices +-[[1,q],[0,1]] and the orientation swap; the twist is q = 1).",
  };
  DiscreteData& Gr = f.data;
  auto Z = Group::free_abelian(1);
  auto Z2 = Group::free_abelian(2);
  Gr.add_group("Z", Z);
  Gr.add_group("ZxZ", Z2);
  Gr.add_vertex("copy_minus", Sign::Minus, "Z");
  Gr.add_vertex("copy_plus", Sign::Plus, "Z");
  linalg::Mat pr = c.phi_second_coordinate ? linalg::Mat{{0, 1}} : linalg::Mat{{1, 0}};
  Hom phi = Hom::from_matrix(Z2, Z, pr);
  Hom hol = Hom::from_matrix(Z2, Z2, {{1, 1}, {0, 1}});
  Gr.add_edge("mapping_torus", "copy_plus", "copy_minus", rho, "ZxZ", phi.images(), phi.images(), hol.images(),
              Element({c.gamma_plus_generator ? 1 : 0}), Element({c.gamma_minus_generator ? 1 : 0}));
  return f;
}

/// Doubling of a symplectic manifold N along a cosymplectic boundary: two
/// vertices with the group of N, one edge per boundary component, and the
/// same phi and gamma on both sides.
struct CosymplecticBoundary {
  std::string id;
  GroupPtr H;
  std::vector<Element> phi;  // H -> G
  std::vector<Element> hol;  // H -> H
  Element gamma;
  Rational period{1};
};

struct CosymplecticSpec {
  GroupPtr G;
  std::vector<CosymplecticBoundary> boundaries;
};

inline DataFile cosymplectic_double(const CosymplecticSpec& spec) {
  DataFile f;
  f.comments = {"// Double of a symplectic manifold along a stable cosymplectic boundary."};
  DiscreteData& Gr = f.data;
  Gr.add_group("G", spec.G);
  Gr.add_vertex("N_minus", Sign::Minus, "G");
  Gr.add_vertex("N_plus", Sign::Plus, "G");
  for (std::size_t i = 0; i < spec.boundaries.size(); ++i) {
    const auto& b = spec.boundaries[i];
    const std::string hname = "H_" + b.id;
    Gr.add_group(hname, b.H);
    Gr.add_edge(b.id, "N_plus", "N_minus", b.period, hname, b.phi, b.phi, b.hol, b.gamma, b.gamma);
  }
  return f;
}

/// Two parallel circles on S^2: disk, annulus, disk.
inline DataFile two_curve_sphere(Rational rho1, Rational rho2) {
  DataFile f;
  f.comments = {"// S^2 with two parallel singular circles: disk (+), annulus (-), disk (+).",
                "// The annulus orbit has fundamental group Z; both boundary classes are the generator 1."};
  f.data = build_surface({{{"cap_a", Sign::Plus, 0, 1}, {"band", Sign::Minus, 0, 2}, {"cap_b", Sign::Plus, 0, 1}},
                          {{"z1", "cap_a", "band", rho1}, {"z2", "cap_b", "band", rho2}}});
  return f;
}

inline std::vector<std::string> case_study_names() {
  return {"radko_sphere", "cavalcanti_one_curve", "cosymplectic_double", "lefschetz_dehn_twist", "two_curve_sphere"};
}

/// cosymplectic_double here uses N = a solid torus, G = Z, one boundary T^2.
inline DataFile case_study(const std::string& name, Rational rho = Rational(1)) {
  if (name == "radko_sphere") return radko_sphere(rho);
  if (name == "cavalcanti_one_curve") return cavalcanti_one_curve(rho);
  if (name == "lefschetz_dehn_twist") return lefschetz_dehn_twist({}, rho);
  if (name == "two_curve_sphere") return two_curve_sphere(rho, rho);
  if (name == "cosymplectic_double") {
    auto Z = Group::free_abelian(1);
    auto Z2 = Group::free_abelian(2);
    CosymplecticSpec s{Z, {{"torus", Z2, Hom::from_matrix(Z2, Z, {{1, 0}}).images(),
                            Hom::identity(Z2).images(), Element({0}), rho}}};
    auto f = cosymplectic_double(s);
    f.comments.push_back("// N = solid torus D^2 x S^1; boundary T^2 with meridian killed, trivial monodromy.");
    return f;
  }
  throw std::invalid_argument("unknown case study '" + name + "'");
}

}  // namespace bsm::io
