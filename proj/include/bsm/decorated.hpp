#pragma once
// Isotropy data G- <- H -> G+, holonomy data (hol, gamma-, gamma+) and
// discrete data: a signed multigraph decorated with vertex groups, periods
// and per-edge holonomy data.

#include <boost/rational.hpp>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "bsm/group.hpp"

namespace bsm {

using Rational = boost::rational<Int>;

inline std::string rational_str(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

struct ValidationReport {
  std::vector<std::string> issues;
  /// Informational remarks that do not affect validity.
  std::vector<std::string> notes;

  bool ok() const { return issues.empty(); }
  explicit operator bool() const { return ok(); }
  void add(std::string msg) { issues.push_back(std::move(msg)); }
  void merge(const ValidationReport& other, const std::string& prefix = {}) {
    for (const auto& m : other.issues) issues.push_back(prefix + m);
    for (const auto& m : other.notes)
      if (std::find(notes.begin(), notes.end(), m) == notes.end()) notes.push_back(m);
  }
  std::string str() const {
    std::string s;
    for (const auto& m : issues) s += m + "\n";
    return s;
  }
};

enum class Sign { Plus, Minus };

inline Sign flip(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
inline const char* sign_str(Sign s) { return s == Sign::Plus ? "+" : "-"; }

struct IsotropyData {
  GroupPtr H, G_minus, G_plus;
  Hom phi_minus, phi_plus;

  const GroupPtr& G(Sign s) const { return s == Sign::Plus ? G_plus : G_minus; }
  const Hom& phi(Sign s) const { return s == Sign::Plus ? phi_plus : phi_minus; }
};

struct HolonomyData {
  IsotropyData iso;
  Hom hol;
  Element gamma_minus, gamma_plus;

  const Element& gamma(Sign s) const { return s == Sign::Plus ? gamma_plus : gamma_minus; }
  /// hol+- : conjugation by gamma+-.
  Hom hol_side(Sign s) const { return conjugation_aut(iso.G(s), gamma(s)); }
};

inline ValidationReport validate_hom(const Hom& f, const GroupPtr& src, const GroupPtr& dst, const std::string& name) {
  ValidationReport r;
  if (!f.source() || !(*f.source() == *src)) r.add(name + ": source group mismatch");
  if (!f.target() || !(*f.target() == *dst)) r.add(name + ": target group mismatch");
  if (!r.ok()) return r;
  for (const auto& m : f.check()) r.add(name + ": " + m);
  return r;
}

inline ValidationReport validate_isotropy(const IsotropyData& I) {
  ValidationReport r;
  if (!I.H || !I.G_minus || !I.G_plus) {
    r.add("isotropy data has a missing group");
    return r;
  }
  r.merge(validate_hom(I.phi_minus, I.H, I.G_minus, "phi_minus"));
  r.merge(validate_hom(I.phi_plus, I.H, I.G_plus, "phi_plus"));
  return r;
}

inline ValidationReport validate_holonomy(const HolonomyData& D) {
  ValidationReport r = validate_isotropy(D.iso);
  if (!r.ok()) return r;
  auto hr = validate_hom(D.hol, D.iso.H, D.iso.H, "hol");
  r.merge(hr);
  for (Sign s : {Sign::Minus, Sign::Plus})
    if (!D.iso.G(s)->contains(D.gamma(s)))
      r.add(std::string("gamma") + sign_str(s) + " " + D.gamma(s).str() + " is not in G" + sign_str(s));
  if (!r.ok()) return r;
  if (!D.hol.is_bijective()) r.add("hol is not invertible");
  for (Sign s : {Sign::Minus, Sign::Plus}) {
    const auto& G = D.iso.G(s);
    const auto& phi = D.iso.phi(s);
    for (const auto& x : D.iso.H->generators()) {
      Element lhs = G->conj(D.gamma(s), phi(x));
      Element rhs = phi(D.hol(x));
      if (lhs != rhs) {
        r.add(std::string("C_gamma") + sign_str(s) + " o phi" + sign_str(s) + " != phi" + sign_str(s) +
              " o hol at generator " + x.str() + " (" + lhs.str() + " vs " + rhs.str() + ")");
        break;
      }
    }
  }
  return r;
}

struct Vertex {
  std::string id;
  Sign sign = Sign::Plus;
  std::string group;
};

struct Edge {
  std::string id;
  std::string pos_vertex, neg_vertex;
  Rational period{1};
  std::string H;
  HolonomyData hol;

  const std::string& end(Sign s) const { return s == Sign::Plus ? pos_vertex : neg_vertex; }
};

/// Vertices and edges are kept sorted by id.
struct DiscreteData {
  std::map<std::string, GroupPtr> groups;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  GroupPtr group(const std::string& name) const {
    auto it = groups.find(name);
    if (it == groups.end()) throw std::invalid_argument("unknown group '" + name + "'");
    return it->second;
  }

  std::optional<std::size_t> vertex_index(const std::string& id) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), id,
                               [](const Vertex& v, const std::string& k) { return v.id < k; });
    if (it == vertices.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - vertices.begin());
  }
  std::optional<std::size_t> edge_index(const std::string& id) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), id,
                               [](const Edge& e, const std::string& k) { return e.id < k; });
    if (it == edges.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - edges.begin());
  }

  const Vertex& vertex(const std::string& id) const { return vertices.at(vertex_index(id).value()); }
  GroupPtr vertex_group(std::size_t v) const { return group(vertices[v].group); }

  /// Index of the endpoint of edge e on side s; throws on dangling ids.
  std::size_t endpoint(std::size_t e, Sign s) const {
    auto v = vertex_index(edges[e].end(s));
    if (!v) throw std::invalid_argument("edge '" + edges[e].id + "' references unknown vertex '" + edges[e].end(s) + "'");
    return *v;
  }

  /// Edges incident to vertex v (ascending), each with the side of the edge
  /// that touches v.
  std::vector<std::pair<std::size_t, Sign>> incident(std::size_t v) const {
    std::vector<std::pair<std::size_t, Sign>> out;
    for (std::size_t e = 0; e < edges.size(); ++e)
      for (Sign s : {Sign::Plus, Sign::Minus})
        if (edges[e].end(s) == vertices[v].id) out.emplace_back(e, s);
    return out;
  }

  std::size_t add_group(const std::string& name, GroupPtr g) {
    groups[name] = std::move(g);
    return groups.size();
  }

  void add_vertex(std::string id, Sign sign, std::string group_name) {
    Vertex v{std::move(id), sign, std::move(group_name)};
    auto it = std::lower_bound(vertices.begin(), vertices.end(), v.id,
                               [](const Vertex& a, const std::string& k) { return a.id < k; });
    if (it != vertices.end() && it->id == v.id) throw std::invalid_argument("duplicate vertex id '" + v.id + "'");
    vertices.insert(it, std::move(v));
  }

  /// Edge G+- are taken from the endpoint vertex groups, so they are the same
  /// objects as the vertex groups.
  void add_edge(std::string id, std::string pos, std::string neg, Rational period, std::string H_name,
                std::vector<Element> phi_plus, std::vector<Element> phi_minus, std::vector<Element> hol,
                Element gamma_plus, Element gamma_minus) {
    Edge e;
    e.id = std::move(id);
    e.pos_vertex = std::move(pos);
    e.neg_vertex = std::move(neg);
    e.period = period;
    e.H = std::move(H_name);
    auto H = group(e.H);
    auto Gp = group(vertex(e.pos_vertex).group);
    auto Gm = group(vertex(e.neg_vertex).group);
    e.hol.iso = IsotropyData{H, Gm, Gp, Hom(H, Gm, std::move(phi_minus)), Hom(H, Gp, std::move(phi_plus))};
    e.hol.hol = Hom(H, H, std::move(hol));
    e.hol.gamma_plus = Gp->canonical(std::move(gamma_plus));
    e.hol.gamma_minus = Gm->canonical(std::move(gamma_minus));
    auto it = std::lower_bound(edges.begin(), edges.end(), e.id,
                               [](const Edge& a, const std::string& k) { return a.id < k; });
    if (it != edges.end() && it->id == e.id) throw std::invalid_argument("duplicate edge id '" + e.id + "'");
    edges.insert(it, std::move(e));
  }
};

inline ValidationReport validate_discrete(const DiscreteData& Gr) {
  ValidationReport r;
  for (const auto& [name, g] : Gr.groups)
    if (!g) r.add("group '" + name + "' is null");
  for (const auto& v : Gr.vertices)
    if (!Gr.groups.count(v.group)) r.add("vertex " + v.id + ": unknown group '" + v.group + "'");
  for (std::size_t k = 0; k < Gr.edges.size(); ++k) {
    const auto& e = Gr.edges[k];
    const std::string at = "edge " + e.id + ": ";
    auto pv = Gr.vertex_index(e.pos_vertex);
    auto nv = Gr.vertex_index(e.neg_vertex);
    if (!pv) r.add(at + "unknown pos_vertex '" + e.pos_vertex + "'");
    if (!nv) r.add(at + "unknown neg_vertex '" + e.neg_vertex + "'");
    if (pv && Gr.vertices[*pv].sign != Sign::Plus) r.add(at + "pos_vertex " + e.pos_vertex + " has sign -");
    if (nv && Gr.vertices[*nv].sign != Sign::Minus) r.add(at + "neg_vertex " + e.neg_vertex + " has sign +");
    if (e.period <= Rational(0)) r.add(at + "period " + rational_str(e.period) + " is not positive");
    if (!Gr.groups.count(e.H)) {
      r.add(at + "unknown group '" + e.H + "'");
      continue;
    }
    if (e.hol.iso.H != Gr.group(e.H)) r.add(at + "H is not the group '" + e.H + "'");
    if (pv && Gr.groups.count(Gr.vertices[*pv].group) && e.hol.iso.G_plus != Gr.vertex_group(*pv))
      r.add(at + "G+ is not the group of vertex " + e.pos_vertex);
    if (nv && Gr.groups.count(Gr.vertices[*nv].group) && e.hol.iso.G_minus != Gr.vertex_group(*nv))
      r.add(at + "G- is not the group of vertex " + e.neg_vertex);
    r.merge(validate_holonomy(e.hol), at);
  }
  return r;
}

}  // namespace bsm
