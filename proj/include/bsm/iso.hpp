#pragma once
// Isomorphisms at three layers (isotropy, holonomy, discrete data), their
// validation, composition and inversion, inner automorphisms, isomorphism
// search and the quotient by inner automorphisms.

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bsm/decorated.hpp"

namespace bsm {

enum class Orientation { Preserving, Reversing };

inline Sign image_side(Orientation o, Sign s) { return o == Orientation::Preserving ? s : flip(s); }
inline Orientation operator*(Orientation a, Orientation b) {
  return a == b ? Orientation::Preserving : Orientation::Reversing;
}
inline const char* orientation_str(Orientation o) {
  return o == Orientation::Preserving ? "preserving" : "reversing";
}

inline constexpr const char* kReversingNote =
    "reversing iso: condition (ii) read as phi2^{-s}(h) = gamma2^{-s} psi^s(gamma1^s)^-1, "
    "with no hol1^-1 correction to h";

// ---------------------------------------------------------------------------
// Isotropy layer

/// Preserving: psi_minus: G1- -> G2-, psi_plus: G1+ -> G2+.
/// Reversing:  psi_minus: G1- -> G2+, psi_plus: G1+ -> G2-.
struct IsotropyIso {
  Orientation orientation = Orientation::Preserving;
  Hom psi, psi_minus, psi_plus;

  /// The map out of source side s.
  const Hom& side(Sign s) const { return s == Sign::Plus ? psi_plus : psi_minus; }
  Hom& side(Sign s) { return s == Sign::Plus ? psi_plus : psi_minus; }

  bool operator==(const IsotropyIso& o) const {
    return orientation == o.orientation && psi.images() == o.psi.images() &&
           psi_minus.images() == o.psi_minus.images() && psi_plus.images() == o.psi_plus.images();
  }
};

inline ValidationReport validate_isotropy_iso(const IsotropyIso& m, const IsotropyData& I1, const IsotropyData& I2) {
  ValidationReport r;
  r.merge(validate_hom(m.psi, I1.H, I2.H, "psi"));
  for (Sign s : {Sign::Minus, Sign::Plus})
    r.merge(validate_hom(m.side(s), I1.G(s), I2.G(image_side(m.orientation, s)),
                         std::string("psi") + sign_str(s)));
  if (!r.ok()) return r;
  if (!m.psi.is_bijective()) r.add("psi is not bijective");
  for (Sign s : {Sign::Minus, Sign::Plus})
    if (!m.side(s).is_bijective()) r.add(std::string("psi") + sign_str(s) + " is not bijective");
  for (Sign s : {Sign::Minus, Sign::Plus}) {
    Sign t = image_side(m.orientation, s);
    for (const auto& x : I1.H->generators())
      if (m.side(s)(I1.phi(s)(x)) != I2.phi(t)(m.psi(x))) {
        r.add(std::string("square fails: psi") + sign_str(s) + " o phi1" + sign_str(s) + " != phi2" + sign_str(t) +
              " o psi at generator " + x.str());
        break;
      }
  }
  return r;
}

inline IsotropyIso compose_isotropy_iso(const IsotropyIso& m1, const IsotropyIso& m2) {
  IsotropyIso out;
  out.orientation = m1.orientation * m2.orientation;
  out.psi = hom_compose(m1.psi, m2.psi);
  for (Sign s : {Sign::Minus, Sign::Plus})
    out.side(s) = hom_compose(m1.side(image_side(m2.orientation, s)), m2.side(s));
  return out;
}

inline IsotropyIso inverse_isotropy_iso(const IsotropyIso& m) {
  IsotropyIso out;
  out.orientation = m.orientation;
  out.psi = inverse(m.psi);
  for (Sign s : {Sign::Minus, Sign::Plus}) out.side(image_side(m.orientation, s)) = inverse(m.side(s));
  return out;
}

inline IsotropyIso identity_isotropy_iso(const IsotropyData& I) {
  return {Orientation::Preserving, Hom::identity(I.H), Hom::identity(I.G_minus), Hom::identity(I.G_plus)};
}

// ---------------------------------------------------------------------------
// Holonomy layer

struct HolonomyIso {
  IsotropyIso iso;
  Element h;  // in H2

  bool operator==(const HolonomyIso& o) const { return iso == o.iso && h == o.h; }
};

inline ValidationReport validate_holonomy_iso(const HolonomyIso& m, const HolonomyData& D1, const HolonomyData& D2) {
  ValidationReport r = validate_isotropy_iso(m.iso, D1.iso, D2.iso);
  if (!r.ok()) return r;
  const auto& H2 = D2.iso.H;
  if (!H2->contains(m.h)) {
    r.add("h = " + m.h.str() + " is not in H2");
    return r;
  }
  const auto& psi = m.iso.psi;
  for (const auto& x : D1.iso.H->generators()) {
    Element lhs = D2.hol(psi(x));
    Element rhs = H2->conj(m.h, psi(D1.hol(x)));
    if (lhs != rhs) {
      r.add("(i) fails on H at generator " + x.str() + ": hol2 psi = " + lhs.str() + ", C_h psi hol1 = " + rhs.str());
      break;
    }
  }
  for (Sign s : {Sign::Minus, Sign::Plus}) {
    Sign t = image_side(m.iso.orientation, s);
    const auto& G1 = D1.iso.G(s);
    const auto& G2 = D2.iso.G(t);
    const auto& ps = m.iso.side(s);
    Element ph = D2.iso.phi(t)(m.h);
    for (const auto& y : G1->generators()) {
      Element lhs = G2->conj(D2.gamma(t), ps(y));
      Element rhs = G2->conj(ph, ps(G1->conj(D1.gamma(s), y)));
      if (lhs != rhs) {
        r.add(std::string("(i) fails on G") + sign_str(s) + " at generator " + y.str());
        break;
      }
    }
    Element want = G2->mul(D2.gamma(t), G2->inv(ps(D1.gamma(s))));
    if (ph != want)
      r.add(std::string("(ii) fails on side ") + sign_str(s) + ": phi2" + sign_str(t) + "(h) = " + ph.str() +
            ", expected " + want.str());
  }
  if (m.iso.orientation == Orientation::Reversing) r.notes.push_back(kReversingNote);
  return r;
}

/// (Psi1 o Psi2, h1 psi1(h2)).
inline HolonomyIso compose_holonomy_iso(const HolonomyIso& m1, const HolonomyIso& m2) {
  HolonomyIso out;
  out.iso = compose_isotropy_iso(m1.iso, m2.iso);
  out.h = m1.iso.psi.target()->mul(m1.h, m1.iso.psi(m2.h));
  return out;
}

/// (Psi^-1, psi^-1(h^-1)).
inline HolonomyIso inverse_holonomy_iso(const HolonomyIso& m) {
  HolonomyIso out;
  out.iso = inverse_isotropy_iso(m.iso);
  out.h = out.iso.psi(m.iso.psi.target()->inv(m.h));
  return out;
}

inline HolonomyIso identity_holonomy_iso(const HolonomyData& D) {
  return {identity_isotropy_iso(D.iso), D.iso.H->identity()};
}

/// (C_alpha with psi+- = C_{phi+-(alpha)}, h = hol(alpha) alpha^-1).
inline HolonomyIso inner_holonomy_auto(const HolonomyData& D, const Element& alpha) {
  const auto& H = D.iso.H;
  if (!H->contains(alpha)) throw std::invalid_argument("alpha " + alpha.str() + " is not in H");
  HolonomyIso out;
  out.iso.orientation = Orientation::Preserving;
  out.iso.psi = conjugation_aut(H, alpha);
  for (Sign s : {Sign::Minus, Sign::Plus}) out.iso.side(s) = conjugation_aut(D.iso.G(s), D.iso.phi(s)(alpha));
  out.h = H->mul(D.hol(alpha), H->inv(alpha));
  return out;
}

namespace detail {

inline bool is_identity_hom(const Hom& f) {
  for (const auto& g : f.source()->generators())
    if (f(g) != g) return false;
  return true;
}

/// Appends (coefficients, rhs) rows expressing f(x) == target in an abelian
/// target group, where x is the block of variables starting at `offset`.
/// With minus_f, the row reads f(x) - minus_f(y) == target, y at minus_offset.
inline void add_abelian_rows(linalg::LinearSystem& sys, const Hom& f, std::size_t offset, const Element& target,
                             const Hom* minus_f = nullptr, std::size_t minus_offset = 0) {
  const auto& T = f.target();
  for (std::size_t r = 0; r < T->rank(); ++r) {
    linalg::Vec co(sys.nvars, 0);
    for (std::size_t c = 0; c < f.images().size(); ++c) co[offset + c] = f.images()[c].c[r];
    if (minus_f)
      for (std::size_t c = 0; c < minus_f->images().size(); ++c)
        co[minus_offset + c] = linalg::sub(co[minus_offset + c], minus_f->images()[c].c[r]);
    sys.add(co, target.c[r], T->modulus(r));
  }
}

inline Element lattice_point(const GroupPtr& G, const linalg::Vec& x) { return G->canonical(Element(x)); }

}  // namespace detail

/// A witness alpha with m == inner_holonomy_auto(D, alpha), if one exists.
inline std::optional<Element> is_inner_holonomy(const HolonomyIso& m, const HolonomyData& D) {
  if (m.iso.orientation != Orientation::Preserving) return std::nullopt;
  const auto& H = D.iso.H;
  if (H->is_finite()) {
    for (const auto& a : H->elements())
      if (inner_holonomy_auto(D, a) == m) return a;
    return std::nullopt;
  }
  if (H->kind() != GroupKind::FgAbelian || D.iso.G_minus->kind() != GroupKind::FgAbelian ||
      D.iso.G_plus->kind() != GroupKind::FgAbelian)
    throw UnsupportedBackend("inner test for infinite H needs abelian adjacent groups");
  if (!detail::is_identity_hom(m.iso.psi) || !detail::is_identity_hom(m.iso.psi_minus) ||
      !detail::is_identity_hom(m.iso.psi_plus))
    return std::nullopt;
  // hol(alpha) - alpha == h
  linalg::LinearSystem sys;
  sys.nvars = H->rank();
  auto hol = D.hol.matrix();
  for (std::size_t r = 0; r < H->rank(); ++r) {
    linalg::Vec co = hol[r];
    co[r] = linalg::sub(co[r], 1);
    sys.add(co, m.h.c[r], H->modulus(r));
  }
  auto lat = linalg::solve(sys);
  if (!lat) return std::nullopt;
  return detail::lattice_point(H, lat->origin);
}

// ---------------------------------------------------------------------------
// Per-edge holonomy isomorphism search

struct SolveOptions {
  /// Bound on free coordinates wherever an infinite family is enumerated.
  Int max_entry = 8;
};

struct HolonomyIsoSet {
  std::vector<HolonomyIso> isos;
  bool complete = true;
};

namespace detail {

inline std::vector<Element> abelian_box(const GroupPtr& G, Int bound) {
  std::vector<Element> out;
  std::vector<Int> lo(G->rank()), hi(G->rank());
  for (std::size_t i = 0; i < G->rank(); ++i) {
    Int d = G->modulus(i);
    lo[i] = d == 0 ? -bound : 0;
    hi[i] = d == 0 ? bound : d - 1;
  }
  std::vector<Int> cur = lo;
  if (G->rank() == 0) return {G->identity()};
  while (true) {
    out.emplace_back(cur);
    std::size_t i = G->rank();
    while (i > 0) {
      --i;
      if (cur[i] < hi[i]) {
        ++cur[i];
        break;
      }
      cur[i] = lo[i];
      if (i == 0) return out;
    }
  }
}

}  // namespace detail

/// All holonomy isomorphisms D1 -> D2 with the given orientation.
inline HolonomyIsoSet holonomy_isos(const HolonomyData& D1, const HolonomyData& D2, Orientation o,
                                    const SolveOptions& opt = {}) {
  HolonomyIsoSet out;
  const auto& H1 = D1.iso.H;
  const auto& H2 = D2.iso.H;
  SearchOptions sopt;
  sopt.max_entry = opt.max_entry;

  auto side_maps = [&](const Hom& psi, Sign s, const std::optional<Element>& h) {
    Sign t = image_side(o, s);
    const auto& G1 = D1.iso.G(s);
    const auto& G2 = D2.iso.G(t);
    ConstraintSet cs;
    for (const auto& x : H1->generators()) cs.pins.push_back({D1.iso.phi(s)(x), D2.iso.phi(t)(psi(x))});
    if (h) {
      Element ph = D2.iso.phi(t)(*h);
      cs.pins.push_back({D1.gamma(s), G2->mul(G2->inv(ph), D2.gamma(t))});
      if (!G1->is_abelian() || !G2->is_abelian())
        cs.intertwine.push_back(
            {D1.hol_side(s), hom_compose(conjugation_aut(G2, G2->inv(ph)), D2.hol_side(t))});
    }
    return solve_isomorphisms(G1, G2, cs, sopt);
  };

  auto push = [&](HolonomyIso m) {
    if (validate_holonomy_iso(m, D1, D2).ok()) out.isos.push_back(std::move(m));
  };

  if (H1->is_finite() != H2->is_finite()) return out;
  if (H2->is_finite()) {
    for (const auto& h : H2->elements()) {
      ConstraintSet cs;
      cs.intertwine.push_back({D1.hol, hom_compose(conjugation_aut(H2, H2->inv(h)), D2.hol)});
      auto psis = solve_isomorphisms(H1, H2, cs, sopt);
      out.complete = out.complete && psis.complete;
      for (const auto& psi : psis.isos) {
        auto minus = side_maps(psi, Sign::Minus, h);
        auto plus = side_maps(psi, Sign::Plus, h);
        out.complete = out.complete && minus.complete && plus.complete;
        for (const auto& pm : minus.isos)
          for (const auto& pp : plus.isos) push({IsotropyIso{o, psi, pm, pp}, h});
      }
    }
  } else {
    if (H1->kind() != GroupKind::FgAbelian || H2->kind() != GroupKind::FgAbelian)
      throw UnsupportedBackend("infinite H must be finitely generated abelian");
    for (Sign s : {Sign::Minus, Sign::Plus})
      if (D2.iso.G(s)->kind() != GroupKind::FgAbelian || D1.iso.G(s)->kind() != GroupKind::FgAbelian)
        throw UnsupportedBackend("infinite H with a non-abelian-backend vertex group");
    ConstraintSet cs;
    cs.intertwine.push_back({D1.hol, D2.hol});
    auto psis = solve_isomorphisms(H1, H2, cs, sopt);
    out.complete = psis.complete;
    for (const auto& psi : psis.isos) {
      auto minus = side_maps(psi, Sign::Minus, std::nullopt);
      auto plus = side_maps(psi, Sign::Plus, std::nullopt);
      out.complete = out.complete && minus.complete && plus.complete;
      for (const auto& pm : minus.isos)
        for (const auto& pp : plus.isos) {
          // (ii) on both sides is linear in h.
          linalg::LinearSystem sys;
          sys.nvars = H2->rank();
          for (Sign s : {Sign::Minus, Sign::Plus}) {
            Sign t = image_side(o, s);
            const auto& G2 = D2.iso.G(t);
            const Hom& ps = s == Sign::Plus ? pp : pm;
            Element want = G2->mul(D2.gamma(t), G2->inv(ps(D1.gamma(s))));
            detail::add_abelian_rows(sys, D2.iso.phi(t), 0, want);
          }
          auto lat = linalg::solve(sys);
          if (!lat) continue;
          linalg::Vec lo(sys.nvars), hi(sys.nvars);
          for (std::size_t i = 0; i < sys.nvars; ++i) {
            Int d = H2->modulus(i);
            lo[i] = d == 0 ? -opt.max_entry : 0;
            hi[i] = d == 0 ? opt.max_entry : d - 1;
          }
          for (const auto& b : lat->basis)
            for (std::size_t i = 0; i < static_cast<std::size_t>(H2->free_rank()); ++i)
              if (b[i] != 0) out.complete = false;
          std::set<Element> hs;
          linalg::enumerate_box(*lat, lo, hi, [&](const linalg::Vec& x) {
            hs.insert(H2->canonical(Element(x)));
            return true;
          });
          for (const auto& h : hs) push({IsotropyIso{o, psi, pm, pp}, h});
        }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Discrete layer

/// Cocycle values at one source vertex: edges incident to it (ascending),
/// the side of each edge touching the vertex, and g[a][b] = g_{edges[a] edges[b]}.
struct CocycleTable {
  std::vector<std::size_t> edges;
  std::vector<Sign> sides;
  std::vector<std::vector<Element>> g;

  bool operator==(const CocycleTable&) const = default;
};

struct DiscreteDataIso {
  Orientation orientation = Orientation::Preserving;
  std::vector<std::size_t> vertex_map;  // source vertex index -> target vertex index
  std::vector<std::size_t> edge_map;    // source edge index -> target edge index
  std::vector<HolonomyIso> edge_isos;   // indexed by source edge
  std::vector<CocycleTable> cocycles;   // indexed by source vertex

  bool operator==(const DiscreteDataIso&) const = default;
};

/// Flat integer encoding; lexicographic order on it is the canonical order.
inline std::vector<Int> iso_key(const DiscreteDataIso& F) {
  std::vector<Int> k;
  auto put = [&](const Element& e) { k.insert(k.end(), e.c.begin(), e.c.end()); };
  k.push_back(F.orientation == Orientation::Preserving ? 0 : 1);
  for (auto v : F.vertex_map) k.push_back(static_cast<Int>(v));
  for (auto e : F.edge_map) k.push_back(static_cast<Int>(e));
  for (const auto& m : F.edge_isos) {
    for (const Hom* f : {&m.iso.psi, &m.iso.psi_minus, &m.iso.psi_plus})
      for (const auto& x : f->images()) put(x);
    put(m.h);
  }
  for (const auto& t : F.cocycles)
    for (const auto& row : t.g)
      for (const auto& x : row) put(x);
  return k;
}

inline CocycleTable blank_cocycle_table(const DiscreteData& Gr, std::size_t v) {
  CocycleTable t;
  for (auto [e, s] : Gr.incident(v)) {
    t.edges.push_back(e);
    t.sides.push_back(s);
  }
  return t;
}

inline ValidationReport validate_discrete_iso(const DiscreteDataIso& F, const DiscreteData& Gr1,
                                              const DiscreteData& Gr2) {
  ValidationReport r;
  const std::size_t nv = Gr1.vertices.size(), ne = Gr1.edges.size();
  if (Gr2.vertices.size() != nv || Gr2.edges.size() != ne) {
    r.add("graphs have different vertex or edge counts");
    return r;
  }
  if (F.vertex_map.size() != nv || F.edge_map.size() != ne || F.edge_isos.size() != ne || F.cocycles.size() != nv) {
    r.add("iso has wrong shape");
    return r;
  }
  std::vector<bool> hitv(nv), hite(ne);
  for (auto v : F.vertex_map) {
    if (v >= nv || hitv[v]) {
      r.add("vertex map is not a bijection");
      return r;
    }
    hitv[v] = true;
  }
  for (auto e : F.edge_map) {
    if (e >= ne || hite[e]) {
      r.add("edge map is not a bijection");
      return r;
    }
    hite[e] = true;
  }
  for (std::size_t v = 0; v < nv; ++v)
    if (Gr2.vertices[F.vertex_map[v]].sign != image_side(F.orientation, Gr1.vertices[v].sign))
      r.add("vertex " + Gr1.vertices[v].id + ": sign not " + (F.orientation == Orientation::Preserving ? "preserved" : "swapped"));
  for (std::size_t i = 0; i < ne; ++i) {
    const auto& e1 = Gr1.edges[i];
    const auto& e2 = Gr2.edges[F.edge_map[i]];
    const std::string at = "edge " + e1.id + ": ";
    for (Sign s : {Sign::Minus, Sign::Plus})
      if (F.vertex_map[Gr1.endpoint(i, s)] != Gr2.endpoint(F.edge_map[i], image_side(F.orientation, s)))
        r.add(at + "graph map does not carry the " + sign_str(s) + " endpoint to the matching endpoint of " + e2.id);
    if (F.edge_isos[i].iso.orientation != F.orientation) r.add(at + "(i) edge orientation differs from global");
    if (e1.period != e2.period)
      r.add(at + "(ii) period " + rational_str(e1.period) + " != " + rational_str(e2.period) + " of " + e2.id);
    r.merge(validate_holonomy_iso(F.edge_isos[i], e1.hol, e2.hol), at);
  }
  if (!r.ok()) return r;
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& t = F.cocycles[v];
    const auto want = blank_cocycle_table(Gr1, v);
    const std::string at = "vertex " + Gr1.vertices[v].id + ": ";
    if (t.edges != want.edges || t.sides != want.sides || t.g.size() != t.edges.size()) {
      r.add(at + "cocycle table does not match incident edges");
      continue;
    }
    const auto G1 = Gr1.vertex_group(v);
    const auto G2 = Gr2.vertex_group(F.vertex_map[v]);
    const std::size_t k = t.edges.size();
    bool shape_ok = true;
    for (std::size_t a = 0; a < k && shape_ok; ++a) {
      if (t.g[a].size() != k) shape_ok = false;
      for (std::size_t b = 0; b < k && shape_ok; ++b)
        if (!G2->contains(t.g[a][b])) shape_ok = false;
    }
    if (!shape_ok) {
      r.add(at + "cocycle table has wrong shape or values outside the vertex group");
      continue;
    }
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        const Hom& pa = F.edge_isos[t.edges[a]].iso.side(t.sides[a]);
        const Hom& pb = F.edge_isos[t.edges[b]].iso.side(t.sides[b]);
        for (const auto& y : G1->generators())
          if (pa(y) != G2->conj(t.g[a][b], pb(y))) {
            r.add(at + "(iii) psi_" + Gr1.edges[t.edges[a]].id + " != C_g psi_" + Gr1.edges[t.edges[b]].id);
            break;
          }
        for (std::size_t c = 0; c < k; ++c)
          if (G2->mul(t.g[a][b], t.g[b][c]) != t.g[a][c]) {
            r.add(at + "(iv) g_" + Gr1.edges[t.edges[a]].id + Gr1.edges[t.edges[b]].id + " g_" +
                  Gr1.edges[t.edges[b]].id + Gr1.edges[t.edges[c]].id + " != g_" + Gr1.edges[t.edges[a]].id +
                  Gr1.edges[t.edges[c]].id);
            break;
          }
      }
  }
  return r;
}

inline DiscreteDataIso identity_discrete_iso(const DiscreteData& Gr) {
  DiscreteDataIso F;
  for (std::size_t v = 0; v < Gr.vertices.size(); ++v) {
    F.vertex_map.push_back(v);
    auto t = blank_cocycle_table(Gr, v);
    auto G = Gr.vertex_group(v);
    t.g.assign(t.edges.size(), std::vector<Element>(t.edges.size(), G->identity()));
    F.cocycles.push_back(std::move(t));
  }
  for (std::size_t e = 0; e < Gr.edges.size(); ++e) {
    F.edge_map.push_back(e);
    F.edge_isos.push_back(identity_holonomy_iso(Gr.edges[e].hol));
  }
  return F;
}

/// F1 o F2 where F2: Gr1 -> Gr2 and F1: Gr2 -> Gr3.
inline DiscreteDataIso compose_discrete_iso(const DiscreteDataIso& F1, const DiscreteDataIso& F2) {
  if (F1.vertex_map.size() != F2.vertex_map.size() || F1.edge_map.size() != F2.edge_map.size())
    throw std::invalid_argument("cannot compose isos of differently shaped graphs");
  DiscreteDataIso out;
  out.orientation = F1.orientation * F2.orientation;
  for (auto v : F2.vertex_map) out.vertex_map.push_back(F1.vertex_map.at(v));
  for (std::size_t i = 0; i < F2.edge_map.size(); ++i) {
    out.edge_map.push_back(F1.edge_map.at(F2.edge_map[i]));
    out.edge_isos.push_back(compose_holonomy_iso(F1.edge_isos[F2.edge_map[i]], F2.edge_isos[i]));
  }
  for (std::size_t v = 0; v < F2.cocycles.size(); ++v) {
    const auto& t2 = F2.cocycles[v];
    const auto& t1 = F1.cocycles.at(F2.vertex_map[v]);
    CocycleTable t;
    t.edges = t2.edges;
    t.sides = t2.sides;
    const std::size_t k = t2.edges.size();
    std::vector<std::size_t> pos(k);
    for (std::size_t a = 0; a < k; ++a) {
      auto it = std::find(t1.edges.begin(), t1.edges.end(), F2.edge_map[t2.edges[a]]);
      if (it == t1.edges.end()) throw std::invalid_argument("cocycle tables do not line up under the edge map");
      pos[a] = static_cast<std::size_t>(it - t1.edges.begin());
    }
    t.g.assign(k, std::vector<Element>(k));
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        // g'_{F(i)F(j)} psi'_{F(j)}(g_ij)
        const Hom& pj = F1.edge_isos[t1.edges[pos[b]]].iso.side(t1.sides[pos[b]]);
        t.g[a][b] = pj.target()->mul(t1.g[pos[a]][pos[b]], pj(t2.g[a][b]));
      }
    out.cocycles.push_back(std::move(t));
  }
  return out;
}

inline DiscreteDataIso inverse_discrete_iso(const DiscreteDataIso& F) {
  const std::size_t nv = F.vertex_map.size(), ne = F.edge_map.size();
  DiscreteDataIso out;
  out.orientation = F.orientation;
  out.vertex_map.assign(nv, 0);
  out.edge_map.assign(ne, 0);
  out.edge_isos.resize(ne);
  out.cocycles.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) out.vertex_map[F.vertex_map[v]] = v;
  for (std::size_t i = 0; i < ne; ++i) {
    out.edge_map[F.edge_map[i]] = i;
    out.edge_isos[F.edge_map[i]] = inverse_holonomy_iso(F.edge_isos[i]);
  }
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& t = F.cocycles[v];
    const std::size_t k = t.edges.size();
    std::vector<std::size_t> order(k);
    for (std::size_t a = 0; a < k; ++a) order[a] = a;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return F.edge_map[t.edges[a]] < F.edge_map[t.edges[b]]; });
    CocycleTable u;
    for (auto a : order) {
      u.edges.push_back(F.edge_map[t.edges[a]]);
      u.sides.push_back(image_side(F.orientation, t.sides[a]));
    }
    u.g.assign(k, std::vector<Element>(k));
    for (std::size_t x = 0; x < k; ++x)
      for (std::size_t y = 0; y < k; ++y) {
        // psi_j^-1(g_ij)^-1
        const Hom& inv_j = out.edge_isos[u.edges[y]].iso.side(u.sides[y]);
        const auto& G2 = inv_j.source();
        u.g[x][y] = inv_j(G2->inv(t.g[order[x]][order[y]]));
      }
    out.cocycles[F.vertex_map[v]] = std::move(u);
  }
  return out;
}

/// Identity graph map, (C_alpha_i, hol_i(alpha_i) alpha_i^-1) on each edge and
/// cocycles g_ij = phi_i(alpha_i) phi_j(alpha_j)^-1.
inline DiscreteDataIso inner_discrete_auto(const DiscreteData& Gr, const std::vector<Element>& alphas) {
  if (alphas.size() != Gr.edges.size()) throw std::invalid_argument("need one alpha per edge");
  DiscreteDataIso F = identity_discrete_iso(Gr);
  for (std::size_t e = 0; e < Gr.edges.size(); ++e) F.edge_isos[e] = inner_holonomy_auto(Gr.edges[e].hol, alphas[e]);
  for (std::size_t v = 0; v < Gr.vertices.size(); ++v) {
    auto& t = F.cocycles[v];
    auto G = Gr.vertex_group(v);
    for (std::size_t a = 0; a < t.edges.size(); ++a)
      for (std::size_t b = 0; b < t.edges.size(); ++b) {
        Element pa = Gr.edges[t.edges[a]].hol.iso.phi(t.sides[a])(alphas[t.edges[a]]);
        Element pb = Gr.edges[t.edges[b]].hol.iso.phi(t.sides[b])(alphas[t.edges[b]]);
        t.g[a][b] = G->mul(pa, G->inv(pb));
      }
  }
  return F;
}

/// Witness {alpha_i} with F == inner_discrete_auto(Gr, alphas), if any.
inline std::optional<std::vector<Element>> is_inner_discrete(const DiscreteDataIso& F, const DiscreteData& Gr) {
  if (F.orientation != Orientation::Preserving) return std::nullopt;
  for (std::size_t v = 0; v < F.vertex_map.size(); ++v)
    if (F.vertex_map[v] != v) return std::nullopt;
  for (std::size_t e = 0; e < F.edge_map.size(); ++e)
    if (F.edge_map[e] != e) return std::nullopt;
  const std::size_t ne = Gr.edges.size();
  bool all_finite = true;
  for (const auto& e : Gr.edges) all_finite = all_finite && e.hol.iso.H->is_finite();

  auto cocycle_ok = [&](const std::vector<Element>& alphas, std::size_t upto) {
    for (std::size_t v = 0; v < Gr.vertices.size(); ++v) {
      const auto& t = F.cocycles[v];
      auto G = Gr.vertex_group(v);
      for (std::size_t a = 0; a < t.edges.size(); ++a)
        for (std::size_t b = 0; b < t.edges.size(); ++b) {
          if (t.edges[a] > upto || t.edges[b] > upto) continue;
          Element pa = Gr.edges[t.edges[a]].hol.iso.phi(t.sides[a])(alphas[t.edges[a]]);
          Element pb = Gr.edges[t.edges[b]].hol.iso.phi(t.sides[b])(alphas[t.edges[b]]);
          if (t.g[a][b] != G->mul(pa, G->inv(pb))) return false;
        }
    }
    return true;
  };

  if (all_finite) {
    std::vector<std::vector<Element>> cand(ne);
    for (std::size_t e = 0; e < ne; ++e) {
      for (const auto& a : Gr.edges[e].hol.iso.H->elements())
        if (inner_holonomy_auto(Gr.edges[e].hol, a) == F.edge_isos[e]) cand[e].push_back(a);
      if (cand[e].empty()) return std::nullopt;
    }
    std::vector<Element> alphas(ne);
    std::function<bool(std::size_t)> rec = [&](std::size_t e) {
      if (e == ne) return true;
      for (const auto& a : cand[e]) {
        alphas[e] = a;
        if (cocycle_ok(alphas, e) && rec(e + 1)) return true;
      }
      return false;
    };
    if (rec(0)) return alphas;
    return std::nullopt;
  }

  // Some H_i infinite: everything adjacent must be abelian-backend, all psi
  // maps identities, and the alphas solve one joint linear system.
  for (const auto& e : Gr.edges)
    for (const GroupPtr& g : {e.hol.iso.H, e.hol.iso.G_minus, e.hol.iso.G_plus})
      if (g->kind() != GroupKind::FgAbelian)
        throw UnsupportedBackend("inner test with infinite H needs every adjacent group abelian-backend");
  for (const auto& m : F.edge_isos)
    for (const Hom* f : {&m.iso.psi, &m.iso.psi_minus, &m.iso.psi_plus})
      if (!detail::is_identity_hom(*f)) return std::nullopt;
  std::vector<std::size_t> offset(ne + 1, 0);
  for (std::size_t e = 0; e < ne; ++e) offset[e + 1] = offset[e] + Gr.edges[e].hol.iso.H->rank();
  linalg::LinearSystem sys;
  sys.nvars = offset[ne];
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& D = Gr.edges[e].hol;
    auto hol = D.hol.matrix();
    for (std::size_t r = 0; r < D.iso.H->rank(); ++r) {
      linalg::Vec co(sys.nvars, 0);
      for (std::size_t c = 0; c < D.iso.H->rank(); ++c) co[offset[e] + c] = hol[r][c];
      co[offset[e] + r] = linalg::sub(co[offset[e] + r], 1);
      sys.add(co, F.edge_isos[e].h.c[r], D.iso.H->modulus(r));
    }
  }
  for (std::size_t v = 0; v < Gr.vertices.size(); ++v) {
    const auto& t = F.cocycles[v];
    for (std::size_t a = 0; a < t.edges.size(); ++a)
      for (std::size_t b = 0; b < t.edges.size(); ++b) {
        if (a == b) continue;
        const Hom& fa = Gr.edges[t.edges[a]].hol.iso.phi(t.sides[a]);
        const Hom& fb = Gr.edges[t.edges[b]].hol.iso.phi(t.sides[b]);
        detail::add_abelian_rows(sys, fa, offset[t.edges[a]], t.g[a][b], &fb, offset[t.edges[b]]);
      }
    for (std::size_t a = 0; a < t.edges.size(); ++a)
      if (t.g[a][a] != Gr.vertex_group(v)->identity()) return std::nullopt;
  }
  auto lat = linalg::solve(sys);
  if (!lat) return std::nullopt;
  std::vector<Element> alphas;
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& H = Gr.edges[e].hol.iso.H;
    alphas.push_back(H->canonical(Element(linalg::Vec(lat->origin.begin() + static_cast<std::ptrdiff_t>(offset[e]),
                                                      lat->origin.begin() + static_cast<std::ptrdiff_t>(offset[e + 1])))));
  }
  return alphas;
}

// ---------------------------------------------------------------------------
// Discrete isomorphism search

struct IsoSet {
  std::vector<DiscreteDataIso> isos;  // canonical order
  bool complete = true;
};

namespace detail {

/// Graph maps Gr1 -> Gr2 with orientation o: vertex bijections respecting
/// (swapped) signs, then edge bijections respecting endpoints and periods.
inline void for_each_graph_map(const DiscreteData& Gr1, const DiscreteData& Gr2, Orientation o,
                               const std::function<bool(const std::vector<std::size_t>&,
                                                        const std::vector<std::size_t>&)>& visit) {
  const std::size_t nv = Gr1.vertices.size(), ne = Gr1.edges.size();
  if (Gr2.vertices.size() != nv || Gr2.edges.size() != ne) return;
  std::vector<std::size_t> deg1(nv), deg2(nv);
  for (std::size_t e = 0; e < ne; ++e)
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      ++deg1[Gr1.endpoint(e, s)];
      ++deg2[Gr2.endpoint(e, s)];
    }
  std::vector<std::size_t> vmap(nv), emap(ne);
  std::vector<bool> vused(nv), eused(ne);
  bool stop = false;
  std::function<void(std::size_t)> edges_rec = [&](std::size_t i) {
    if (stop) return;
    if (i == ne) {
      if (!visit(vmap, emap)) stop = true;
      return;
    }
    const auto p = vmap[Gr1.endpoint(i, Sign::Plus)];
    const auto n = vmap[Gr1.endpoint(i, Sign::Minus)];
    for (std::size_t j = 0; j < ne && !stop; ++j) {
      if (eused[j] || Gr1.edges[i].period != Gr2.edges[j].period) continue;
      if (Gr2.endpoint(j, image_side(o, Sign::Plus)) != p || Gr2.endpoint(j, image_side(o, Sign::Minus)) != n)
        continue;
      eused[j] = true;
      emap[i] = j;
      edges_rec(i + 1);
      eused[j] = false;
    }
  };
  std::function<void(std::size_t)> verts_rec = [&](std::size_t v) {
    if (stop) return;
    if (v == nv) {
      edges_rec(0);
      return;
    }
    for (std::size_t w = 0; w < nv && !stop; ++w) {
      if (vused[w] || deg1[v] != deg2[w]) continue;
      if (Gr2.vertices[w].sign != image_side(o, Gr1.vertices[v].sign)) continue;
      vused[w] = true;
      vmap[v] = w;
      verts_rec(v + 1);
      vused[w] = false;
    }
  };
  verts_rec(0);
}

/// Cocycle tables at a vertex given the side maps of its incident edges
/// (base-edge reduction on the first incident edge).
inline std::vector<CocycleTable> cocycle_options(const CocycleTable& blank, const std::vector<const Hom*>& side_maps,
                                                 const GroupPtr& G1, const GroupPtr& G2, const SolveOptions& opt,
                                                 bool& complete) {
  const std::size_t k = blank.edges.size();
  if (k == 0) return {blank};
  std::vector<std::vector<Element>> choices(k);
  choices[0] = {G2->identity()};
  const Hom& p0 = *side_maps[0];
  for (std::size_t a = 1; a < k; ++a) {
    const Hom& pa = *side_maps[a];
    if (G2->is_finite()) {
      for (const auto& g : G2->elements()) {
        bool ok = true;
        for (const auto& y : G1->generators())
          if (pa(y) != G2->conj(g, p0(y))) {
            ok = false;
            break;
          }
        if (ok) choices[a].push_back(g);
      }
    } else {
      if (!G2->is_abelian()) throw UnsupportedBackend("infinite non-abelian vertex group");
      bool same = true;
      for (const auto& y : G1->generators()) same = same && pa(y) == p0(y);
      if (same) {
        choices[a] = abelian_box(G2, opt.max_entry);
        if (G2->free_rank() > 0) complete = false;
      }
    }
    if (choices[a].empty()) return {};
  }
  std::vector<CocycleTable> out;
  std::vector<Element> pick(k);
  std::function<void(std::size_t)> rec = [&](std::size_t a) {
    if (a == k) {
      CocycleTable t = blank;
      t.g.assign(k, std::vector<Element>(k));
      for (std::size_t x = 0; x < k; ++x)
        for (std::size_t y = 0; y < k; ++y) t.g[x][y] = G2->mul(pick[x], G2->inv(pick[y]));
      out.push_back(std::move(t));
      return;
    }
    for (const auto& g : choices[a]) {
      pick[a] = g;
      rec(a + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace detail

/// Visits isomorphisms Gr1 -> Gr2 until `visit` returns false. Returns the
/// completeness flag of the underlying searches.
inline bool for_each_discrete_iso(const DiscreteData& Gr1, const DiscreteData& Gr2, const SolveOptions& opt,
                                  const std::function<bool(DiscreteDataIso&&)>& visit) {
  bool complete = true;
  bool stop = false;
  const std::size_t nv = Gr1.vertices.size(), ne = Gr1.edges.size();
  std::vector<CocycleTable> blanks;
  std::vector<std::size_t> last_edge(nv, 0);
  std::vector<bool> has_edges(nv, false);
  for (std::size_t v = 0; v < nv; ++v) {
    blanks.push_back(blank_cocycle_table(Gr1, v));
    if (!blanks[v].edges.empty()) {
      has_edges[v] = true;
      last_edge[v] = blanks[v].edges.back();
    }
  }
  for (Orientation o : {Orientation::Preserving, Orientation::Reversing}) {
    if (stop) break;
    std::map<std::pair<std::size_t, std::size_t>, HolonomyIsoSet> cache;
    auto edge_set = [&](std::size_t i, std::size_t j) -> const HolonomyIsoSet& {
      auto key = std::make_pair(i, j);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, holonomy_isos(Gr1.edges[i].hol, Gr2.edges[j].hol, o, opt)).first;
      return it->second;
    };
    detail::for_each_graph_map(Gr1, Gr2, o, [&](const auto& vmap, const auto& emap) {
      std::vector<const HolonomyIsoSet*> sets(ne);
      for (std::size_t i = 0; i < ne; ++i) {
        sets[i] = &edge_set(i, emap[i]);
        complete = complete && sets[i]->complete;
        if (sets[i]->isos.empty()) return true;
      }
      DiscreteDataIso F;
      F.orientation = o;
      F.vertex_map = vmap;
      F.edge_map = emap;
      F.edge_isos.resize(ne);
      F.cocycles.resize(nv);
      std::vector<std::vector<CocycleTable>> options(nv);
      for (std::size_t v = 0; v < nv; ++v)
        if (!has_edges[v]) options[v] = {blanks[v]};

      auto fill_vertex = [&](std::size_t v) {
        std::vector<const Hom*> maps;
        for (std::size_t a = 0; a < blanks[v].edges.size(); ++a)
          maps.push_back(&F.edge_isos[blanks[v].edges[a]].iso.side(blanks[v].sides[a]));
        options[v] = detail::cocycle_options(blanks[v], maps, Gr1.vertex_group(v), Gr2.vertex_group(vmap[v]), opt,
                                             complete);
        return !options[v].empty();
      };

      std::function<void(std::size_t)> tables_rec = [&](std::size_t v) {
        if (stop) return;
        if (v == nv) {
          DiscreteDataIso copy = F;
          if (!visit(std::move(copy))) stop = true;
          return;
        }
        for (const auto& t : options[v]) {
          F.cocycles[v] = t;
          tables_rec(v + 1);
          if (stop) return;
        }
      };
      std::function<void(std::size_t)> edges_rec = [&](std::size_t i) {
        if (stop) return;
        if (i == ne) {
          tables_rec(0);
          return;
        }
        for (const auto& m : sets[i]->isos) {
          F.edge_isos[i] = m;
          bool ok = true;
          for (std::size_t v = 0; v < nv && ok; ++v)
            if (has_edges[v] && last_edge[v] == i) ok = fill_vertex(v);
          if (ok) edges_rec(i + 1);
          if (stop) return;
        }
      };
      edges_rec(0);
      return !stop;
    });
  }
  return complete;
}

inline IsoSet find_discrete_isos(const DiscreteData& Gr1, const DiscreteData& Gr2, const SolveOptions& opt = {}) {
  IsoSet out;
  out.complete = for_each_discrete_iso(Gr1, Gr2, opt, [&](DiscreteDataIso&& F) {
    out.isos.push_back(std::move(F));
    return true;
  });
  std::sort(out.isos.begin(), out.isos.end(),
            [](const DiscreteDataIso& a, const DiscreteDataIso& b) { return iso_key(a) < iso_key(b); });
  return out;
}

struct MoritaDecision {
  bool equivalent = false;
  bool complete = true;  // false: a negative answer only covers the bounded search
  std::optional<DiscreteDataIso> witness;
};

inline MoritaDecision morita_equivalent(const DiscreteData& Gr1, const DiscreteData& Gr2, const SolveOptions& opt = {}) {
  MoritaDecision d;
  d.complete = for_each_discrete_iso(Gr1, Gr2, opt, [&](DiscreteDataIso&& F) {
    d.witness = std::move(F);
    return false;
  });
  d.equivalent = d.witness.has_value();
  if (d.equivalent) d.complete = true;
  return d;
}

// ---------------------------------------------------------------------------
// Quotient by inner automorphisms

/// Z^gens / rowspace(relations), with coordinates of each class.
struct AbelianPresentation {
  std::vector<std::size_t> gens;  // class ids
  linalg::Mat relations;
  linalg::Vec invariants;  // Smith invariants; 0 = infinite cyclic
  std::map<std::size_t, linalg::Vec> coords;  // class id -> exponent vector
  bool bounded = false;  // relations found by bounded search only
};

struct OutAutDescription {
  std::vector<DiscreteDataIso> autos;  // canonical order
  std::vector<std::size_t> class_of;   // per auto
  std::vector<std::size_t> reps;       // per class: index of its smallest auto
  bool complete = true;                // autos enumeration provably complete
  std::vector<std::vector<std::size_t>> table;  // class product table (complete case)
  std::vector<std::size_t> inverse_class;       // complete case
  std::size_t identity_class = 0;
  std::optional<bool> abelian;
  std::optional<AbelianPresentation> presentation;

  std::size_t num_classes() const { return reps.size(); }
  const DiscreteDataIso& rep(std::size_t c) const { return autos[reps[c]]; }
};

namespace detail {

/// Class lookup. With all H_i finite the key of F is the least encoding over
/// its inner coset; otherwise autos are bucketed by everything an inner auto
/// cannot change and matched by an exact inner test.
class Classifier {
 public:
  explicit Classifier(const DiscreteData& Gr) : gr_(Gr) {
    finite_h_ = true;
    for (const auto& e : Gr.edges) finite_h_ = finite_h_ && e.hol.iso.H->is_finite();
    if (!finite_h_) return;
    std::vector<Element> alphas(Gr.edges.size());
    std::function<void(std::size_t)> rec = [&](std::size_t e) {
      if (e == Gr.edges.size()) {
        inner_.push_back(inner_discrete_auto(Gr, alphas));
        return;
      }
      for (const auto& a : Gr.edges[e].hol.iso.H->elements()) {
        alphas[e] = a;
        rec(e + 1);
      }
    };
    rec(0);
  }

  std::optional<std::size_t> find(const DiscreteDataIso& F) const {
    if (finite_h_) {
      auto it = by_key_.find(coset_key(F));
      if (it == by_key_.end()) return std::nullopt;
      return it->second;
    }
    auto it = buckets_.find(bucket_key(F));
    if (it == buckets_.end()) return std::nullopt;
    auto Finv = inverse_discrete_iso(F);
    for (const auto& [cls, rep] : it->second)
      if (is_inner_discrete(compose_discrete_iso(rep, Finv), gr_)) return cls;
    return std::nullopt;
  }

  /// Registers F; returns its class id and whether it was new.
  std::pair<std::size_t, bool> insert(const DiscreteDataIso& F, std::size_t next_id) {
    if (finite_h_) {
      auto [it, fresh] = by_key_.emplace(coset_key(F), next_id);
      return {it->second, fresh};
    }
    if (auto c = find(F)) return {*c, false};
    buckets_[bucket_key(F)].emplace_back(next_id, F);
    return {next_id, true};
  }

  std::size_t inner_count() const { return inner_.size(); }

 private:
  std::vector<Int> coset_key(const DiscreteDataIso& F) const {
    std::vector<Int> best;
    for (const auto& I : inner_) {
      auto k = iso_key(compose_discrete_iso(F, I));
      if (best.empty() || k < best) best = std::move(k);
    }
    return best;
  }

  static std::vector<Int> bucket_key(const DiscreteDataIso& F) {
    std::vector<Int> k;
    k.push_back(F.orientation == Orientation::Preserving ? 0 : 1);
    for (auto v : F.vertex_map) k.push_back(static_cast<Int>(v));
    for (auto e : F.edge_map) k.push_back(static_cast<Int>(e));
    for (const auto& m : F.edge_isos)
      for (const Hom* f : {&m.iso.psi, &m.iso.psi_minus, &m.iso.psi_plus})
        for (const auto& x : f->images()) k.insert(k.end(), x.c.begin(), x.c.end());
    return k;
  }

  const DiscreteData& gr_;
  bool finite_h_ = true;
  std::vector<DiscreteDataIso> inner_;
  std::map<std::vector<Int>, std::size_t> by_key_;
  std::map<std::vector<Int>, std::vector<std::pair<std::size_t, DiscreteDataIso>>> buckets_;
};

/// Sum of absolute coordinates over all infinite-group data of F.
inline Int iso_size(const DiscreteDataIso& F) {
  Int m = 0;
  auto put = [&](const GroupPtr& G, const Element& e) {
    if (G->kind() != GroupKind::FgAbelian) return;
    for (Int x : e.c) m += x < 0 ? -x : x;
  };
  for (const auto& e : F.edge_isos) {
    for (const Hom* f : {&e.iso.psi, &e.iso.psi_minus, &e.iso.psi_plus})
      for (const auto& x : f->images()) put(f->target(), x);
    put(e.iso.psi.target(), e.h);
  }
  return m;
}

}  // namespace detail

struct OutAutOptions {
  SolveOptions solve;
};

class OutAutComputer {
 public:
  OutAutComputer(const DiscreteData& Gr, OutAutOptions opt) : gr_(Gr), opt_(opt), cls_(Gr) {}

  OutAutDescription run() {
    OutAutDescription d;
    auto all = find_discrete_isos(gr_, gr_, opt_.solve);
    d.autos = std::move(all.isos);
    d.complete = all.complete;
    for (const auto& F : d.autos) {
      auto [c, fresh] = cls_.insert(F, d.reps.size());
      if (fresh)
        d.reps.push_back(d.class_of.size());
      else if (detail::iso_size(F) < detail::iso_size(d.rep(c)))
        d.reps[c] = d.class_of.size();
      d.class_of.push_back(c);
    }
    auto id = classify(identity_discrete_iso(gr_));
    if (!id) throw std::logic_error("identity automorphism missing from enumeration");
    d.identity_class = *id;
    const std::size_t n = d.num_classes();
    if (d.complete) {
      // every composite is itself one of the enumerated autos
      std::map<std::vector<Int>, std::size_t> index;
      for (std::size_t i = 0; i < d.autos.size(); ++i) index.emplace(iso_key(d.autos[i]), i);
      d.table.assign(n, std::vector<std::size_t>(n));
      d.inverse_class.assign(n, 0);
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          auto it = index.find(iso_key(compose_discrete_iso(d.rep(a), d.rep(b))));
          if (it == index.end()) throw std::logic_error("class product escaped a complete enumeration");
          d.table[a][b] = d.class_of[it->second];
        }
        for (std::size_t b = 0; b < n; ++b)
          if (d.table[a][b] == d.identity_class) d.inverse_class[a] = b;
      }
      bool ab = true;
      for (std::size_t a = 0; a < n && ab; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (d.table[a][b] != d.table[b][a]) {
            ab = false;
            break;
          }
      d.abelian = ab;
      if (ab) d.presentation = table_presentation(d);
    } else {
      d.presentation = bounded_presentation(d);
      if (d.presentation) d.abelian = true;
    }
    return d;
  }

  std::optional<std::size_t> classify(const DiscreteDataIso& F) const { return cls_.find(F); }

 private:
  /// Greedy generators in class order; coordinates from a breadth-first walk
  /// of the Cayley graph, relations from the edges that close cycles.
  static AbelianPresentation table_presentation(const OutAutDescription& d) {
    AbelianPresentation p;
    const std::size_t n = d.num_classes();
    auto walk = [&] {
      const std::size_t g = p.gens.size();
      p.coords.clear();
      p.relations.clear();
      p.coords[d.identity_class] = linalg::Vec(g, 0);
      std::deque<std::size_t> queue{d.identity_class};
      while (!queue.empty()) {
        std::size_t c = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < g; ++i) {
          std::size_t next = d.table[c][p.gens[i]];
          linalg::Vec x = p.coords[c];
          ++x[i];
          auto it = p.coords.find(next);
          if (it == p.coords.end()) {
            p.coords[next] = x;
            queue.push_back(next);
          } else {
            for (std::size_t k = 0; k < g; ++k) x[k] -= it->second[k];
            p.relations.push_back(std::move(x));
          }
        }
      }
    };
    walk();
    for (std::size_t c = 0; c < n; ++c) {
      if (p.coords.count(c)) continue;
      p.gens.push_back(c);
      walk();
    }
    p.relations = linalg::hermite_basis(std::move(p.relations), p.gens.size());
    p.invariants = linalg::smith_invariants(p.relations, p.gens.size());
    return p;
  }

  /// Presentation of the subgroup spanned by the found classes. Generators are
  /// taken greedily by size; a breadth-first walk of the Cayley graph on the
  /// found classes assigns coordinates, and every edge closing a cycle gives a
  /// relation. Returns nullopt if two generators fail to commute.
  std::optional<AbelianPresentation> bounded_presentation(const OutAutDescription& d) const {
    const std::size_t n = d.num_classes();
    std::vector<std::size_t> order(n);
    for (std::size_t c = 0; c < n; ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return detail::iso_size(d.rep(a)) < detail::iso_size(d.rep(b));
    });
    AbelianPresentation p;
    p.bounded = true;
    std::vector<DiscreteDataIso> gen_isos;
    auto walk = [&] {
      const std::size_t g = p.gens.size();
      p.coords.clear();
      p.relations.clear();
      p.coords[d.identity_class] = linalg::Vec(g, 0);
      std::deque<std::size_t> queue{d.identity_class};
      while (!queue.empty()) {
        std::size_t c = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < g; ++i)
          for (Int s : {1, -1}) {
            auto next = classify(compose_discrete_iso(d.rep(c), gen_isos[2 * i + (s < 0 ? 1 : 0)]));
            if (!next) continue;
            linalg::Vec x = p.coords[c];
            x[i] += s;
            auto it = p.coords.find(*next);
            if (it == p.coords.end()) {
              p.coords[*next] = x;
              queue.push_back(*next);
              continue;
            }
            linalg::Vec r(g);
            bool zero = true;
            for (std::size_t k = 0; k < g; ++k) {
              r[k] = x[k] - it->second[k];
              zero = zero && r[k] == 0;
            }
            if (!zero) p.relations.push_back(std::move(r));
          }
      }
    };
    walk();
    for (auto c : order) {
      if (p.coords.count(c)) continue;
      p.gens.push_back(c);
      gen_isos.push_back(d.rep(c));
      gen_isos.push_back(inverse_discrete_iso(d.rep(c)));
      walk();
    }
    for (std::size_t i = 0; i < p.gens.size(); ++i)
      for (std::size_t j = i + 1; j < p.gens.size(); ++j) {
        auto ab = classify(compose_discrete_iso(d.rep(p.gens[i]), d.rep(p.gens[j])));
        auto ba = classify(compose_discrete_iso(d.rep(p.gens[j]), d.rep(p.gens[i])));
        if (!ab || !ba || *ab != *ba) return std::nullopt;
      }
    p.relations = linalg::hermite_basis(std::move(p.relations), p.gens.size());
    p.invariants = linalg::smith_invariants(p.relations, p.gens.size());
    return p;
  }

  const DiscreteData& gr_;
  OutAutOptions opt_;
  detail::Classifier cls_;
};

inline OutAutDescription out_aut_discrete(const DiscreteData& Gr, const OutAutOptions& opt = {}) {
  return OutAutComputer(Gr, opt).run();
}

}  // namespace bsm
