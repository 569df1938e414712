#pragma once
// Brute-force reference enumerations over small finite groups. Only the data
// types, validators and composition are shared with the search engine.

#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bsm/iso.hpp"

namespace bsm::oracle {

inline constexpr std::size_t kMaxOrder = 12;
inline constexpr std::size_t kMaxEdges = 3;

class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void guard(const GroupPtr& g) {
  if (!g->is_finite() || *g->order() > kMaxOrder)
    throw GuardExceeded("oracle needs finite groups of order <= 12, got " + g->describe());
}

/// Every map G1 -> G2 with f(ab) = f(a) f(b) for all a, b; bijective only if
/// requested. Elements are assigned one at a time in canonical order.
inline std::vector<Hom> brute_homs(const GroupPtr& G1, const GroupPtr& G2, bool bijective) {
  guard(G1);
  guard(G2);
  const auto& e1 = G1->elements();
  const auto& e2 = G2->elements();
  const std::size_t n = e1.size();
  std::vector<Hom> out;
  if (bijective && n != e2.size()) return out;
  std::vector<std::optional<std::size_t>> f(n);
  std::vector<bool> used(e2.size());
  auto consistent = [&](std::size_t x) {
    for (std::size_t a = 0; a < n; ++a) {
      if (!f[a]) continue;
      for (auto [p, q] : {std::pair{a, x}, std::pair{x, a}}) {
        std::size_t pq = G1->index_of(G1->mul(e1[p], e1[q]));
        if (!f[pq]) continue;
        if (G2->index_of(G2->mul(e2[*f[p]], e2[*f[q]])) != *f[pq]) return false;
      }
    }
    return true;
  };
  std::function<void(std::size_t)> rec = [&](std::size_t x) {
    if (x == n) {
      out.push_back(Hom::from_function(G1, G2, [&](const Element& a) { return e2[*f[G1->index_of(a)]]; }));
      return;
    }
    for (std::size_t y = 0; y < e2.size(); ++y) {
      if (bijective && used[y]) continue;
      f[x] = y;
      if (consistent(x)) {
        if (bijective) used[y] = true;
        rec(x + 1);
        if (bijective) used[y] = false;
      }
      f[x].reset();
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Hom> brute_group_isos(const GroupPtr& G1, const GroupPtr& G2) { return brute_homs(G1, G2, true); }
inline std::vector<Hom> brute_group_autos(const GroupPtr& G) { return brute_group_isos(G, G); }

/// All (Psi, h) with the given orientation passing validate_holonomy_iso.
inline std::vector<HolonomyIso> brute_holonomy_isos(const HolonomyData& D1, const HolonomyData& D2, Orientation o) {
  std::vector<HolonomyIso> out;
  auto psis = brute_group_isos(D1.iso.H, D2.iso.H);
  auto minus = brute_group_isos(D1.iso.G(Sign::Minus), D2.iso.G(image_side(o, Sign::Minus)));
  auto plus = brute_group_isos(D1.iso.G(Sign::Plus), D2.iso.G(image_side(o, Sign::Plus)));
  for (const auto& psi : psis)
    for (const auto& pm : minus)
      for (const auto& pp : plus)
        for (const auto& h : D2.iso.H->elements()) {
          HolonomyIso m{{o, psi, pm, pp}, h};
          if (validate_holonomy_iso(m, D1, D2).ok()) out.push_back(std::move(m));
        }
  return out;
}

inline void guard(const DiscreteData& Gr) {
  if (Gr.edges.size() > kMaxEdges) throw GuardExceeded("oracle handles at most 3 edges");
  for (const auto& [name, g] : Gr.groups) guard(g);
}

/// All isomorphisms Gr1 -> Gr2: every orientation, vertex permutation, edge
/// permutation, per-edge triple and h, and every cocycle table, filtered by
/// the defining conditions and finally by validate_discrete_iso.
inline std::vector<DiscreteDataIso> brute_isos(const DiscreteData& Gr1, const DiscreteData& Gr2) {
  guard(Gr1);
  guard(Gr2);
  std::vector<DiscreteDataIso> out;
  const std::size_t nv = Gr1.vertices.size(), ne = Gr1.edges.size();
  if (Gr2.vertices.size() != nv || Gr2.edges.size() != ne) return out;
  for (Orientation o : {Orientation::Preserving, Orientation::Reversing}) {
    std::vector<std::size_t> vperm(nv);
    std::iota(vperm.begin(), vperm.end(), 0);
    do {
      bool vok = true;
      for (std::size_t v = 0; v < nv; ++v)
        vok = vok && Gr2.vertices[vperm[v]].sign == image_side(o, Gr1.vertices[v].sign);
      if (!vok) continue;
      std::vector<std::size_t> eperm(ne);
      std::iota(eperm.begin(), eperm.end(), 0);
      do {
        bool eok = true;
        for (std::size_t i = 0; i < ne && eok; ++i) {
          eok = Gr1.edges[i].period == Gr2.edges[eperm[i]].period;
          for (Sign s : {Sign::Plus, Sign::Minus})
            eok = eok && vperm[Gr1.endpoint(i, s)] == Gr2.endpoint(eperm[i], image_side(o, s));
        }
        if (!eok) continue;
        std::vector<std::vector<HolonomyIso>> cand(ne);
        bool any = true;
        for (std::size_t i = 0; i < ne && any; ++i) {
          cand[i] = brute_holonomy_isos(Gr1.edges[i].hol, Gr2.edges[eperm[i]].hol, o);
          any = !cand[i].empty();
        }
        if (!any) continue;
        DiscreteDataIso F;
        F.orientation = o;
        F.vertex_map = vperm;
        F.edge_map = eperm;
        F.edge_isos.resize(ne);
        F.cocycles.resize(nv);
        std::function<void(std::size_t)> vert_rec;
        std::function<void(std::size_t)> edge_rec = [&](std::size_t i) {
          if (i == ne) {
            vert_rec(0);
            return;
          }
          for (const auto& m : cand[i]) {
            F.edge_isos[i] = m;
            edge_rec(i + 1);
          }
        };
        vert_rec = [&](std::size_t v) {
          if (v == nv) {
            if (validate_discrete_iso(F, Gr1, Gr2).ok()) out.push_back(F);
            return;
          }
          CocycleTable t;
          for (std::size_t e = 0; e < ne; ++e)
            for (Sign s : {Sign::Plus, Sign::Minus})
              if (Gr1.endpoint(e, s) == v) {
                t.edges.push_back(e);
                t.sides.push_back(s);
              }
          const std::size_t k = t.edges.size();
          const auto G1 = Gr1.vertex_group(v);
          const auto G2 = Gr2.vertex_group(vperm[v]);
          // entries allowed by the conjugation condition, checked on all of G1
          std::vector<std::vector<std::vector<Element>>> allowed(k, std::vector<std::vector<Element>>(k));
          for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) {
              const Hom& pa = F.edge_isos[t.edges[a]].iso.side(t.sides[a]);
              const Hom& pb = F.edge_isos[t.edges[b]].iso.side(t.sides[b]);
              for (const auto& g : G2->elements()) {
                bool ok = true;
                for (const auto& y : G1->elements())
                  if (pa(y) != G2->mul(G2->mul(g, pb(y)), G2->inv(g))) {
                    ok = false;
                    break;
                  }
                if (ok) allowed[a][b].push_back(g);
              }
              if (allowed[a][b].empty()) return;
            }
          t.g.assign(k, std::vector<Element>(k));
          std::function<void(std::size_t)> cell = [&](std::size_t idx) {
            if (idx == k * k) {
              for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = 0; b < k; ++b)
                  for (std::size_t c = 0; c < k; ++c)
                    if (G2->mul(t.g[a][b], t.g[b][c]) != t.g[a][c]) return;
              F.cocycles[v] = t;
              vert_rec(v + 1);
              return;
            }
            for (const auto& g : allowed[idx / k][idx % k]) {
              t.g[idx / k][idx % k] = g;
              cell(idx + 1);
            }
          };
          cell(0);
        };
        edge_rec(0);
      } while (std::next_permutation(eperm.begin(), eperm.end()));
    } while (std::next_permutation(vperm.begin(), vperm.end()));
  }
  std::sort(out.begin(), out.end(),
            [](const DiscreteDataIso& a, const DiscreteDataIso& b) { return iso_key(a) < iso_key(b); });
  return out;
}

/// Every inner automorphism, one per tuple (alpha_i) in the product of the H_i.
inline std::vector<DiscreteDataIso> brute_inner_autos(const DiscreteData& Gr) {
  guard(Gr);
  std::vector<DiscreteDataIso> out;
  std::vector<Element> alphas(Gr.edges.size());
  std::function<void(std::size_t)> rec = [&](std::size_t e) {
    if (e == Gr.edges.size()) {
      out.push_back(inner_discrete_auto(Gr, alphas));
      return;
    }
    for (const auto& a : Gr.edges[e].hol.iso.H->elements()) {
      alphas[e] = a;
      rec(e + 1);
    }
  };
  rec(0);
  return out;
}

struct BruteOutAut {
  std::vector<DiscreteDataIso> autos;       // canonical order
  std::vector<std::size_t> class_of;        // per auto, classes numbered by first appearance
  std::size_t num_classes = 0;
};

/// Autos grouped by F1 ~ F2 iff F1 o F2^-1 equals some brute-enumerated inner auto.
inline BruteOutAut brute_out_aut(const DiscreteData& Gr) {
  BruteOutAut r;
  r.autos = brute_isos(Gr, Gr);
  std::set<std::vector<Int>> inner;
  for (const auto& I : brute_inner_autos(Gr)) inner.insert(iso_key(I));
  const std::size_t n = r.autos.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = root(parent[x]);
  };
  std::vector<DiscreteDataIso> inv;
  for (const auto& F : r.autos) inv.push_back(inverse_discrete_iso(F));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (root(a) != root(b) && inner.count(iso_key(compose_discrete_iso(r.autos[a], inv[b]))))
        parent[root(a)] = root(b);
  std::map<std::size_t, std::size_t> label;
  for (std::size_t a = 0; a < n; ++a) {
    auto [it, fresh] = label.emplace(root(a), label.size());
    r.class_of.push_back(it->second);
  }
  r.num_classes = label.size();
  return r;
}

}  // namespace bsm::oracle
