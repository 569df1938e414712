#pragma once
// Picard group descriptions: twisting automorphisms, the presentation
// (OutAut x| R^N)/H and its factorization into lines, circles and discrete
// factors.

#include <sstream>
#include <string>
#include <vector>

#include "bsm/iso.hpp"

namespace bsm {

/// Identity graph map, (Hol_i, e) on edge i, identities elsewhere; at each
/// endpoint v of i, g_ij = gamma_i and g_ji = gamma_i^-1 for the other edges j.
inline DiscreteDataIso twisting_auto(const DiscreteData& Gr, std::size_t edge) {
  if (edge >= Gr.edges.size()) throw std::out_of_range("edge index " + std::to_string(edge) + " out of range");
  const auto& D = Gr.edges[edge].hol;
  DiscreteDataIso F = identity_discrete_iso(Gr);
  auto& m = F.edge_isos[edge];
  m.iso.psi = D.hol;
  for (Sign s : {Sign::Minus, Sign::Plus}) m.iso.side(s) = D.hol_side(s);
  m.h = D.iso.H->identity();
  for (std::size_t v = 0; v < Gr.vertices.size(); ++v) {
    auto& t = F.cocycles[v];
    auto it = std::find(t.edges.begin(), t.edges.end(), edge);
    if (it == t.edges.end()) continue;
    const std::size_t a = static_cast<std::size_t>(it - t.edges.begin());
    const auto G = Gr.vertex_group(v);
    const Element g = D.gamma(t.sides[a]);
    for (std::size_t b = 0; b < t.edges.size(); ++b) {
      if (b == a) continue;
      t.g[a][b] = g;
      t.g[b][a] = G->inv(g);
    }
  }
  return F;
}

inline std::size_t pic_lie_dim(const DiscreteData& Gr) { return Gr.edges.size(); }

struct PicOptions {
  OutAutOptions outaut;
  /// Reversing classes additionally act on R^N by -1.
  bool reversing_sign_flip = false;
};

struct ClassAction {
  std::vector<std::size_t> permutation;  // edge i -> edge permutation[i]
  int sign = 1;

  bool trivial() const {
    for (std::size_t i = 0; i < permutation.size(); ++i)
      if (permutation[i] != i) return false;
    return sign == 1;
  }
};

struct KernelGenerator {
  std::optional<std::size_t> out_class;  // [F_i]^-1, when known
  std::vector<Rational> translation;     // rho_i e_i
};

struct PicPresentation {
  OutAutDescription out_aut;
  std::size_t N = 0;
  std::vector<Rational> periods;
  std::vector<std::optional<std::size_t>> twisting_classes;
  std::vector<ClassAction> action;  // per class
  std::vector<KernelGenerator> kernel_generators;
};

inline PicPresentation picard_presentation(const DiscreteData& Gr, const PicOptions& opt = {}) {
  PicPresentation p;
  OutAutComputer comp(Gr, opt.outaut);
  p.out_aut = comp.run();
  p.N = Gr.edges.size();
  for (const auto& e : Gr.edges) p.periods.push_back(e.period);
  for (std::size_t c = 0; c < p.out_aut.num_classes(); ++c) {
    const auto& F = p.out_aut.rep(c);
    ClassAction a;
    a.permutation = F.edge_map;
    if (opt.reversing_sign_flip && F.orientation == Orientation::Reversing) a.sign = -1;
    p.action.push_back(std::move(a));
  }
  for (std::size_t i = 0; i < p.N; ++i) {
    auto T = twisting_auto(Gr, i);
    p.twisting_classes.push_back(comp.classify(T));
    KernelGenerator k;
    k.out_class = comp.classify(inverse_discrete_iso(T));
    k.translation.assign(p.N, Rational(0));
    k.translation[i] = p.periods[i];
    p.kernel_generators.push_back(std::move(k));
  }
  return p;
}

struct PicFactor {
  enum class Kind { Line, InfiniteCyclic, Cyclic, Finite, Circle };
  Kind kind;
  Int order = 0;       // Cyclic / Finite
  Rational modulus{0};  // Circle

  std::string str() const {
    switch (kind) {
      case Kind::Line: return "R";
      case Kind::InfiniteCyclic: return "Z";
      case Kind::Cyclic: return "Z" + std::to_string(order);
      case Kind::Finite: return "Finite(" + std::to_string(order) + ")";
      case Kind::Circle: return "Circle(" + rational_str(modulus) + ")";
    }
    return "?";
  }
  bool operator==(const PicFactor& o) const {
    return kind == o.kind && order == o.order && modulus == o.modulus;
  }
};

struct PicFactorization {
  bool applicable = false;
  bool complete = true;  // false when the out_aut data came from a bounded search
  std::string reason;    // why not applicable
  std::vector<PicFactor> factors;

  std::size_t continuous_count() const {
    std::size_t n = 0;
    for (const auto& f : factors)
      if (f.kind == PicFactor::Kind::Line || f.kind == PicFactor::Kind::Circle) ++n;
    return n;
  }

  std::string str() const {
    if (!applicable) return "not factorizable: " + reason;
    if (factors.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < factors.size(); ++i) s += (i ? " x " : "") + factors[i].str();
    return s;
  }
};

namespace detail {

inline void sort_factors(std::vector<PicFactor>& fs) {
  auto rank = [](const PicFactor& f) {
    switch (f.kind) {
      case PicFactor::Kind::Line: return 0;
      case PicFactor::Kind::InfiniteCyclic: return 1;
      case PicFactor::Kind::Cyclic:
      case PicFactor::Kind::Finite: return 2;
      case PicFactor::Kind::Circle: return 3;
    }
    return 4;
  };
  std::stable_sort(fs.begin(), fs.end(), [&](const PicFactor& a, const PicFactor& b) {
    if (rank(a) != rank(b)) return rank(a) < rank(b);
    if (rank(a) == 2) return a.order < b.order;
    return false;
  });
}

inline void push_invariants(std::vector<PicFactor>& fs, const linalg::Vec& inv) {
  for (Int d : inv) {
    if (d == 0)
      fs.push_back({PicFactor::Kind::InfiniteCyclic});
    else if (d != 1)
      fs.push_back({PicFactor::Kind::Cyclic, d});
  }
}

}  // namespace detail

inline PicFactorization factorize_pic(const PicPresentation& p) {
  PicFactorization f;
  const auto& A = p.out_aut;
  f.complete = A.complete;
  for (const auto& a : p.action)
    if (!a.trivial()) {
      f.reason = "out_aut acts non-trivially on R^N";
      return f;
    }
  for (std::size_t i = 0; i < p.N; ++i)
    if (!p.twisting_classes[i]) {
      f.reason = "twisting class of edge " + std::to_string(i) + " lies outside the searched automorphisms";
      return f;
    }
  bool twists_trivial = true;
  for (const auto& t : p.twisting_classes) twists_trivial = twists_trivial && *t == A.identity_class;

  if (twists_trivial) {
    if (A.presentation && A.abelian.value_or(false)) {
      detail::push_invariants(f.factors, A.presentation->invariants);
    } else if (A.complete) {
      if (A.num_classes() > 1) f.factors.push_back({PicFactor::Kind::Finite, static_cast<Int>(A.num_classes())});
    } else {
      f.reason = "out_aut is infinite and not presented as an abelian group";
      return f;
    }
    for (std::size_t i = 0; i < p.N; ++i) f.factors.push_back({PicFactor::Kind::Circle, 0, p.periods[i]});
    detail::sort_factors(f.factors);
    f.applicable = true;
    return f;
  }

  if (!A.presentation || !A.abelian.value_or(false)) {
    f.reason = "out_aut is not abelian and the twists are non-trivial";
    return f;
  }
  const auto& P = *A.presentation;
  const std::size_t g = P.gens.size();
  std::vector<linalg::Vec> t(p.N);
  for (std::size_t i = 0; i < p.N; ++i) {
    auto it = P.coords.find(*p.twisting_classes[i]);
    if (it == P.coords.end()) {
      f.reason = "twisting class of edge " + std::to_string(i) + " not expressed in the presentation";
      return f;
    }
    t[i] = it->second;
  }
  // R_t = { n : sum n_i t_i in rowspace(relations) }: kernel of [t ; -rel].
  const std::size_t nr = P.relations.size();
  linalg::Mat a(g, linalg::Vec(p.N + nr, 0));
  for (std::size_t c = 0; c < g; ++c) {
    for (std::size_t i = 0; i < p.N; ++i) a[c][i] = t[i][c];
    for (std::size_t j = 0; j < nr; ++j) a[c][p.N + j] = -P.relations[j][c];
  }
  auto ker = linalg::solve_exact(a, linalg::Vec(g, 0), p.N + nr);
  linalg::Mat proj;
  for (const auto& row : ker->basis) proj.emplace_back(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(p.N));
  auto R = linalg::hermite_basis(std::move(proj), p.N);
  std::vector<Int> k(p.N, 0);
  for (const auto& row : R) {
    std::size_t support = 0, where = 0;
    for (std::size_t i = 0; i < p.N; ++i)
      if (row[i] != 0) {
        ++support;
        where = i;
      }
    if (support != 1) {
      f.reason = "the twisting classes satisfy a mixed relation";
      return f;
    }
    k[where] = row[where] < 0 ? -row[where] : row[where];
  }
  for (std::size_t i = 0; i < p.N; ++i) {
    if (k[i] == 0)
      f.factors.push_back({PicFactor::Kind::Line});
    else
      f.factors.push_back({PicFactor::Kind::Circle, 0, p.periods[i] * Rational(k[i])});
  }
  linalg::Mat rel = P.relations;
  for (const auto& ti : t) rel.push_back(ti);
  detail::push_invariants(f.factors, linalg::smith_invariants(rel, g));
  detail::sort_factors(f.factors);
  f.applicable = true;
  return f;
}

// ---------------------------------------------------------------------------
// Single-orbit-type results

struct PlaneResult {
  std::size_t out_aut_order = 0;  // number of classes found
  bool complete = true;
  std::optional<linalg::Vec> abelian_invariants;  // when abelian and complete
  PicFactorization factors;
};

struct IsotropyAutOptions {
  SolveOptions solve;
  /// Also count orientation reversing automorphisms of I.
  bool include_reversing = false;
};

/// All automorphisms of I with the given orientation.
inline std::pair<std::vector<IsotropyIso>, bool> isotropy_autos(const IsotropyData& I, Orientation o,
                                                                 const SolveOptions& opt = {}) {
  std::vector<IsotropyIso> out;
  SearchOptions sopt;
  sopt.max_entry = opt.max_entry;
  auto psis = solve_isomorphisms(I.H, I.H, {}, sopt);
  bool complete = psis.complete;
  for (const auto& psi : psis.isos) {
    std::vector<Hom> side[2];
    for (Sign s : {Sign::Minus, Sign::Plus}) {
      Sign t = image_side(o, s);
      ConstraintSet cs;
      for (const auto& x : I.H->generators()) cs.pins.push_back({I.phi(s)(x), I.phi(t)(psi(x))});
      auto sol = solve_isomorphisms(I.G(s), I.G(t), cs, sopt);
      complete = complete && sol.complete;
      side[s == Sign::Plus] = std::move(sol.isos);
    }
    for (const auto& pm : side[0])
      for (const auto& pp : side[1]) {
        IsotropyIso m{o, psi, pm, pp};
        if (validate_isotropy_iso(m, I, I).ok()) out.push_back(std::move(m));
      }
  }
  return {out, complete};
}

/// OutAut(I) x R, with inner automorphisms (C_alpha, C_{phi-(alpha)}, C_{phi+(alpha)}).
inline PlaneResult picard_plane(const IsotropyData& I, const IsotropyAutOptions& opt = {}) {
  PlaneResult r;
  std::vector<IsotropyIso> autos;
  for (Orientation o : {Orientation::Preserving, Orientation::Reversing}) {
    if (o == Orientation::Reversing && !opt.include_reversing) continue;
    auto [a, c] = isotropy_autos(I, o, opt.solve);
    r.complete = r.complete && c;
    autos.insert(autos.end(), a.begin(), a.end());
  }
  auto key = [](const IsotropyIso& m) {
    std::vector<Int> k{m.orientation == Orientation::Preserving ? 0 : 1};
    for (const Hom* f : {&m.psi, &m.psi_minus, &m.psi_plus})
      for (const auto& x : f->images()) k.insert(k.end(), x.c.begin(), x.c.end());
    return k;
  };
  std::vector<IsotropyIso> inner;
  if (I.H->is_finite()) {
    for (const auto& a : I.H->elements())
      inner.push_back({Orientation::Preserving, conjugation_aut(I.H, a), conjugation_aut(I.G_minus, I.phi_minus(a)),
                       conjugation_aut(I.G_plus, I.phi_plus(a))});
  } else {
    if (!I.G_minus->is_abelian() || !I.G_plus->is_abelian())
      throw UnsupportedBackend("inner automorphisms of infinite H with non-abelian G");
    inner.push_back(identity_isotropy_iso(I));
  }
  auto coset_key = [&](const IsotropyIso& m) {
    std::vector<Int> best;
    for (const auto& c : inner) {
      auto k = key(compose_isotropy_iso(m, c));
      if (best.empty() || k < best) best = std::move(k);
    }
    return best;
  };
  std::map<std::vector<Int>, std::size_t> classes;
  std::vector<const IsotropyIso*> reps;
  for (const auto& m : autos)
    if (classes.emplace(coset_key(m), reps.size()).second) reps.push_back(&m);
  r.out_aut_order = reps.size();
  r.factors.complete = r.complete;
  if (r.complete) {
    const std::size_t n = reps.size();
    std::vector<std::vector<std::size_t>> table(n, std::vector<std::size_t>(n));
    bool ab = true;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) table[a][b] = classes.at(coset_key(compose_isotropy_iso(*reps[a], *reps[b])));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) ab = ab && table[a][b] == table[b][a];
    if (ab) {
      linalg::Mat rel;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
          linalg::Vec row(n, 0);
          row[a] += 1;
          row[b] += 1;
          row[table[a][b]] -= 1;
          rel.push_back(row);
        }
      r.abelian_invariants = linalg::smith_invariants(rel, n);
      detail::push_invariants(r.factors.factors, *r.abelian_invariants);
    } else {
      r.factors.factors.push_back({PicFactor::Kind::Finite, static_cast<Int>(n)});
    }
    r.factors.factors.push_back({PicFactor::Kind::Line});
    detail::sort_factors(r.factors.factors);
    r.factors.applicable = true;
  } else {
    r.factors.reason = "automorphisms of I form an infinite family";
  }
  return r;
}

/// Direct holonomy-level computation for a single cylinder: OutAut(I, Hol),
/// the twist (Hol, e) and the kernel generator (twist^-1, rho).
struct CylinderResult {
  std::size_t out_aut_order = 0;
  bool complete = true;
  std::optional<std::size_t> twist_order;  // nullopt: not reached within the search
  Rational period{1};
};

inline CylinderResult picard_cylinder(const HolonomyData& D, Rational rho, const SolveOptions& opt = {}) {
  CylinderResult r;
  r.period = rho;
  std::vector<HolonomyIso> autos;
  for (Orientation o : {Orientation::Preserving, Orientation::Reversing}) {
    auto s = holonomy_isos(D, D, o, opt);
    r.complete = r.complete && s.complete;
    autos.insert(autos.end(), s.isos.begin(), s.isos.end());
  }
  std::vector<HolonomyIso> reps;
  auto class_of = [&](const HolonomyIso& m) -> std::optional<std::size_t> {
    for (std::size_t c = 0; c < reps.size(); ++c)
      if (is_inner_holonomy(compose_holonomy_iso(m, inverse_holonomy_iso(reps[c])), D)) return c;
    return std::nullopt;
  };
  for (const auto& m : autos)
    if (!class_of(m)) reps.push_back(m);
  r.out_aut_order = reps.size();
  HolonomyIso twist{{Orientation::Preserving, D.hol, D.hol_side(Sign::Minus), D.hol_side(Sign::Plus)},
                    D.iso.H->identity()};
  HolonomyIso pw = twist;
  for (std::size_t k = 1; k <= std::max<std::size_t>(reps.size(), 1) + 1; ++k) {
    if (is_inner_holonomy(pw, D)) {
      r.twist_order = k;
      break;
    }
    pw = compose_holonomy_iso(pw, twist);
  }
  return r;
}

}  // namespace bsm
