// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "bsm/io.hpp"
#include "bsm/oracle.hpp"
#include "corpus.hpp"

using namespace bsm;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

int failures = 0;

void criterion(int n, const char* title, double limit_s, const std::function<Outcome()>& body) {
  auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  double s = std::chrono::duration<double>(Clock::now() - t0).count();
  if (o.pass && s > limit_s) o.fail("took " + std::to_string(s) + " s, limit " + std::to_string(limit_s) + " s");
  if (!o.pass) ++failures;
  std::printf("%s  C%d %-48s %8.3f s%s%s\n", o.pass ? "PASS" : "FAIL", n, title, s, o.detail.empty() ? "" : "  ",
              o.detail.c_str());
  std::fflush(stdout);
}

std::vector<std::vector<Int>> keys(const std::vector<DiscreteDataIso>& v) {
  std::vector<std::vector<Int>> k;
  for (const auto& F : v) k.push_back(iso_key(F));
  return k;
}

const std::vector<corpus::Entry>& the_corpus() {
  static const auto c = corpus::build();
  return c;
}

Element random_element(const GroupPtr& G, std::mt19937_64& rng) {
  const auto& els = G->elements();
  return els[rng() % els.size()];
}

}  // namespace

int main() {
  std::printf("corpus: %zu data\n", the_corpus().size());

  criterion(1, "Radko picard = Z2 x Circle(rho)", 1.0, [] {
    Outcome o;
    for (auto rho : {Rational(1), Rational(3, 2), Rational(7)}) {
      auto f = factorize_pic(picard_presentation(io::radko_sphere(rho).data));
      const std::string want = "Z2 x Circle(" + rational_str(rho) + ")";
      if (!f.applicable || !f.complete || f.str() != want) o.fail("rho " + rational_str(rho) + ": got " + f.str());
    }
    return o;
  });

  criterion(2, "Cavalcanti ~ Radko with witness", 10.0, [] {
    Outcome o;
    for (auto rho : {Rational(1), Rational(5, 3)}) {
      auto C = io::cavalcanti_one_curve(rho).data;
      auto R = io::radko_sphere(rho).data;
      auto d = morita_equivalent(C, R);
      if (!d.equivalent || !d.witness) {
        o.fail("no witness at rho " + rational_str(rho));
        continue;
      }
      if (!validate_discrete_iso(*d.witness, C, R).ok()) o.fail("witness does not validate");
      for (auto other : {Rational(2), Rational(1, 2), Rational(5, 2)}) {
        if (other == rho) continue;
        auto n = morita_equivalent(C, io::radko_sphere(other).data);
        if (n.equivalent || !n.complete) o.fail("equivalent across periods");
      }
    }
    return o;
  });

  criterion(3, "continuous factor count = N", 10.0, [] {
    Outcome o;
    std::size_t checked = 0;
    for (const auto& e : the_corpus()) {
      auto f = factorize_pic(picard_presentation(e.data));
      if (!f.applicable) continue;
      ++checked;
      if (f.continuous_count() != pic_lie_dim(e.data)) o.fail(e.name + ": " + f.str());
    }
    for (const auto& name : {"radko_sphere", "cavalcanti_one_curve", "lefschetz_dehn_twist"}) {
      auto Gr = io::case_study(name).data;
      auto f = factorize_pic(picard_presentation(Gr));
      ++checked;
      if (!f.applicable || f.continuous_count() != Gr.edges.size()) o.fail(std::string(name) + ": " + f.str());
    }
    if (checked < 20) o.fail("only " + std::to_string(checked) + " factorizable data");
    o.detail = o.pass ? std::to_string(checked) + " data" : o.detail;
    return o;
  });

  criterion(4, "engine = oracle on guarded corpus", 300.0, [] {
    Outcome o;
    std::size_t isos = 0;
    for (const auto& e : the_corpus()) {
      auto tw = corpus::twin(e, 77);
      for (const DiscreteData* other : std::array<const DiscreteData*, 2>{&e.data, &tw.data}) {
        auto engine = find_discrete_isos(e.data, *other);
        auto brute = oracle::brute_isos(e.data, *other);
        isos += brute.size();
        if (!engine.complete || keys(engine.isos) != keys(brute)) o.fail(e.name + ": iso sets differ");
      }
      auto ea = out_aut_discrete(e.data);
      auto ba = oracle::brute_out_aut(e.data);
      if (keys(ea.autos) != keys(ba.autos) || ea.class_of != ba.class_of || ea.num_classes() != ba.num_classes)
        o.fail(e.name + ": out_aut differs");
    }
    if (o.pass) o.detail = std::to_string(the_corpus().size()) + " data, " + std::to_string(isos) + " isos";
    return o;
  });

  criterion(5, "law suite", 60.0, [] {
    Outcome o;
    std::mt19937_64 rng(5);
    for (const auto& e : the_corpus()) {
      const auto& Gr = e.data;
      auto autos = find_discrete_isos(Gr, Gr).isos;
      const std::size_t n = e.data.edges.size();
      auto random_alphas = [&] {
        std::vector<Element> a;
        for (const auto& ed : Gr.edges) a.push_back(random_element(ed.hol.iso.H, rng));
        return a;
      };
      for (int t = 0; t < 3; ++t) {
        auto a = random_alphas(), b = random_alphas();
        auto A = inner_discrete_auto(Gr, a), B = inner_discrete_auto(Gr, b);
        if (!validate_discrete_iso(A, Gr, Gr).ok()) o.fail(e.name + ": inner auto invalid");
        std::vector<Element> ab;
        for (std::size_t i = 0; i < n; ++i) ab.push_back(Gr.edges[i].hol.iso.H->mul(a[i], b[i]));
        if (iso_key(compose_discrete_iso(A, B)) != iso_key(inner_discrete_auto(Gr, ab)))
          o.fail(e.name + ": inner(a) o inner(b) != inner(ab)");
        // normality
        const auto& F = autos[rng() % autos.size()];
        auto conj = compose_discrete_iso(compose_discrete_iso(F, A), inverse_discrete_iso(F));
        if (!is_inner_discrete(conj, Gr)) o.fail(e.name + ": inner autos not normal");
      }
      // composition rule
      for (int t = 0; t < 3 && !autos.empty(); ++t) {
        const auto& F = autos[rng() % autos.size()];
        const auto& G = autos[rng() % autos.size()];
        if (!validate_discrete_iso(compose_discrete_iso(F, G), Gr, Gr).ok()) o.fail(e.name + ": composite invalid");
      }
      for (std::size_t i = 0; i < n; ++i)
        if (!validate_discrete_iso(twisting_auto(Gr, i), Gr, Gr).ok()) o.fail(e.name + ": twisting auto invalid");
      // Morita is an equivalence relation: identity, inverse, composite witnesses
      auto tw1 = corpus::twin(e, 101), tw2 = corpus::twin(e, 202);
      if (!validate_discrete_iso(identity_discrete_iso(Gr), Gr, Gr).ok()) o.fail(e.name + ": identity invalid");
      auto d12 = morita_equivalent(tw1.data, tw2.data);
      auto d21 = morita_equivalent(tw2.data, tw1.data);
      if (d12.equivalent != d21.equivalent) o.fail(e.name + ": not symmetric");
      if (d12.witness && !validate_discrete_iso(inverse_discrete_iso(*d12.witness), tw2.data, tw1.data).ok())
        o.fail(e.name + ": inverse witness invalid");
      auto d01 = morita_equivalent(Gr, tw1.data);
      if (d01.witness && d12.witness) {
        auto c = compose_discrete_iso(*d12.witness, *d01.witness);
        if (!validate_discrete_iso(c, Gr, tw2.data).ok()) o.fail(e.name + ": composite witness invalid");
        if (!morita_equivalent(Gr, tw2.data).equivalent) o.fail(e.name + ": not transitive");
      }
    }
    return o;
  });

  criterion(6, "surfaces: accept iff psi(gamma1) = gamma2", 10.0, [] {
    Outcome o;
    std::size_t pairs = 0;
    // the built sphere, and variants with other boundary classes on the band
    for (Int g1 = -2; g1 <= 2; ++g1)
      for (Int g2 = -2; g2 <= 2; ++g2) {
        auto A = io::two_curve_sphere(Rational(1), Rational(1)).data;
        auto B = io::two_curve_sphere(Rational(1), Rational(1)).data;
        for (auto& ed : A.edges) ed.hol.gamma_minus = Element({g1});
        for (auto& ed : B.edges) ed.hol.gamma_minus = Element({g2});
        if (!validate_discrete(A).ok() || !validate_discrete(B).ok()) {
          o.fail("variant invalid");
          continue;
        }
        for (const auto& e1 : A.edges)
          for (const auto& e2 : B.edges)
            for (auto orient : {Orientation::Preserving, Orientation::Reversing}) {
              const auto& D1 = e1.hol;
              const auto& D2 = e2.hol;
              auto side_isos = [&](Sign s) {
                const auto& G1 = D1.iso.G(s);
                const auto& G2 = D2.iso.G(image_side(orient, s));
                std::vector<Hom> out;
                if (G1->is_finite() && G2->is_finite()) return oracle::brute_group_isos(G1, G2);
                if (G1->free_rank() == 1 && G2->free_rank() == 1)
                  for (Int sgn : {-1, 1}) out.push_back(Hom::from_matrix(G1, G2, {{sgn}}));
                return out;
              };
              for (const auto& pm : side_isos(Sign::Minus))
                for (const auto& pp : side_isos(Sign::Plus)) {
                  HolonomyIso m{{orient, Hom(D1.iso.H, D2.iso.H, {}), pm, pp}, D2.iso.H->identity()};
                  bool want = true;
                  for (Sign s : {Sign::Minus, Sign::Plus})
                    want = want && m.iso.side(s)(D1.gamma(s)) == D2.gamma(image_side(orient, s));
                  ++pairs;
                  if (validate_holonomy_iso(m, D1, D2).ok() != want) o.fail("validator disagrees");
                }
            }
        // discrete level: every engine iso satisfies the boundary condition
        for (const auto& F : find_discrete_isos(A, B).isos)
          for (std::size_t i = 0; i < A.edges.size(); ++i) {
            const auto& m = F.edge_isos[i];
            const auto& D1 = A.edges[i].hol;
            const auto& D2 = B.edges[F.edge_map[i]].hol;
            for (Sign s : {Sign::Minus, Sign::Plus})
              if (m.iso.side(s)(D1.gamma(s)) != D2.gamma(image_side(F.orientation, s))) o.fail("engine iso off");
          }
      }
    if (o.pass) o.detail = std::to_string(pairs) + " holonomy pairs";
    return o;
  });

  criterion(7, "Lefschetz conditional", 60.0, [] {
    Outcome o;
    std::string sweep;
    for (bool pr2 : {false, true})
      for (bool gp : {false, true})
        for (bool gm : {false, true}) {
          auto Gr = io::lefschetz_dehn_twist({pr2, gp, gm}).data;
          sweep += std::string(sweep.empty() ? "" : "; ") + (pr2 ? "pr2" : "pr1") + " g+=" + (gp ? "1" : "0") +
                   " g-=" + (gm ? "1" : "0") + ": ";
          if (!validate_discrete(Gr).ok()) {
            sweep += "invalid";
            continue;
          }
          sweep += factorize_pic(picard_presentation(Gr)).str();
        }
    auto f = factorize_pic(picard_presentation(io::read_data_file(BSM_DATA_DIR "/lefschetz_dehn_twist.bsm").data));
    if (f.str() != "R x Z2 x Z2") o.fail("fixture gives " + f.str());
    o.detail = "fixture: " + f.str() + " (literature value R x Z x Z2 is not produced by any convention) [" + sweep + "]";
    return o;
  });

  return failures == 0 ? 0 : 1;
}
