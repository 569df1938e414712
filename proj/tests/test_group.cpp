#include <gtest/gtest.h>

#include <random>

#include "bsm/oracle.hpp"

using namespace bsm;

namespace {

std::vector<GroupPtr> small_groups() {
  return {Group::trivial(), Group::cyclic(2), Group::cyclic(3), Group::fg_abelian(0, {2, 2}), Group::cyclic(4),
          Group::cyclic(6), Group::symmetric3()};
}

// Cyclic group of order n as a raw table.
Group::Table cyclic_table(std::size_t n) {
  Group::Table t(n, std::vector<Int>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a][b] = static_cast<Int>((a + b) % n);
  return t;
}

}  // namespace

TEST(Group, TableValidation) {
  EXPECT_NO_THROW(Group::finite_table(cyclic_table(5)));
  auto bad = cyclic_table(3);
  std::swap(bad[1][1], bad[1][2]);
  EXPECT_THROW(Group::finite_table(bad), std::invalid_argument);
  EXPECT_THROW(Group::finite_table({}), std::invalid_argument);
  EXPECT_THROW(Group::fg_abelian(0, {2, 3}), std::invalid_argument);
  EXPECT_THROW(Group::fg_abelian(0, {1}), std::invalid_argument);
  // large tables go through the sampled check
  EXPECT_NO_THROW(Group::finite_table(cyclic_table(70)));
}

TEST(Group, TorsionCoordinatesAreReduced) {
  auto G = Group::fg_abelian(1, {2, 4});
  auto x = G->mul(Element({3, 1, 3}), Element({-5, 1, 2}));
  EXPECT_EQ(x, Element({-2, 0, 1}));
  EXPECT_EQ(G->inv(Element({1, 1, 1})), Element({-1, 1, 3}));
  EXPECT_TRUE(G->contains(x));
  EXPECT_FALSE(G->contains(Element({0, 2, 0})));
}

TEST(Group, S3Structure) {
  auto S = Group::symmetric3();
  EXPECT_FALSE(S->is_abelian());
  EXPECT_EQ(*S->order(), 6u);
  EXPECT_EQ(S->center().size(), 1u);
  std::vector<std::size_t> orders;
  for (const auto& x : S->elements()) orders.push_back(S->element_order(x));
  EXPECT_EQ(orders, (std::vector<std::size_t>{1, 2, 2, 3, 3, 2}));
}

TEST(Hom, ApplyExamples) {
  auto Z3 = Group::cyclic(3);
  EXPECT_EQ(hom_apply(Hom::identity(Z3), Element({2})), Element({2}));
  auto Z = Group::free_abelian(1);
  EXPECT_EQ(hom_apply(Hom::from_matrix(Z, Z, {{3}}), Element({2})), Element({6}));
  auto Z2 = Group::free_abelian(2);
  auto hol = Hom::from_matrix(Z2, Z2, {{1, 1}, {0, 1}});
  EXPECT_EQ(hom_apply(hol, Element({0, 1})), Element({1, 1}));
  EXPECT_THROW(hom_apply(hol, Element({0})), std::invalid_argument);
}

TEST(Hom, ComposeExamples) {
  auto Z = Group::free_abelian(1);
  auto f = hom_compose(Hom::from_matrix(Z, Z, {{2}}), Hom::from_matrix(Z, Z, {{3}}));
  EXPECT_EQ(f.matrix(), (linalg::Mat{{6}}));
  auto Z2 = Group::free_abelian(2);
  auto hol = Hom::from_matrix(Z2, Z2, {{1, 1}, {0, 1}});
  // independent matrix product
  linalg::Mat sq(2, linalg::Vec(2, 0));
  auto m = hol.matrix();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) sq[i][j] += m[i][k] * m[k][j];
  EXPECT_EQ(hom_compose(hol, hol).matrix(), sq);
  EXPECT_EQ(sq, (linalg::Mat{{1, 2}, {0, 1}}));
  EXPECT_EQ(hom_compose(Hom::identity(Z2), hol), hol);
  EXPECT_THROW(hom_compose(hol, Hom::identity(Z)), std::invalid_argument);
}

TEST(Hom, CheckFindsViolations) {
  auto Z3 = Group::cyclic(3);
  auto Z2 = Group::cyclic(2);
  EXPECT_FALSE(Hom(Z3, Z2, {Element({1})}).check().empty());  // 1 has order 3 in the source
  EXPECT_TRUE(Hom(Z2, Group::cyclic(4), {Element({2})}).check().empty());
  auto S = Group::symmetric3();
  std::vector<Element> imgs(6, Element({1}));
  EXPECT_FALSE(Hom(S, Z2, imgs).check().empty());
}

TEST(Hom, PropertiesOnSmallGroups) {
  for (const auto& G1 : small_groups())
    for (const auto& G2 : small_groups()) {
      for (const auto& f : oracle::brute_homs(G1, G2, false)) {
        EXPECT_TRUE(f.check().empty());
        EXPECT_EQ(f(G1->identity()), G2->identity());
        for (const auto& g : oracle::brute_homs(G2, G2, false)) {
          auto gf = hom_compose(g, f);
          for (const auto& x : G1->elements()) EXPECT_EQ(gf(x), g(f(x)));
        }
      }
    }
}

TEST(Hom, ConjugationIsMultiplicative) {
  auto S = Group::symmetric3();
  for (const auto& g : S->elements()) {
    auto Cg = conjugation_aut(S, g);
    EXPECT_TRUE(Cg.is_bijective());
    for (const auto& x : S->elements()) EXPECT_EQ(Cg(x), S->mul(S->mul(g, x), S->inv(g)));
    for (const auto& h : S->elements())
      EXPECT_EQ(hom_compose(Cg, conjugation_aut(S, h)), conjugation_aut(S, S->mul(g, h)));
  }
  EXPECT_EQ(conjugation_aut(Group::cyclic(3), Element({1})), Hom::identity(Group::cyclic(3)));
  EXPECT_EQ(conjugation_aut(S, S->identity()), Hom::identity(S));
  // transposition (0 1) is index 2: it swaps (1 2) and (0 2)
  auto C = conjugation_aut(S, Element({2}));
  EXPECT_EQ(C(Element({1})), Element({5}));
  EXPECT_EQ(C(Element({3})), Element({4}));
}

TEST(Solve, AutomorphismCounts) {
  EXPECT_EQ(solve_isomorphisms(Group::cyclic(2), Group::cyclic(2), {}).isos.size(), 1u);
  EXPECT_EQ(solve_isomorphisms(Group::cyclic(3), Group::cyclic(3), {}).isos.size(), 2u);
  EXPECT_EQ(solve_isomorphisms(Group::symmetric3(), Group::symmetric3(), {}).isos.size(), 6u);
  EXPECT_EQ(solve_isomorphisms(Group::fg_abelian(0, {2, 2}), Group::fg_abelian(0, {2, 2}), {}).isos.size(), 6u);
  auto Z = Group::free_abelian(1);
  auto s = solve_isomorphisms(Z, Z, {});
  EXPECT_TRUE(s.complete);
  ASSERT_EQ(s.isos.size(), 2u);
  EXPECT_EQ(s.isos[0].matrix(), (linalg::Mat{{-1}}));
  EXPECT_EQ(s.isos[1].matrix(), (linalg::Mat{{1}}));
  EXPECT_TRUE(solve_isomorphisms(Group::cyclic(2), Group::cyclic(3), {}).isos.empty());
  EXPECT_TRUE(solve_isomorphisms(Z, Group::cyclic(3), {}).isos.empty());
}

TEST(Solve, UnipotentCommutant) {
  auto Z2 = Group::free_abelian(2);
  auto hol = Hom::from_matrix(Z2, Z2, {{1, 1}, {0, 1}});
  auto s = solve_isomorphisms(Z2, Z2, {{{hol, hol}}, {}});
  EXPECT_FALSE(s.complete);
  std::set<linalg::Mat> got, want;
  for (const auto& f : s.isos) got.insert(f.matrix());
  for (Int sign : {-1, 1})
    for (Int a = -8; a <= 8; ++a) want.insert({{sign, a}, {0, sign}});
  EXPECT_EQ(got, want);
}

TEST(Solve, FiniteAgreesWithBruteForce) {
  std::mt19937_64 rng(3);
  for (const auto& G1 : small_groups())
    for (const auto& G2 : small_groups()) {
      auto isos = oracle::brute_group_isos(G1, G2);
      auto engine = solve_isomorphisms(G1, G2, {});
      EXPECT_TRUE(engine.complete);
      EXPECT_EQ(engine.isos, isos);
      if (isos.empty() || G1->elements().size() < 2) continue;
      // random intertwining and pin constraints
      auto e1 = oracle::brute_homs(G1, G1, false);
      auto e2 = oracle::brute_homs(G2, G2, false);
      for (int t = 0; t < 6; ++t) {
        ConstraintSet cs;
        cs.intertwine.push_back({e1[rng() % e1.size()], e2[rng() % e2.size()]});
        if (t % 2) cs.pins.push_back({G1->elements()[1], G2->elements()[rng() % G2->elements().size()]});
        std::vector<Hom> want;
        for (const auto& a : isos) {
          bool ok = true;
          for (const auto& x : G1->elements()) {
            for (const auto& it : cs.intertwine) ok = ok && a(it.left(x)) == it.right(a(x));
          }
          for (const auto& p : cs.pins) ok = ok && a(p.from) == p.to;
          if (ok) want.push_back(a);
        }
        EXPECT_EQ(solve_isomorphisms(G1, G2, cs).isos, want);
      }
    }
}

TEST(Solve, InverseRoundTrip) {
  auto Z2 = Group::free_abelian(2);
  auto f = Hom::from_matrix(Z2, Z2, {{2, 1}, {1, 1}});
  auto g = inverse(f);
  EXPECT_EQ(hom_compose(f, g), Hom::identity(Z2));
  EXPECT_THROW(inverse(Hom::from_matrix(Z2, Z2, {{2, 0}, {0, 1}})), std::invalid_argument);
  auto S = Group::symmetric3();
  for (const auto& a : oracle::brute_group_autos(S)) EXPECT_EQ(hom_compose(a, inverse(a)), Hom::identity(S));
}

TEST(Solve, Bijectivity) {
  auto G = Group::fg_abelian(1, {2});
  EXPECT_TRUE(Hom::from_matrix(G, G, {{1, 0}, {1, 1}}).is_bijective());
  EXPECT_FALSE(Hom::from_matrix(G, G, {{1, 0}, {0, 0}}).is_bijective());
  EXPECT_FALSE(Hom::from_matrix(G, G, {{3, 0}, {0, 1}}).is_bijective());
}

TEST(AutGroup, Examples) {
  auto a2 = automorphism_group(Group::cyclic(2));
  EXPECT_EQ(a2.elements.size(), 1u);
  auto az = automorphism_group(Group::free_abelian(1));
  EXPECT_EQ(az.elements.size(), 2u);
  EXPECT_TRUE(az.complete);
  auto s3 = automorphism_group(Group::symmetric3());
  EXPECT_EQ(s3.elements.size(), 6u);
  for (bool inner : s3.inner) EXPECT_TRUE(inner);
  auto z22 = automorphism_group(Group::fg_abelian(0, {2, 2}));
  EXPECT_EQ(std::count(z22.inner.begin(), z22.inner.end(), true), 1);
  // table is a group law: associativity
  const auto& t = s3.table;
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b)
      for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(t[t[a][b]][c], t[a][t[b][c]]);
  auto zz = automorphism_group(Group::free_abelian(2));
  EXPECT_FALSE(zz.complete);
  for (const auto& g : zz.generators) EXPECT_TRUE(g.is_bijective());
}
