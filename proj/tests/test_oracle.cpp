#include <gtest/gtest.h>

#include "bsm/io.hpp"
#include "bsm/oracle.hpp"

using namespace bsm;

TEST(Oracle, GroupAutomorphismCounts) {
  EXPECT_EQ(oracle::brute_group_autos(Group::trivial()).size(), 1u);
  EXPECT_EQ(oracle::brute_group_autos(Group::cyclic(2)).size(), 1u);
  EXPECT_EQ(oracle::brute_group_autos(Group::cyclic(5)).size(), 4u);
  EXPECT_EQ(oracle::brute_group_autos(Group::cyclic(8)).size(), 4u);
  EXPECT_EQ(oracle::brute_group_autos(Group::symmetric3()).size(), 6u);
  EXPECT_EQ(oracle::brute_group_autos(Group::fg_abelian(0, {2, 2})).size(), 6u);
  // hom counts |Hom(Zm, Zn)| = gcd(m, n)
  EXPECT_EQ(oracle::brute_homs(Group::cyclic(4), Group::cyclic(6), false).size(), 2u);
  EXPECT_EQ(oracle::brute_homs(Group::cyclic(6), Group::cyclic(9), false).size(), 3u);
  // Hom(S3, Z2) = {trivial, sign}
  EXPECT_EQ(oracle::brute_homs(Group::symmetric3(), Group::cyclic(2), false).size(), 2u);
}

TEST(Oracle, Guard) {
  EXPECT_THROW(oracle::brute_group_autos(Group::free_abelian(1)), oracle::GuardExceeded);
  EXPECT_THROW(oracle::brute_group_autos(Group::cyclic(13)), oracle::GuardExceeded);
  EXPECT_NO_THROW(oracle::brute_group_autos(Group::cyclic(12)));
  auto lef = io::lefschetz_dehn_twist().data;
  EXPECT_THROW(oracle::brute_out_aut(lef), oracle::GuardExceeded);
  DiscreteData big;
  big.add_group("1", Group::trivial());
  for (int i = 0; i < 5; ++i) big.add_vertex("v" + std::to_string(i), i % 2 ? Sign::Minus : Sign::Plus, "1");
  for (int i = 0; i < 4; ++i)
    big.add_edge("e" + std::to_string(i), "v0", "v" + std::to_string(2 * (i % 2) + 1), Rational(1), "1", {}, {}, {},
                 Element(), Element());
  EXPECT_THROW(oracle::brute_isos(big, big), oracle::GuardExceeded);
}

TEST(Oracle, Radko) {
  auto Gr = io::radko_sphere(Rational(1)).data;
  auto r = oracle::brute_out_aut(Gr);
  EXPECT_EQ(r.autos.size(), 2u);
  EXPECT_EQ(r.num_classes, 2u);
  EXPECT_EQ(r.class_of, (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(oracle::brute_isos(Gr, io::radko_sphere(Rational(2)).data).empty());
  EXPECT_EQ(oracle::brute_isos(Gr, io::cavalcanti_one_curve(Rational(1)).data).size(), 2u);
}

TEST(Oracle, AsymmetricDatum) {
  DiscreteData Gr;
  Gr.add_group("Z2", Group::cyclic(2));
  Gr.add_group("Z3", Group::cyclic(3));
  Gr.add_group("1", Group::trivial());
  Gr.add_vertex("p", Sign::Plus, "Z2");
  Gr.add_vertex("m", Sign::Minus, "Z3");
  Gr.add_edge("x", "p", "m", Rational(1), "1", {}, {}, {}, Element({0}), Element({0}));
  ASSERT_TRUE(validate_discrete(Gr).ok());
  auto r = oracle::brute_out_aut(Gr);
  // Aut(Z3) = Z2 is realized by an automorphism, but no reversing one exists
  EXPECT_EQ(r.num_classes, r.autos.size());
  for (const auto& F : r.autos) EXPECT_EQ(F.orientation, Orientation::Preserving);
  EXPECT_EQ(r.autos.size(), 2u);
}

TEST(Oracle, InnerAutosAreValid) {
  auto Gr = io::two_curve_sphere(Rational(1), Rational(1)).data;
  // annulus group is Z, out of scope for the oracle
  EXPECT_THROW(oracle::brute_inner_autos(Gr), oracle::GuardExceeded);
  DiscreteData S;
  S.add_group("S3", Group::symmetric3());
  S.add_vertex("a", Sign::Plus, "S3");
  S.add_vertex("b", Sign::Minus, "S3");
  auto id = Hom::identity(Group::symmetric3()).images();
  S.add_edge("x", "a", "b", Rational(2), "S3", id, id, id, Element({0}), Element({0}));
  ASSERT_TRUE(validate_discrete(S).ok());
  auto inner = oracle::brute_inner_autos(S);
  EXPECT_EQ(inner.size(), 6u);
  for (const auto& F : inner) EXPECT_TRUE(validate_discrete_iso(F, S, S).ok());
}

TEST(Oracle, HolonomyIsos) {
  auto Z2 = Group::cyclic(2);
  HolonomyData D{{Z2, Z2, Z2, Hom::identity(Z2), Hom::identity(Z2)}, Hom::identity(Z2), Element({0}), Element({0})};
  // phi(h) = gamma' psi(gamma)^-1 = 0 forces h = 0
  EXPECT_EQ(oracle::brute_holonomy_isos(D, D, Orientation::Preserving).size(), 1u);
  EXPECT_EQ(oracle::brute_holonomy_isos(D, D, Orientation::Reversing).size(), 1u);
  // with trivial G the element h is free
  auto T = Group::trivial();
  auto to_t = Hom(Z2, T, {Element()});
  HolonomyData E{{Z2, T, T, to_t, to_t}, Hom::identity(Z2), Element(), Element()};
  EXPECT_EQ(oracle::brute_holonomy_isos(E, E, Orientation::Preserving).size(), 2u);
}
