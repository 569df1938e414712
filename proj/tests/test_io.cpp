#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "bsm/io.hpp"
#include "corpus.hpp"

using namespace bsm;

namespace {

std::string data_path(const std::string& name) { return std::string(BSM_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Io, RoundTripOnCorpus) {
  for (const auto& e : corpus::build(6)) {
    auto text = io::serialize_data(e.data);
    auto back = io::parse_data(text);
    EXPECT_EQ(io::serialize_data(back), text) << e.name;
    EXPECT_TRUE(validate_discrete(back.data).ok()) << e.name;
    // the reparsed datum is the same object up to isomorphism by the identity
    EXPECT_TRUE(morita_equivalent(e.data, back.data).equivalent) << e.name;
  }
}

TEST(Io, FixturesAreCanonical) {
  for (const auto& name : io::case_study_names()) {
    auto text = slurp(data_path(name + ".bsm"));
    ASSERT_FALSE(text.empty()) << name;
    EXPECT_EQ(io::serialize_data(io::parse_data(text)), text) << name;
  }
  EXPECT_EQ(slurp(data_path("lefschetz_dehn_twist.bsm")), io::serialize_data(io::lefschetz_dehn_twist()));
  EXPECT_EQ(slurp(data_path("radko_sphere.bsm")), io::serialize_data(io::radko_sphere(Rational(1))));
}

TEST(Io, CommentsArePreserved) {
  auto f = io::read_data_file(data_path("lefschetz_dehn_twist.bsm"));
  ASSERT_FALSE(f.comments.empty());
  EXPECT_NE(f.comments[0].find("Lefschetz"), std::string::npos);
}

TEST(Io, BrokenPeriodNamesTheField) {
  try {
    io::read_data_file(data_path("broken_period.bsm"));
    FAIL() << "expected a parse error";
  } catch (const io::ParseError& e) {
    EXPECT_EQ(e.path(), "edges[0].period");
  }
}

TEST(Io, BrokenSyntaxHasPosition) {
  try {
    io::read_data_file(data_path("broken_syntax.bsm"));
    FAIL() << "expected a parse error";
  } catch (const io::ParseError& e) {
    EXPECT_GE(e.line(), 3u);
  }
}

TEST(Io, SignViolationParsesButFailsValidation) {
  auto f = io::read_data_file(data_path("broken_sign.bsm"));
  auto r = validate_discrete(f.data);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.issues[0].find("edge z"), std::string::npos);
}

TEST(Io, RejectsUnknownKeysAndBadElements) {
  auto j = io::data_to_json(io::radko_sphere(Rational(1)).data);
  auto extra = j;
  extra["edges"][0]["colour"] = "red";
  EXPECT_THROW(io::data_from_json(extra), io::ParseError);
  auto bad_group = j;
  bad_group["vertices"][0]["group"] = "nope";
  try {
    io::data_from_json(bad_group);
    FAIL();
  } catch (const io::ParseError& e) {
    EXPECT_EQ(e.path(), "vertices[0].group");
  }
  auto z3 = io::data_to_json(corpus::build(1).front().data);
  EXPECT_NO_THROW(io::data_from_json(z3));
}

TEST(Io, PeriodParsing) {
  EXPECT_EQ(io::parse_period("3/2", "p"), Rational(3, 2));
  EXPECT_EQ(io::parse_period("4/6", "p"), Rational(2, 3));
  EXPECT_EQ(io::parse_period("5", "p"), Rational(5));
  EXPECT_THROW(io::parse_period("1/0", "p"), io::ParseError);
  EXPECT_THROW(io::parse_period("-1/2", "p"), io::ParseError);
  EXPECT_THROW(io::parse_period("x", "p"), io::ParseError);
}

TEST(Io, IsoJsonRoundTrip) {
  for (const auto& e : corpus::build(4)) {
    for (const auto& F : find_discrete_isos(e.data, e.data).isos) {
      auto j = io::iso_to_json(F, e.data, e.data);
      auto G = io::iso_from_json(j, e.data, e.data);
      EXPECT_EQ(iso_key(G), iso_key(F)) << e.name;
      EXPECT_TRUE(validate_discrete_iso(G, e.data, e.data).ok());
    }
  }
}

TEST(Surface, OneCircleIsRadko) {
  io::SurfaceSpec s{{{"n", Sign::Plus, 0, 1}, {"s", Sign::Minus, 0, 1}}, {{"z", "n", "s", Rational(7, 3)}}};
  auto Gr = io::build_surface(s);
  EXPECT_TRUE(validate_discrete(Gr).ok());
  EXPECT_TRUE(morita_equivalent(Gr, io::radko_sphere(Rational(7, 3)).data).equivalent);
}

TEST(Surface, TwoCirclesFromJson) {
  std::ifstream in(data_path("two_circles.json"));
  auto Gr = io::build_surface(io::surface_spec_from_json(io::json::parse(in)));
  EXPECT_TRUE(validate_discrete(Gr).ok());
  EXPECT_EQ(Gr.vertices.size(), 3u);
  auto band = *Gr.vertex_index("band");
  EXPECT_EQ(Gr.vertex_group(band)->free_rank(), 1);
  for (const auto& e : Gr.edges) EXPECT_EQ(e.hol.gamma_minus, Element({1}));
}

TEST(Surface, Rejections) {
  EXPECT_THROW(io::build_surface({{{"n", Sign::Plus, 0, 1}}, {}}), std::invalid_argument);
  EXPECT_THROW(io::build_surface({{{"n", Sign::Plus, 1, 1}, {"s", Sign::Minus, 0, 1}}, {{"z", "n", "s", Rational(1)}}}),
               UnsupportedBackend);
  // boundary count mismatch
  EXPECT_THROW(io::build_surface({{{"n", Sign::Plus, 0, 2}, {"s", Sign::Minus, 0, 1}}, {{"z", "n", "s", Rational(1)}}}),
               std::invalid_argument);
}

TEST(CaseStudies, AllValid) {
  for (const auto& name : io::case_study_names()) {
    auto f = io::case_study(name, Rational(2));
    EXPECT_TRUE(validate_discrete(f.data).ok()) << name;
    for (const auto& e : f.data.edges) EXPECT_EQ(e.period, Rational(2));
  }
  EXPECT_THROW(io::case_study("torus"), std::invalid_argument);
}
