#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "bsm/cli.hpp"

using namespace bsm;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "bsm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(BSM_DATA_DIR) + "/" + name; }

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(Cli, PicardRadko) {
  auto r = run({"picard", data("radko_sphere.bsm")});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(first_line(r.out), "Z2 x Circle(1/1)");
}

TEST(Cli, PicardLefschetz) {
  auto r = run({"picard", data("lefschetz_dehn_twist.bsm")});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(first_line(r.out), "R x Z2 x Z2");
  auto m = run({"picard", "--machine", data("lefschetz_dehn_twist.bsm")});
  auto j = io::json::parse(m.out);
  EXPECT_EQ(j["N"], 1);
  EXPECT_EQ(j["factorization"]["text"], "R x Z2 x Z2");
}

TEST(Cli, MoritaWithWitness) {
  auto r = run({"morita", "--witness", data("radko_sphere.bsm"), data("cavalcanti_one_curve.bsm")});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(first_line(r.out), "Morita equivalent");
  EXPECT_NE(r.out.find("\"vertex_map\""), std::string::npos);

  auto m = run({"morita", "--witness", "--machine", data("radko_sphere.bsm"), data("cavalcanti_one_curve.bsm")});
  auto j = io::json::parse(m.out);
  EXPECT_TRUE(j["equivalent"]);
  auto a = io::read_data_file(data("radko_sphere.bsm")).data;
  auto b = io::read_data_file(data("cavalcanti_one_curve.bsm")).data;
  auto F = io::iso_from_json(j["witness"], a, b);
  EXPECT_TRUE(validate_discrete_iso(F, a, b).ok());
}

TEST(Cli, MoritaNegative) {
  auto r = run({"morita", data("radko_sphere.bsm"), data("two_curve_sphere.bsm")});
  EXPECT_EQ(r.code, cli::kNegative);
  EXPECT_EQ(first_line(r.out), "not Morita equivalent");
}

TEST(Cli, Validate) {
  EXPECT_EQ(run({"validate", data("radko_sphere.bsm")}).code, cli::kOk);
  auto s = run({"validate", data("broken_sign.bsm")});
  EXPECT_EQ(s.code, cli::kInvalid);
  EXPECT_NE(s.err.find("edge z"), std::string::npos);
  auto p = run({"validate", "--machine", data("broken_period.bsm")});
  EXPECT_EQ(p.code, cli::kInvalid);
  EXPECT_EQ(io::json::parse(p.out)["path"], "edges[0].period");
  EXPECT_EQ(run({"picard", data("broken_sign.bsm")}).code, cli::kInvalid);
  EXPECT_EQ(run({"validate", data("does_not_exist.bsm")}).code, cli::kInvalid);
}

TEST(Cli, Usage) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({"morita", data("radko_sphere.bsm")}).code, cli::kUsage);
  EXPECT_EQ(run({"case-study", "torus"}).code, cli::kUsage);
  EXPECT_EQ(run({"case-study", "radko_sphere", "--rho", "0"}).code, cli::kUsage);
}

TEST(Cli, CaseStudyMatchesFixture) {
  for (const auto& name : io::case_study_names()) {
    auto r = run({"case-study", name});
    EXPECT_EQ(r.code, cli::kOk);
    EXPECT_EQ(r.out, io::serialize_data(io::read_data_file(data(name + ".bsm")))) << name;
  }
  auto r = run({"case-study", "radko_sphere", "--rho", "3/2"});
  EXPECT_NE(r.out.find("\"3/2\""), std::string::npos);
}

TEST(Cli, BuildSurface) {
  auto out = (std::filesystem::temp_directory_path() / "bsm_two_circles.bsm").string();
  auto r = run({"build", data("two_circles.json"), "-o", out});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(run({"validate", out}).code, cli::kOk);
  auto p = run({"picard", out});
  EXPECT_EQ(p.code, cli::kOk);
  std::filesystem::remove(out);
}

TEST(Cli, Oracle) {
  auto r = run({"oracle", data("radko_sphere.bsm")});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(r.out.substr(0, 5), "agree");
  EXPECT_EQ(run({"oracle", data("radko_sphere.bsm"), data("cavalcanti_one_curve.bsm")}).code, cli::kOk);
  EXPECT_EQ(run({"oracle", data("lefschetz_dehn_twist.bsm")}).code, cli::kUsage);
}

TEST(Cli, OutAut) {
  auto r = run({"outaut", data("radko_sphere.bsm")});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(first_line(r.out), "OutAut: Z2");
  auto l = run({"outaut", data("lefschetz_dehn_twist.bsm")});
  EXPECT_EQ(first_line(l.out), "OutAut: Z2 x Z2 x Z (bounded search)");
}

TEST(Cli, Deterministic) {
  for (const auto& name : {"radko_sphere.bsm", "two_curve_sphere.bsm", "lefschetz_dehn_twist.bsm"}) {
    auto a = run({"outaut", "--machine", data(name)});
    auto b = run({"outaut", "--machine", data(name)});
    EXPECT_EQ(a.out, b.out) << name;
  }
}
