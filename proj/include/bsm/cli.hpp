#pragma once
// Command line front end. Exit codes: 0 success, 1 negative decision,
// 2 invalid input data, 3 usage error.

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include "bsm/io.hpp"
#include "bsm/oracle.hpp"

namespace bsm::cli {

enum Exit { kOk = 0, kNegative = 1, kInvalid = 2, kUsage = 3 };

namespace detail {

using io::json;

struct Loaded {
  io::DataFile file;
  bool ok = false;
};

inline Loaded load(const std::string& path, std::ostream& err) {
  Loaded l;
  try {
    l.file = io::read_data_file(path);
  } catch (const io::ParseError& e) {
    err << path << ": " << e.what() << "\n";
    return l;
  } catch (const std::exception& e) {
    err << path << ": " << e.what() << "\n";
    return l;
  }
  auto rep = validate_discrete(l.file.data);
  if (!rep.ok()) {
    for (const auto& m : rep.issues) err << path << ": " << m << "\n";
    return l;
  }
  l.ok = true;
  return l;
}

inline json factorization_json(const PicFactorization& f) {
  json fs = json::array();
  for (const auto& x : f.factors) fs.push_back(x.str());
  json j = {{"applicable", f.applicable}, {"complete", f.complete}, {"factors", fs}, {"text", f.str()}};
  if (!f.applicable) j["reason"] = f.reason;
  return j;
}

inline std::string invariants_str(const linalg::Vec& inv) {
  std::string s;
  for (Int d : inv) {
    if (d == 1) continue;
    s += (s.empty() ? "" : " x ") + (d == 0 ? std::string("Z") : "Z" + std::to_string(d));
  }
  return s.empty() ? "1" : s;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using detail::json;
  CLI::App app{"Discrete presentations of stable b-symplectic manifolds", "bsm"};
  app.require_subcommand(1);
  bool witness = false, machine = false, sign_flip = false;
  Int max_entry = 8;
  std::string rho_text = "1/1";

  auto common = [&](CLI::App* sub) {
    sub->add_flag("--machine", machine, "Structured JSON output");
    sub->add_option("--max-abelian-entry", max_entry, "Entry bound for infinite abelian families")->check(CLI::PositiveNumber);
  };

  std::string file_a, file_b;
  auto* validate = app.add_subcommand("validate", "Parse and validate a data file");
  validate->add_option("file", file_a)->required();
  validate->add_flag("--machine", machine, "Structured JSON output");

  auto* morita = app.add_subcommand("morita", "Decide Morita equivalence of two data files");
  morita->add_option("a", file_a)->required();
  morita->add_option("b", file_b)->required();
  morita->add_flag("--witness", witness, "Print an isomorphism witness");
  common(morita);

  auto* outaut = app.add_subcommand("outaut", "Automorphisms modulo inner automorphisms");
  outaut->add_option("file", file_a)->required();
  common(outaut);

  auto* picard = app.add_subcommand("picard", "Picard group presentation and factorization");
  picard->add_option("file", file_a)->required();
  picard->add_flag("--reversing-sign-flip", sign_flip, "Reversing classes act on R^N by -1");
  common(picard);

  std::string out_path;
  auto* build = app.add_subcommand("build", "Build surface data from a region/circle description");
  build->add_option("spec", file_a, "JSON with regions[{id,sign,genus,boundaries}] and circles[{id,pos,neg,period}]")
      ->required();
  build->add_option("-o,--output", out_path, "Write to a file instead of stdout");

  std::string study;
  auto* cs = app.add_subcommand("case-study", "Emit a bundled example datum");
  cs->add_option("name", study)->required()->check(CLI::IsMember(io::case_study_names()));
  cs->add_option("--rho", rho_text, "Modular period num/den");
  cs->add_option("-o,--output", out_path, "Write to a file instead of stdout");

  auto* orc = app.add_subcommand("oracle", "Compare the search engine with brute force");
  orc->add_option("a", file_a)->required();
  orc->add_option("b", file_b);
  orc->add_flag("--machine", machine, "Structured JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  SolveOptions sopt;
  sopt.max_entry = max_entry;

  auto emit_file = [&](const io::DataFile& f) {
    std::string text = io::serialize_data(f);
    if (out_path.empty()) {
      out << text;
    } else {
      std::ofstream o(out_path, std::ios::binary);
      if (!o) {
        err << "cannot write " << out_path << "\n";
        return static_cast<int>(kUsage);
      }
      o << text;
    }
    return static_cast<int>(kOk);
  };

  try {
    if (*validate) {
      io::DataFile f;
      try {
        f = io::read_data_file(file_a);
      } catch (const io::ParseError& e) {
        if (machine)
          out << io::dump_canonical({{"valid", false},
                                     {"errors", {e.what()}},
                                     {"path", e.path()},
                                     {"line", e.line()},
                                     {"column", e.column()}});
        else
          err << file_a << ": " << e.what() << "\n";
        return kInvalid;
      } catch (const std::exception& e) {
        err << file_a << ": " << e.what() << "\n";
        return kInvalid;
      }
      auto rep = validate_discrete(f.data);
      if (machine) {
        out << io::dump_canonical({{"valid", rep.ok()}, {"errors", rep.issues}});
      } else if (rep.ok()) {
        out << file_a << ": valid (" << f.data.vertices.size() << " vertices, " << f.data.edges.size() << " edges)\n";
      } else {
        for (const auto& m : rep.issues) err << file_a << ": " << m << "\n";
      }
      return rep.ok() ? kOk : kInvalid;
    }

    if (*morita) {
      auto a = detail::load(file_a, err);
      if (!a.ok) return kInvalid;
      auto b = detail::load(file_b, err);
      if (!b.ok) return kInvalid;
      auto d = morita_equivalent(a.file.data, b.file.data, sopt);
      if (machine) {
        json j = {{"equivalent", d.equivalent}, {"complete", d.complete}};
        if (witness && d.witness) j["witness"] = io::iso_to_json(*d.witness, a.file.data, b.file.data);
        out << io::dump_canonical(j);
      } else {
        out << (d.equivalent ? "Morita equivalent" : "not Morita equivalent");
        if (!d.equivalent && !d.complete) out << " (within entry bound " << max_entry << ")";
        out << "\n";
        if (witness && d.witness) {
          if (d.witness->orientation == Orientation::Reversing) out << "// note: " << kReversingNote << "\n";
          out << io::dump_canonical(io::iso_to_json(*d.witness, a.file.data, b.file.data));
        }
      }
      return d.equivalent ? kOk : kNegative;
    }

    if (*outaut) {
      auto a = detail::load(file_a, err);
      if (!a.ok) return kInvalid;
      OutAutOptions oo;
      oo.solve = sopt;
      auto d = out_aut_discrete(a.file.data, oo);
      const auto& Gr = a.file.data;
      std::string structure = "unknown";
      if (d.presentation) structure = detail::invariants_str(d.presentation->invariants);
      else if (d.complete) structure = "non-abelian of order " + std::to_string(d.num_classes());
      if (machine) {
        json reps = json::array();
        for (std::size_t c = 0; c < d.num_classes(); ++c) reps.push_back(io::iso_to_json(d.rep(c), Gr, Gr));
        json j = {{"automorphisms", d.autos.size()}, {"classes", d.num_classes()}, {"complete", d.complete},
                  {"structure", structure}, {"representatives", reps}};
        if (d.complete) j["table"] = d.table;
        out << io::dump_canonical(j);
      } else {
        out << "OutAut: " << structure << (d.complete ? "" : " (bounded search)") << "\n";
        out << "automorphisms found: " << d.autos.size() << ", classes: " << d.num_classes() << "\n";
        for (std::size_t c = 0; c < d.num_classes(); ++c) {
          const auto& F = d.rep(c);
          out << "  class " << c << ": " << orientation_str(F.orientation) << ", edges";
          for (std::size_t e = 0; e < F.edge_map.size(); ++e)
            out << " " << Gr.edges[e].id << "->" << Gr.edges[F.edge_map[e]].id;
          out << "\n";
        }
        if (d.complete && d.num_classes() <= 16) {
          out << "class table:\n";
          for (const auto& row : d.table) {
            out << " ";
            for (auto x : row) out << " " << x;
            out << "\n";
          }
        }
      }
      return kOk;
    }

    if (*picard) {
      auto a = detail::load(file_a, err);
      if (!a.ok) return kInvalid;
      PicOptions po;
      po.outaut.solve = sopt;
      po.reversing_sign_flip = sign_flip;
      auto p = picard_presentation(a.file.data, po);
      auto f = factorize_pic(p);
      const auto& Gr = a.file.data;
      if (machine) {
        json twists = json::array(), kernel = json::array(), periods = json::array();
        for (const auto& t : p.twisting_classes) twists.push_back(t ? json(*t) : json(nullptr));
        for (const auto& r : p.periods) periods.push_back(rational_str(r));
        for (const auto& k : p.kernel_generators) {
          json tr = json::array();
          for (const auto& r : k.translation) tr.push_back(rational_str(r));
          kernel.push_back({{"class", k.out_class ? json(*k.out_class) : json(nullptr)}, {"translation", tr}});
        }
        out << io::dump_canonical({{"N", p.N},
                                   {"periods", periods},
                                   {"out_aut_classes", p.out_aut.num_classes()},
                                   {"out_aut_complete", p.out_aut.complete},
                                   {"twisting_classes", twists},
                                   {"kernel_generators", kernel},
                                   {"factorization", detail::factorization_json(f)}});
      } else {
        out << f.str() << "\n";
        out << "N = " << p.N << ", out_aut classes = " << p.out_aut.num_classes()
            << (p.out_aut.complete ? "" : " (bounded search)") << "\n";
        for (std::size_t i = 0; i < p.N; ++i) {
          out << "edge " << Gr.edges[i].id << ": period " << rational_str(p.periods[i]) << ", twist class ";
          if (p.twisting_classes[i]) out << *p.twisting_classes[i];
          else out << "?";
          out << "\n";
        }
      }
      return kOk;
    }

    if (*build) {
      std::ifstream in(file_a);
      if (!in) {
        err << "cannot open " << file_a << "\n";
        return kInvalid;
      }
      io::SurfaceSpec spec;
      try {
        spec = io::surface_spec_from_json(json::parse(in));
      } catch (const io::ParseError& e) {
        err << file_a << ": " << e.what() << "\n";
        return kInvalid;
      } catch (const json::exception& e) {
        err << file_a << ": " << e.what() << "\n";
        return kInvalid;
      }
      try {
        return emit_file(io::DataFile{{"// built from " + file_a}, io::build_surface(spec)});
      } catch (const std::exception& e) {
        err << file_a << ": " << e.what() << "\n";
        return kInvalid;
      }
    }

    if (*cs) {
      Rational rho;
      try {
        rho = io::parse_period(rho_text, "--rho");
      } catch (const io::ParseError& e) {
        err << e.what() << "\n";
        return kUsage;
      }
      return emit_file(io::case_study(study, rho));
    }

    if (*orc) {
      auto a = detail::load(file_a, err);
      if (!a.ok) return kInvalid;
      if (file_b.empty()) {
        auto engine = out_aut_discrete(a.file.data);
        auto brute = oracle::brute_out_aut(a.file.data);
        std::vector<std::vector<Int>> ek, bk;
        for (const auto& F : engine.autos) ek.push_back(iso_key(F));
        for (const auto& F : brute.autos) bk.push_back(iso_key(F));
        bool agree = ek == bk && engine.class_of == brute.class_of;
        if (machine)
          out << io::dump_canonical({{"agree", agree},
                                     {"engine", {{"autos", engine.autos.size()}, {"classes", engine.num_classes()}}},
                                     {"oracle", {{"autos", brute.autos.size()}, {"classes", brute.num_classes}}}});
        else
          out << (agree ? "agree" : "DISAGREE") << ": engine " << engine.autos.size() << " autos / "
              << engine.num_classes() << " classes, oracle " << brute.autos.size() << " autos / " << brute.num_classes
              << " classes\n";
        return agree ? kOk : kNegative;
      }
      auto b = detail::load(file_b, err);
      if (!b.ok) return kInvalid;
      auto engine = find_discrete_isos(a.file.data, b.file.data);
      auto brute = oracle::brute_isos(a.file.data, b.file.data);
      std::vector<std::vector<Int>> ek, bk;
      for (const auto& F : engine.isos) ek.push_back(iso_key(F));
      for (const auto& F : brute) bk.push_back(iso_key(F));
      bool agree = ek == bk;
      if (machine)
        out << io::dump_canonical({{"agree", agree}, {"engine", engine.isos.size()}, {"oracle", brute.size()}});
      else
        out << (agree ? "agree" : "DISAGREE") << ": engine " << engine.isos.size() << " isos, oracle " << brute.size()
            << " isos\n";
      return agree ? kOk : kNegative;
    }
  } catch (const oracle::GuardExceeded& e) {
    err << "oracle: " << e.what() << "\n";
    return kUsage;
  } catch (const UnsupportedBackend& e) {
    err << "unsupported: " << e.what() << "\n";
    return kInvalid;
  }
  return kUsage;
}

}  // namespace bsm::cli
