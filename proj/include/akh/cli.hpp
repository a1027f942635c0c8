#pragma once

// The `akh` command line: subcommands, report assembly and exit codes.
// Exit 0 means every requested check passed, 1 a failed check, 2 a usage
// or input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "akh/complex.hpp"
#include "akh/corpus.hpp"
#include "akh/homology.hpp"
#include "akh/moduli.hpp"

namespace akh::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kUsage = 2;

/// Bad input: unreadable file, malformed generator, crossing bound exceeded.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline AnnularDiagram read_diagram(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_morse_word(buf.str());
  } catch (const std::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline Json bigint_json(const BigInt& v) {
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
    return v.convert_to<long long>();
  return v.str();
}

inline Json diagram_json(const AnnularDiagram& D) {
  Json j;
  j["n"] = D.crossing_count();
  j["n_plus"] = D.n_plus();
  j["n_minus"] = D.n_minus();
  j["strands"] = D.strands_at_cut();
  Json circles = Json::array();
  const ResolutionCube Q(D);
  for (std::uint32_t u = 0; u < Q.vertex_count(); ++u) {
    const Resolution& R = Q.at(u);
    circles.push_back({{"vertex", Vertex(u, D.crossing_count()).str()},
                       {"trivial", R.trivial_count},
                       {"essential", R.essential_count}});
  }
  j["circles"] = std::move(circles);
  return j;
}

inline Json homology_json(const HomologyTable& H) {
  Json rows = Json::array();
  for (const auto& [d, g] : H) {
    Json t = Json::array();
    for (const auto& v : g.torsion) t.push_back(bigint_json(v));
    rows.push_back({{"h", d.h}, {"q", d.q}, {"a", d.a}, {"rank", g.rank}, {"torsion", std::move(t)}});
  }
  return rows;
}

inline void print_homology(std::ostream& out, const HomologyTable& H) {
  out << "    h    q    a  rank  torsion\n";
  for (const auto& [d, g] : H) {
    out << std::setw(5) << d.h << std::setw(5) << d.q << std::setw(5) << d.a << std::setw(6) << g.rank << "  ";
    if (g.torsion.empty()) out << "-";
    for (std::size_t i = 0; i < g.torsion.size(); ++i) out << (i ? "," : "") << "Z/" << g.torsion[i];
    out << "\n";
  }
}

/// Records one check in the report and prints its verdict.
template <class Report>
Json check_json(const std::string& suite, const Report& rep) {
  Json j{{"suite", suite}, {"pass", rep.pass}};
  if (rep.counterexample) j["counterexample"] = *rep.counterexample;
  return j;
}

struct Options {
  std::string json_path;
  unsigned threads = 0;
  int bound = 10;
  std::string file, file2, op = "E", check = "all", suite = "all", subcube, x, y, out_dir, ladybug = "right";
  int dim = 0, max_dim = 3, max_crossings = 8, count = 50;
  std::uint64_t seed = 2024;
  bool homology = false, les = false;
};

// Crossings are numbered from 1 and paths are written as compositions, so
// "1E2" performs crossing 2, then J, then crossing 1.
inline std::string path_label(const FlowCube& F, const std::vector<int>& coords) {
  std::string s;
  for (auto it = coords.rbegin(); it != coords.rend(); ++it)
    s += *it == F.j_coord() ? std::string(to_string(F.op())) : std::to_string(*it + 1);
  return s;
}

inline Json point_json(const FlowCube& F, std::uint32_t u, const std::vector<int>& coords, const FramedPoint& p) {
  Json chain = Json::array();
  std::uint32_t w = u;
  for (std::size_t k = 0; k < p.chain.size(); ++k) {
    chain.push_back(F.gen_str(w, p.chain[k]));
    if (k < coords.size()) w |= 1u << coords[k];
  }
  Json j{{"chain", std::move(chain)}, {"framing", p.framing}};
  if (p.position) {
    j["j"] = p.j;
    j["position"] = p.position->str();
  }
  return j;
}

class Runner {
 public:
  Runner(Options o, std::ostream& out, std::ostream& err) : o_(std::move(o)), out_(out), err_(err) {}

  int compute() {
    const auto D = load(o_.file);
    const auto H = homology(build_ckh(D));
    report_["homology"] = homology_json(H);
    print_homology(out_, H);
    return kPass;
  }

  int sl2() {
    const auto D = load(o_.file);
    const Sl2Op J = op();
    const Sl2Check which = parse_sl2_check(o_.check);
    const ResolutionCube Q(D);
    const auto rep = verify_sl2(Q, J, which);
    return verdict("sl2 " + o_.check, check_json("sl2:" + o_.check, rep), rep.pass, rep.counterexample);
  }

  int cone() {
    const auto D = load(o_.file);
    const Sl2Op J = op();
    auto Q = std::make_shared<const ResolutionCube>(D);
    const CubeComplex C = build_cone(Q, J);
    bool pass = true;
    const auto d2 = verify_d_squared(C);
    pass &= verdict("d^2 = 0", check_json("d_squared", d2), d2.pass, d2.counterexample) == kPass;
    if (o_.homology) {
      const auto H = homology(C);
      report_["homology"] = homology_json(H);
      print_homology(out_, H);
    }
    if (o_.les) {
      const auto les = verify_les(D, J);
      pass &= verdict("long exact sequence", check_json("les", les), les.pass, les.counterexample) == kPass;
    }
    return pass ? kPass : kFail;
  }

  int moduli() {
    const auto D = load(o_.file);
    const FlowCube F(D, op());
    const int dim = F.dimension();
    const Subcube S = o_.subcube.empty() ? Subcube(Vertex(0, dim), Vertex(F.vertex_count() - 1, dim))
                                         : Subcube::parse(o_.subcube);
    if (S.lo.dim() != dim)
      throw InputError("subcube vertices need " + std::to_string(dim) + " coordinates, the last one is J");
    if (o_.x.empty() || o_.y.empty()) throw InputError("moduli needs --x and --y");
    const std::uint32_t u = S.lo.bits(), v = S.hi.bits();
    const std::uint32_t x = generator(F, u, o_.x), y = generator(F, v, o_.y);
    const std::vector<int> coords = S.free_coords();
    const Ladybug choice = o_.ladybug == "left" ? Ladybug::Left : Ladybug::Right;
    Json j{{"dim", o_.dim}, {"subcube", S.str()}, {"x", F.gen_str(u, x)}, {"y", F.gen_str(v, y)}};
    try {
      if (o_.dim == 0) {
        std::vector<int> perm = coords;
        Json paths = Json::array();
        do {
          const auto P = path_moduli(F, u, perm, x, y);
          Json pts = Json::array();
          for (const auto& p : P.points) pts.push_back(point_json(F, u, perm, p));
          out_ << path_label(F, perm) << ": " << P.points.size() << "\n";
          paths.push_back({{"path", path_label(F, perm)}, {"count", P.points.size()}, {"points", std::move(pts)}});
        } while (std::next_permutation(perm.begin(), perm.end()));
        j["paths"] = std::move(paths);
      } else if (o_.dim == 1) {
        if (coords.size() != 2) throw InputError("--dim 1 needs a 2-dimensional subcube");
        const auto M = square_moduli(F, u, coords[0], coords[1], x, y, choice);
        Json chords = Json::array();
        for (const auto& c : M.chords) {
          out_ << to_string(c.kind) << " " << path_label(F, {coords[c.side[0]], coords[1 - c.side[0]]}) << "[" << c.index[0]
               << "] - " << path_label(F, {coords[c.side[1]], coords[1 - c.side[1]]}) << "[" << c.index[1] << "]\n";
          chords.push_back({{"kind", to_string(c.kind)}, {"side", c.side}, {"index", c.index}});
        }
        const auto bad = matching_violation(M);
        j["sides"] = {M.sides[0].size(), M.sides[1].size()};
        j["ladybug"] = M.ladybug;
        j["chords"] = std::move(chords);
        if (bad) {
          j["counterexample"] = *bad;
          report_["moduli"] = std::move(j);
          err_ << "matching fails: " << *bad << "\n";
          return kFail;
        }
      } else if (o_.dim == 2) {
        if (coords.size() != 3) throw InputError("--dim 2 needs a 3-dimensional subcube");
        Json bounds = Json::array();
        bool closed = true;
        for (const auto& B : hexagon_boundaries(F, u, {coords[0], coords[1], coords[2]}, x, choice)) {
          if (B.y != y) continue;
          for (const auto& [corner, deg] : B.degrees()) closed &= deg == 2;
          Json corners = Json::array();
          for (int p = 0; p < 6; ++p)
            corners.push_back({{"path", path_label(F, B.paths[p])}, {"count", B.corners[p].size()}});
          out_ << B.corner_count() << " corners, " << B.links.size() << " links, " << B.components().size()
               << " components\n";
          bounds.push_back({{"corners", std::move(corners)},
                            {"links", B.links.size()},
                            {"components", B.components().size()}});
        }
        j["boundaries"] = std::move(bounds);
        j["closed"] = closed;
        if (!closed) {
          report_["moduli"] = std::move(j);
          err_ << "boundary is not a closed 1-manifold\n";
          return kFail;
        }
      } else {
        throw InputError("--dim must be 0, 1 or 2");
      }
    } catch (const ModuliError& e) {
      j["counterexample"] = e.what();
      report_["moduli"] = std::move(j);
      err_ << e.what() << "\n";
      return kFail;
    }
    report_["moduli"] = std::move(j);
    return kPass;
  }

  int verify() {
    const auto D = load(o_.file);
    const FlowCube F(D, op());
    const bool all = o_.suite == "all";
    if (!all && o_.suite != "thinness" && o_.suite != "squares" && o_.suite != "closure")
      throw InputError("--suite must be thinness, squares, closure or all");
    bool pass = true;
    if (all || o_.suite == "thinness") {
      const auto r = check_thin_props(F, o_.max_dim, o_.threads);
      Json j = check_json("thinness", r);
      j["subcubes"] = r.subcubes;
      j["connected_subcubes"] = r.connected_subcubes;
      j["pairs"] = r.pairs;
      j["thin_pairs"] = r.thin_pairs;
      j["two_to_one_pairs"] = r.two_to_one_pairs;
      j["disconnected_thick_pairs"] = r.disconnected_thick_pairs;
      j["corollary_checks"] = r.corollary_checks;
      if (r.two_to_one_witness) j["two_to_one_witness"] = *r.two_to_one_witness;
      if (r.disconnected_thick_witness) j["disconnected_thick_witness"] = *r.disconnected_thick_witness;
      pass &= verdict("thinness", std::move(j), r.pass, r.counterexample) == kPass;
    }
    if (all || o_.suite == "squares") {
      const auto r = verify_squares(F, Ladybug::Right, o_.threads);
      Json j = check_json("squares", r);
      j["faces"] = r.faces;
      j["matchings"] = r.matchings;
      j["ladybugs"] = r.ladybugs;
      j["through_strands"] = r.through_strands;
      j["turnbacks"] = r.turnbacks;
      pass &= verdict("squares", std::move(j), r.pass, r.counterexample) == kPass;
    }
    if (all || o_.suite == "closure") {
      const auto r = verify_closure_3d(F, Ladybug::Right, o_.threads);
      Json j = check_json("closure", r);
      j["subcubes"] = r.subcubes;
      j["boundaries"] = r.boundaries;
      j["corners"] = r.corners;
      j["cycles"] = r.cycles;
      j["trivial_covers"] = r.trivial_covers;
      pass &= verdict("closure", std::move(j), r.pass, r.counterexample) == kPass;
    }
    return pass ? kPass : kFail;
  }

  int corpus() {
    if (o_.max_crossings > o_.bound)
      throw InputError("--max-crossings " + std::to_string(o_.max_crossings) + " exceeds the bound " +
                       std::to_string(o_.bound) + " (raise --bound)");
    if (o_.out_dir.empty()) throw InputError("corpus needs --out");
    const auto items = generate_corpus(o_.count, o_.max_crossings, o_.seed);
    const auto paths = write_corpus(items, o_.out_dir);
    Json files = Json::array();
    bool pass = true;
    for (const auto& p : paths) {
      // every written file must read back and satisfy d^2 = 0
      const auto D = read_diagram(p.string());
      const auto d2 = verify_d_squared(build_ckh(D));
      files.push_back({{"file", p.filename().string()}, {"n", D.crossing_count()}, {"d_squared", d2.pass}});
      if (!d2.pass) {
        pass = false;
        err_ << p.string() << ": " << d2.counterexample.value_or("") << "\n";
      }
    }
    out_ << "wrote " << paths.size() << " diagrams to " << o_.out_dir << "\n";
    report_["corpus"] = {{"seed", o_.seed}, {"count", o_.count}, {"max_crossings", o_.max_crossings}, {"files", std::move(files)}};
    return pass ? kPass : kFail;
  }

  int reidemeister() {
    const auto A = load(o_.file), B = load(o_.file2);
    const auto HA = homology(build_ckh(A)), HB = homology(build_ckh(B));
    report_["homology"] = homology_json(HA);
    report_["homology_second"] = homology_json(HB);
    const bool same = HA == HB;
    if (!same) {
      out_ << o_.file << ":\n";
      print_homology(out_, HA);
      out_ << o_.file2 << ":\n";
      print_homology(out_, HB);
    }
    return verdict("homology tables agree", Json{{"suite", "reidemeister"}, {"pass", same}}, same, std::nullopt);
  }

  Json& report() { return report_; }

 private:
  AnnularDiagram load(const std::string& path) {
    auto D = read_diagram(path);
    if (D.crossing_count() > o_.bound)
      throw InputError(path + " has " + std::to_string(D.crossing_count()) + " crossings, above the bound " +
                       std::to_string(o_.bound) + " (raise --bound)");
    if (!report_.contains("diagram")) report_["diagram"] = diagram_json(D);
    return D;
  }

  Sl2Op op() const {
    try {
      return parse_sl2_op(o_.op);
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
  }

  static std::uint32_t generator(const FlowCube& F, std::uint32_t u, const std::string& text) {
    try {
      return parse_generator(F.resolution(u), text).labels;
    } catch (const std::exception& e) {
      throw InputError(std::string(e.what()) + " at vertex " + F.vertex_str(u));
    }
  }

  int verdict(const std::string& what, Json j, bool pass, const std::optional<std::string>& witness) {
    out_ << what << ": " << (pass ? "pass" : "FAIL") << "\n";
    if (!pass && witness) out_ << "  counterexample: " << *witness << "\n";
    report_["verify"].push_back(std::move(j));
    return pass ? kPass : kFail;
  }

  Options o_;
  std::ostream& out_;
  std::ostream& err_;
  Json report_ = Json::object();
};

/// Runs one command line (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Annular Khovanov homology, sl2 action and flow-category checks", "akh"};
  app.require_subcommand(1);
  app.add_option("--json", o.json_path, "Write a JSON report to this path");
  app.add_option("--threads", o.threads, "Worker threads (default: AKH_THREADS, then all cores)");
  app.add_option("--bound", o.bound, "Largest crossing count accepted")->capture_default_str();

  auto ops = CLI::IsMember({"E", "F", "H"});
  auto* compute = app.add_subcommand("compute", "Homology of the annular complex");
  compute->add_option("FILE", o.file)->required();

  auto* sl2 = app.add_subcommand("sl2", "Chain-level checks of the sl2 action");
  sl2->add_option("FILE", o.file)->required();
  sl2->add_option("--op", o.op)->check(ops)->capture_default_str();
  sl2->add_option("--verify", o.check)->check(CLI::IsMember({"all", "relations", "chainmap", "theta", "weight"}))
      ->capture_default_str();

  auto* cone = app.add_subcommand("cone", "Mapping cone of J");
  cone->add_option("FILE", o.file)->required();
  cone->add_option("--op", o.op)->check(ops)->capture_default_str();
  cone->add_flag("--homology", o.homology, "Print the homology of the cone");
  cone->add_flag("--les", o.les, "Check the long exact sequence of the cone");

  auto* moduli = app.add_subcommand("moduli", "Moduli spaces of the cone's flow category");
  moduli->add_option("FILE", o.file)->required();
  moduli->add_option("--op", o.op)->check(ops)->capture_default_str();
  moduli->add_option("--dim", o.dim)->check(CLI::Range(0, 2))->capture_default_str();
  moduli->add_option("--subcube", o.subcube, "U..V over n+1 coordinates, J last (default: the whole cube)");
  moduli->add_option("--x", o.x, "Generator at U, e.g. 1,v-");
  moduli->add_option("--y", o.y, "Generator at V");
  moduli->add_option("--ladybug", o.ladybug)->check(CLI::IsMember({"right", "left"}))->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Thinness, square and closure suites");
  verify->add_option("FILE", o.file)->required();
  verify->add_option("--op", o.op)->check(ops)->capture_default_str();
  verify->add_option("--suite", o.suite)->check(CLI::IsMember({"thinness", "squares", "closure", "all"}))
      ->capture_default_str();
  verify->add_option("--max-dim", o.max_dim, "Largest subcube for the thinness suite")->capture_default_str();

  auto* corpus = app.add_subcommand("corpus", "Write the named and random test diagrams");
  corpus->add_option("--max-crossings", o.max_crossings)->capture_default_str();
  corpus->add_option("--count", o.count)->capture_default_str();
  corpus->add_option("--seed", o.seed)->capture_default_str();
  corpus->add_option("--out", o.out_dir)->required();

  auto* reid = app.add_subcommand("reidemeister", "Compare the homology of two diagrams");
  reid->add_option("FILE1", o.file)->required();
  reid->add_option("FILE2", o.file2)->required();

  // global options may follow the subcommand
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  Runner r(o, out, err);
  const auto start = std::chrono::steady_clock::now();
  int status = kUsage;
  try {
    if (*compute) status = r.compute();
    else if (*sl2) status = r.sl2();
    else if (*cone) status = r.cone();
    else if (*moduli) status = r.moduli();
    else if (*verify) status = r.verify();
    else if (*corpus) status = r.corpus();
    else if (*reid) status = r.reidemeister();
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.json_path.empty()) {
    Json& rep = r.report();
    rep["command"] = app.get_subcommands().front()->get_name();
    rep["pass"] = status == kPass;
    rep["timing"] = {{"seconds", seconds}};
    std::ofstream f(o.json_path);
    if (!f) {
      err << "error: cannot write " << o.json_path << "\n";
      return kUsage;
    }
    f << rep.dump(2) << "\n";
  }
  return status;
}

}  // namespace akh::cli
