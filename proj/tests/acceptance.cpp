// Acceptance run: one line per criterion with its verdict, the exact
// tolerance used and the time taken against its budget.  Exit status is 0
// iff every criterion passes.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "akh/corpus.hpp"
#include "akh/homology.hpp"
#include "akh/moduli.hpp"
#include "oracles.hpp"

using namespace akh;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string failure;

  void fail(const std::string& what) {
    if (pass) failure = what;
    pass = false;
  }
};

const std::vector<CorpusItem>& corpus() {
  static const std::vector<CorpusItem> items = generate_corpus(50, 8, 2024);
  return items;
}

constexpr Sl2Op kOps[] = {Sl2Op::E, Sl2Op::F, Sl2Op::H};

std::string saddle(const AnnularDiagram& D, const char* from, int coord, const char* in) {
  const Vertex u = Vertex::parse(from);
  const Resolution src = resolve(D, u), dst = resolve(D, u.flipped(coord));
  return apply_saddle(D, u, coord, parse_generator(src, in)).str(dst);
}

// 1. Hand-transcribed tables of the four essential saddle types and of E, F
// on two essential circles.
Outcome formula_tables() {
  Outcome o;
  const auto D = parse_morse_word("strands 3; x+ 2; x- 1");
  // (vertex, coordinate, input, expected); circle order is innermost first
  // with trivial circles last, the third circle at 01 is a bystander
  const std::vector<std::tuple<const char*, int, const char*, const char*>> saddles = {
      {"00", 0, "1,v-", "(v-)"},          {"00", 0, "1,v+", "(v+)"},
      {"00", 0, "X,v-", "0"},             {"00", 0, "X,v+", "0"},
      {"01", 0, "v-,v-,v-", "0"},         {"01", 0, "v-,v+,v-", "(X,v-)"},
      {"01", 0, "v-,v-,v+", "(X,v-)"},    {"01", 0, "v-,v+,v+", "0"},
      {"10", 1, "v-", "(X,v-)"},          {"10", 1, "v+", "(X,v+)"},
      {"00", 1, "1,v-", "(v-,v+,v-) + (v+,v-,v-)"}, {"00", 1, "X,v-", "0"},
  };
  int ok = 0;
  for (const auto& [from, c, in, want] : saddles) {
    const auto got = saddle(D, from, c, in);
    if (got == want) ++ok;
    else o.fail(std::string("saddle ") + from + " " + in + " gave " + got + ", expected " + want);
  }
  const auto two = parse_morse_word("strands 2");
  const Resolution R = resolve(two, Vertex(0, 0));
  const std::vector<std::tuple<Sl2Op, const char*, const char*>> acts = {
      {Sl2Op::E, "v-,v-", "-(v-,v+) + (v+,v-)"}, {Sl2Op::E, "v+,v-", "-(v+,v+)"},
      {Sl2Op::E, "v-,v+", "(v+,v+)"},            {Sl2Op::E, "v+,v+", "0"},
      {Sl2Op::F, "v-,v-", "0"},                  {Sl2Op::F, "v+,v-", "(v-,v-)"},
      {Sl2Op::F, "v-,v+", "-(v-,v-)"},           {Sl2Op::F, "v+,v+", "(v-,v+) - (v+,v-)"},
  };
  int ok_j = 0;
  for (const auto& [J, in, want] : acts) {
    const auto got = apply_J(J, R, parse_generator(R, in)).str(R);
    if (got == want) ++ok_j;
    else o.fail(std::string(to_string(J)) + " " + in + " gave " + got + ", expected " + want);
  }
  o.detail = std::to_string(ok) + "/" + std::to_string(saddles.size()) + " saddle values (types I-IV), " +
             std::to_string(ok_j) + "/" + std::to_string(acts.size()) + " E/F values";
  return o;
}

// 2. The two-crossing cone of E from 1,v- at 000 to X,v+ at 111.
Outcome worked_example() {
  Outcome o;
  const FlowCube F(parse_morse_word("strands 3; x+ 2; x- 1"), Sl2Op::E);
  const auto x = parse_generator(F.resolution(0), "1,v-").labels;
  const auto y = parse_generator(F.resolution(7), "X,v+").labels;
  std::vector<int> perm = {0, 1, 2};
  std::ostringstream counts;
  do {
    const auto n = path_moduli(F, 0, perm, x, y).points.size();
    // crossing 2 (index 1), then E, then crossing 1 (index 0)
    const std::size_t want = perm == std::vector<int>{1, 2, 0} ? 3 : 1;
    counts << (counts.tellp() ? " " : "") << perm[0] << perm[1] << perm[2] << ":" << n;
    if (n != want) o.fail("path " + counts.str() + " expected " + std::to_string(want));
  } while (std::next_permutation(perm.begin(), perm.end()));
  const std::uint32_t u = 0b010;
  const auto M = square_moduli(F, u, 0, 2, parse_generator(F.resolution(u), "v+,v-,v-").labels, y);
  const bool one_side_empty = M.sides[0].empty() != M.sides[1].empty();
  if (!one_side_empty || M.sides[0].size() + M.sides[1].size() != 2) o.fail("cancellation face is not empty vs two points");
  if (M.chords.size() != 1 || M.chords[0].kind != ChordKind::Turnback) o.fail("cancellation face is not one turnback");
  if (auto bad = matching_violation(M)) o.fail("turnback: " + *bad);
  const auto C = verify_closure_3d(F);
  if (!C.pass) o.fail("closure: " + C.counterexample.value_or(""));
  o.detail = "path counts (coords in order) " + counts.str() + "; empty-vs-two face closed by 1 turnback; closure " +
             std::to_string(C.boundaries) + " boundaries";
  return o;
}

std::map<TriDegree, IntMatrix> compose(const std::map<TriDegree, IntMatrix>& second,
                                       const std::map<TriDegree, IntMatrix>& first, int w1) {
  std::map<TriDegree, IntMatrix> out;
  for (const auto& [d, m1] : first)
    if (auto it = second.find({d.h, d.q + w1, d.a + w1}); it != second.end()) out.emplace(d, it->second * m1);
  return out;
}

// 3. Chain-level algebra and the relations on homology.
Outcome algebraic_suite() {
  Outcome o;
  std::size_t faces = 0, checks = 0, degrees = 0;
  for (const auto& item : corpus()) {
    auto Q = std::make_shared<const ResolutionCube>(item.diagram);
    const auto d2 = verify_d_squared(build_ckh(Q));
    faces += d2.faces;
    if (!d2.pass) o.fail(item.name + " d^2: " + d2.counterexample.value_or(""));
    for (Sl2Op J : kOps) {
      const auto c2 = verify_d_squared(build_cone(Q, J));
      faces += c2.faces;
      if (!c2.pass) o.fail(item.name + " cone " + to_string(J) + " d^2: " + c2.counterexample.value_or(""));
      const auto s = verify_sl2(*Q, J, J == Sl2Op::E ? Sl2Check::All : Sl2Check::ChainMap);
      checks += s.checks;
      if (!s.pass) o.fail(item.name + " sl2 " + to_string(J) + ": " + s.counterexample.value_or(""));
    }
    const CubeComplex C = build_ckh(Q);
    const GradedChains G(C);
    const ReducedChains R(G, true);
    const auto E = induced_map(R, Sl2Op::E), F = induced_map(R, Sl2Op::F), H = induced_map(R, Sl2Op::H);
    const auto EF = compose(E, F, -2), FE = compose(F, E, 2);
    for (const auto& [d, g] : homology(R)) {
      if (g.rank == 0) continue;
      ++degrees;
      IntMatrix lhs(g.rank, g.rank), h(g.rank, g.rank);
      if (EF.count(d)) lhs = EF.at(d);
      if (FE.count(d))
        for (std::size_t i = 0; i < g.rank; ++i)
          for (std::size_t j = 0; j < g.rank; ++j) lhs(i, j) -= FE.at(d)(i, j);
      if (H.count(d)) h = H.at(d);
      if (!(lhs == h)) o.fail(item.name + ": [E,F] != H on homology");
      for (std::size_t i = 0; i < g.rank; ++i)
        for (std::size_t j = 0; j < g.rank; ++j)
          if (h(i, j) != (i == j ? BigInt(d.a) : BigInt(0))) o.fail(item.name + ": H is not the weight on homology");
    }
  }
  o.detail = std::to_string(corpus().size()) + " diagrams, " + std::to_string(faces) + " anticommuting faces, " +
             std::to_string(checks) + " sl2 chain checks, relations on homology in " + std::to_string(degrees) +
             " degrees";
  return o;
}

// 4. Thinness of every J subcube up to dimension 3.
Outcome thinness() {
  Outcome o;
  std::size_t pairs = 0, h_thin = 0, h_two = 0, e_thick = 0;
  std::string two_witness, thick_witness;
  for (const auto& item : corpus())
    for (Sl2Op J : kOps) {
      const auto r = check_thin_props(FlowCube(item.diagram, J));
      pairs += r.pairs;
      if (!r.pass) o.fail(item.name + " " + to_string(J) + ": " + r.counterexample.value_or(""));
      if (J == Sl2Op::H) {
        h_thin += r.thin_pairs;
        h_two += r.two_to_one_pairs;
        if (r.two_to_one_witness && two_witness.empty()) two_witness = item.name + " " + *r.two_to_one_witness;
      }
      if (J == Sl2Op::E) {
        e_thick += r.disconnected_thick_pairs;
        if (r.disconnected_thick_witness && thick_witness.empty())
          thick_witness = item.name + " " + *r.disconnected_thick_witness;
      }
    }
  if (h_thin == 0) o.fail("no thin H pair in the corpus");
  if (h_two == 0) o.fail("no two-to-one H pair in the corpus");
  if (e_thick == 0) o.fail("no disconnected thick E pair in the corpus");
  o.detail = std::to_string(pairs) + " connected pairs; H thin " + std::to_string(h_thin) + ", H two-to-one " +
             std::to_string(h_two) + " (" + two_witness + "); E disconnected thick " + std::to_string(e_thick) + " (" +
             thick_witness + ")";
  return o;
}

// 5. Square matchings and closure of hexagon boundaries.
Outcome squares_and_closure() {
  Outcome o;
  std::size_t matchings = 0, ladybugs = 0, boundaries = 0, covers = 0;
  for (const auto& item : corpus())
    for (Sl2Op J : kOps) {
      const FlowCube F(item.diagram, J);
      const auto s = verify_squares(F);
      matchings += s.matchings;
      ladybugs += s.ladybugs;
      if (!s.pass) o.fail(item.name + " " + to_string(J) + " squares: " + s.counterexample.value_or(""));
      const auto c = verify_closure_3d(F);
      boundaries += c.boundaries;
      covers += c.trivial_covers;
      if (!c.pass) o.fail(item.name + " " + to_string(J) + " closure: " + c.counterexample.value_or(""));
    }
  o.detail = std::to_string(matchings) + " square matchings (" + std::to_string(ladybugs) + " ladybug), " +
             std::to_string(boundaries) + " hexagon boundaries closed, " + std::to_string(covers) +
             " non-J trivial covers";
  return o;
}

// 6. Homology tables across Reidemeister moves.
Outcome invariance() {
  Outcome o;
  std::map<std::string, int> per_move;
  for (const auto& p : reidemeister_pairs()) {
    ++per_move[p.name.substr(0, 2)];
    if (homology(build_ckh(p.before)) != homology(build_ckh(p.after))) o.fail(p.name);
  }
  for (const char* m : {"R1", "R2", "R3"})
    if (per_move[m] < 2) o.fail(std::string("fewer than two ") + m + " pairs");
  o.detail = std::to_string(per_move["R1"]) + " R1, " + std::to_string(per_move["R2"]) + " R2, " +
             std::to_string(per_move["R3"]) + " R3 pairs with identical rank and torsion";
  return o;
}

// 7. Long exact sequence of the cone, over the rationals.
Outcome les() {
  Outcome o;
  std::size_t degrees = 0;
  for (const auto& item : corpus())
    for (Sl2Op J : kOps) {
      const auto r = verify_les(item.diagram, J);
      degrees += r.degrees;
      if (!r.pass) o.fail(item.name + " " + to_string(J) + ": " + r.counterexample.value_or(""));
    }
  o.detail = std::to_string(degrees) + " degrees checked";
  return o;
}

// 8. Unknots and the Euler characteristic of Cone(H).
Outcome known_values() {
  Outcome o;
  const auto ess = parse_morse_word("strands 1");
  const HomologyTable want_ess = {{{0, 1, 1}, {1, {}}}, {{0, -1, -1}, {1, {}}}};
  if (homology(build_ckh(ess)) != want_ess) o.fail("essential unknot homology");
  const auto E = induced_map(ess, Sl2Op::E);
  std::size_t rank = 0;
  for (const auto& [d, m] : E) rank += rank_of(m);
  if (rank != 1) o.fail("E on the essential unknot has rank " + std::to_string(rank));
  const auto triv = parse_morse_word("strands 0; cup 1; cap 1");
  const HomologyTable want_triv = {{{0, 1, 0}, {1, {}}}, {{0, -1, 0}, {1, {}}}};
  if (homology(build_ckh(triv)) != want_triv) o.fail("trivial unknot homology");
  for (Sl2Op J : kOps)
    for (const auto& [d, m] : induced_map(triv, J))
      if (!m.is_zero()) o.fail(std::string(to_string(J)) + " is nonzero on the trivial unknot");
  for (const auto& item : corpus())
    if (!graded_euler(build_cone(item.diagram, Sl2Op::H)).empty()) o.fail(item.name + ": Cone(H) has nonzero Euler characteristic");
  o.detail = "essential unknot rank 1 at (0,+-1,+-1), E rank 1; trivial unknot rank 1 at (0,+-1,0), E=F=H=0; "
             "Cone(H) Euler characteristic zero on " + std::to_string(corpus().size()) + " diagrams";
  return o;
}

// 9. Path counts against count-matrix products, homology against the dense
// oracle.
Outcome oracle_equivalence() {
  Outcome o;
  std::size_t diagrams = 0, paths = 0;
  for (const auto& item : corpus()) {
    if (item.diagram.crossing_count() > 5) continue;
    ++diagrams;
    auto Q = std::make_shared<const ResolutionCube>(item.diagram);
    if (homology(build_ckh(Q)) != oracle::homology(item.diagram, std::nullopt)) o.fail(item.name + " homology");
    for (Sl2Op J : kOps) {
      if (homology(build_cone(Q, J)) != oracle::homology(item.diagram, J)) o.fail(item.name + " cone homology");
      const FlowCube F(Q, J);
      for (std::uint32_t u = 0; u < F.vertex_count(); ++u) {
        std::vector<int> perm;
        for (int c = 0; c < F.dimension(); ++c)
          if (!((u >> c) & 1u)) perm.push_back(c);
        if (perm.empty()) continue;
        do {
          ++paths;
          const auto counts = oracle::path_counts(item.diagram, J, u, perm);
          for (std::uint32_t x = 0; x < (1u << F.resolution(u).circle_count()); ++x) {
            const auto got = path_points(F, u, perm, x);
            for (std::size_t y = 0; y < counts.size(); ++y) {
              const auto it = got.find(static_cast<std::uint32_t>(y));
              const long long n = it == got.end() ? 0 : static_cast<long long>(it->second.size());
              if (n != counts[y][x])
                o.fail(item.name + " " + to_string(J) + " path from " + F.vertex_str(u) + ": " + std::to_string(n) +
                       " points, product gives " + std::to_string(counts[y][x]));
            }
          }
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
    }
  }
  o.detail = std::to_string(diagrams) + " diagrams with n <= 5, " + std::to_string(paths) + " maximal paths";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "formula tables", 1, formula_tables},
      {2, "worked example", 1, worked_example},
      {3, "algebraic suite", 120, algebraic_suite},
      {4, "thinness", 300, thinness},
      {5, "squares and closure", 300, squares_and_closure},
      {6, "Reidemeister invariance", 60, invariance},
      {7, "long exact sequence", 60, les},
      {8, "known values", 1e9, known_values},
      {9, "oracle equivalence", 1e9, oracle_equivalence},
  };
  std::cout << "corpus: " << corpus().size() << " diagrams (named + 50 random, n <= 8, seed 2024); tolerance 0 (exact)"
            << std::endl;
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (t > c.budget) o.fail("over budget");
    all &= o.pass;
    char timing[96];
    if (c.budget < 1e8) std::snprintf(timing, sizeof timing, "%.3f s, budget %.0f s", t, c.budget);
    else std::snprintf(timing, sizeof timing, "%.3f s, no budget", t);
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail << " ["
              << timing << "]";
    if (!o.pass) std::cout << " first failure: " << o.failure;
    std::cout << std::endl;
  }
  std::cout << (all ? "all criteria pass" : "some criteria fail") << std::endl;
  return all ? 0 : 1;
}
