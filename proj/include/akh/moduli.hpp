#pragma once

// Framed moduli data of the cube of Cone(J): edge and path moduli as framed
// points with positions in (0,1), one-dimensional square moduli as planar
// matchings of their boundary points, and the checks built on them.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "akh/cube.hpp"
#include "akh/parallel.hpp"
#include "akh/sl2.hpp"

namespace akh {

using Rational = boost::multiprecision::cpp_rational;

/// A boundary point that cannot be matched.
class ModuliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The (n+1)-cube of Cone(J).  Coordinates 0..n-1 are crossings; J is the
/// last coordinate.
class FlowCube {
 public:
  FlowCube(std::shared_ptr<const ResolutionCube> Q, Sl2Op J) : Q_(std::move(Q)), J_(J), n_(Q_->dimension()) {}
  FlowCube(const AnnularDiagram& D, Sl2Op J) : FlowCube(std::make_shared<const ResolutionCube>(D), J) {}

  const ResolutionCube& cube() const noexcept { return *Q_; }
  const AnnularDiagram& diagram() const noexcept { return Q_->diagram(); }
  Sl2Op op() const noexcept { return J_; }
  int dimension() const noexcept { return n_ + 1; }
  int j_coord() const noexcept { return n_; }
  std::uint32_t vertex_count() const noexcept { return 1u << (n_ + 1); }
  std::uint32_t base(std::uint32_t u) const noexcept { return u & ((1u << n_) - 1); }
  const Resolution& resolution(std::uint32_t u) const { return Q_->at(base(u)); }

  std::string vertex_str(std::uint32_t u) const { return Vertex(u, n_ + 1).str(); }
  std::string subcube_str(std::uint32_t u, std::uint32_t mask) const { return vertex_str(u) + ".." + vertex_str(u | mask); }
  std::string gen_str(std::uint32_t u, std::uint32_t x) const { return "(" + to_string(resolution(u), Generator{x}) + ")"; }
  std::string coord_str(int c) const { return c == n_ ? std::string(to_string(J_)) : std::to_string(c); }

 private:
  std::shared_ptr<const ResolutionCube> Q_;
  Sl2Op J_;
  int n_;
};

/// One term of an edge map.  On the J edge `j` is the acted-on essential
/// circle (1-based) and `sign` its coefficient; saddle terms have j = 0.
struct EdgeTerm {
  std::uint32_t to = 0;
  int j = 0;
  int sign = 1;
};

namespace detail {

template <class Fn>
void for_each_edge_term(const FlowCube& F, std::uint32_t u, int coord, std::uint32_t x, Fn&& fn) {
  if (coord == F.j_coord()) {
    const Resolution& R = F.resolution(u);
    for (int i = 1; i <= R.essential_count; ++i) {
      const std::uint32_t bit = 1u << R.essential_circle(i);
      const bool minus = x & bit;
      const int sign = i % 2 == 1 ? 1 : -1;
      switch (F.op()) {
        case Sl2Op::E:
          if (minus) fn(EdgeTerm{x & ~bit, i, sign});
          break;
        case Sl2Op::F:
          if (!minus) fn(EdgeTerm{x | bit, i, sign});
          break;
        case Sl2Op::H:
          fn(EdgeTerm{x, i, minus ? -1 : 1});
          break;
      }
    }
  } else {
    const SaddleImage img = F.cube().apply(F.base(u), coord, x);
    for (int k = 0; k < img.count; ++k) fn(EdgeTerm{img.out[k], 0, 1});
  }
}

}  // namespace detail

inline std::vector<EdgeTerm> edge_terms(const FlowCube& F, std::uint32_t u, int coord, std::uint32_t x) {
  if (coord < 0 || coord >= F.dimension() || ((u >> coord) & 1u)) throw std::invalid_argument("no edge along that coordinate");
  std::vector<EdgeTerm> out;
  detail::for_each_edge_term(F, u, coord, x, [&](const EdgeTerm& t) { out.push_back(t); });
  return out;
}

/// A point of an edge or path moduli space.  Without J on the path the
/// ambient space is a point: no position, framing +1.
struct FramedPoint {
  std::vector<std::uint32_t> chain;  // x, z_1, ..., y
  int j = 0;
  std::optional<Rational> position;
  int framing = 1;

  friend bool operator==(const FramedPoint&, const FramedPoint&) = default;
};

inline std::vector<FramedPoint> edge_moduli(const FlowCube& F, std::uint32_t u, int coord, std::uint32_t x, std::uint32_t y) {
  std::vector<FramedPoint> out;
  const int s = F.resolution(u).essential_count;
  for (const auto& t : edge_terms(F, u, coord, x)) {
    if (t.to != y) continue;
    FramedPoint p{{x, y}, t.j, std::nullopt, 1};
    if (t.j > 0) {
      p.position = Rational(t.j, s + 1);
      p.framing = t.sign;
    }
    out.push_back(std::move(p));
  }
  return out;
}

namespace detail {

inline void check_path(const FlowCube& F, std::uint32_t u, const std::vector<int>& coords) {
  std::uint32_t seen = 0;
  for (int c : coords) {
    if (c < 0 || c >= F.dimension()) throw std::invalid_argument("path coordinate out of range");
    if (((u | seen) >> c) & 1u) throw std::invalid_argument("path repeats a coordinate or leaves the cube");
    seen |= 1u << c;
  }
}

}  // namespace detail

/// Points of every path moduli space from x along `coords`, keyed by the
/// endpoint.  Points come in depth-first order of the edge terms.
inline std::map<std::uint32_t, std::vector<FramedPoint>> path_points(const FlowCube& F, std::uint32_t u,
                                                                      const std::vector<int>& coords, std::uint32_t x) {
  detail::check_path(F, u, coords);
  int s = 0;
  bool has_j = false;
  std::uint32_t w = u;
  for (int c : coords) {
    if (c == F.j_coord()) {
      has_j = true;
      s = F.resolution(w).essential_count;
    }
    w |= 1u << c;
  }
  std::map<std::uint32_t, std::vector<FramedPoint>> out;
  std::vector<std::uint32_t> chain{x};
  auto go = [&](auto&& self, std::size_t k, std::uint32_t at, int j, int framing) -> void {
    if (k == coords.size()) {
      FramedPoint p{chain, j, std::nullopt, framing};
      if (has_j) p.position = Rational(j, s + 1);
      out[chain.back()].push_back(std::move(p));
      return;
    }
    detail::for_each_edge_term(F, at, coords[k], chain.back(), [&](const EdgeTerm& t) {
      chain.push_back(t.to);
      self(self, k + 1, at | (1u << coords[k]), t.j ? t.j : j, t.j ? t.sign : framing);
      chain.pop_back();
    });
  };
  go(go, 0, u, 0, 1);
  return out;
}

struct PathModuli {
  std::uint32_t source = 0;
  std::vector<int> coords;
  std::uint32_t x = 0, y = 0;
  std::vector<FramedPoint> points;

  /// Index of J in `coords`, or -1.
  int j_step(const FlowCube& F) const {
    auto it = std::find(coords.begin(), coords.end(), F.j_coord());
    return it == coords.end() ? -1 : static_cast<int>(it - coords.begin());
  }
  /// The J-resolution vertex e0 (where J acts) and e1 = e0 + e_J.
  std::optional<std::pair<std::uint32_t, std::uint32_t>> j_edge(const FlowCube& F) const {
    const int k = j_step(F);
    if (k < 0) return std::nullopt;
    std::uint32_t e0 = source;
    for (int i = 0; i < k; ++i) e0 |= 1u << coords[i];
    return std::make_pair(e0, e0 | (1u << F.j_coord()));
  }
};

inline PathModuli path_moduli(const FlowCube& F, std::uint32_t u, const std::vector<int>& coords, std::uint32_t x, std::uint32_t y) {
  PathModuli P{u, coords, x, y, {}};
  auto all = path_points(F, u, coords, x);
  if (auto it = all.find(y); it != all.end()) P.points = std::move(it->second);
  return P;
}

/// A face of the permutohedron of a subcube: a chain u < w_1 < ... < v.
struct CubeFaceChain {
  std::vector<std::uint32_t> vertices;

  bool valid() const {
    for (std::size_t i = 1; i < vertices.size(); ++i) {
      const std::uint32_t a = vertices[i - 1], b = vertices[i];
      if (a == b || (a & ~b) != 0) return false;
    }
    return !vertices.empty();
  }
  /// Codimension of the face: number of interior vertices.
  int codimension() const { return vertices.size() < 2 ? 0 : static_cast<int>(vertices.size()) - 2; }
};

enum class ChordKind { ThroughStrand, Turnback };

inline const char* to_string(ChordKind k) { return k == ChordKind::ThroughStrand ? "through" : "turnback"; }

/// A chord between boundary points (side, index) of a square moduli space.
struct Chord {
  ChordKind kind = ChordKind::ThroughStrand;
  std::array<int, 2> side{};
  std::array<int, 2> index{};
};

/// The two matchings of a ladybug face.  Right is the one used throughout.
enum class Ladybug { Right, Left };

/// Side k of a square runs along coords[k] first; coords are ascending, so
/// on a J face side 0 takes the saddle first.
struct IntervalMatching {
  std::uint32_t u = 0;
  std::array<int, 2> coords{};
  std::uint32_t x = 0, y = 0;
  std::array<std::vector<FramedPoint>, 2> sides;
  std::vector<Chord> chords;
  bool ladybug = false;
};

namespace detail {

// What the matching of a square needs from a boundary point: the generator
// at the middle vertex and, on a J face, the acted-on circle.
struct SquarePoint {
  std::uint32_t mid = 0;
  int j = 0;
};

using SquareSides = std::array<std::vector<SquarePoint>, 2>;

inline SquareSides square_points(const std::array<std::vector<FramedPoint>, 2>& sides) {
  SquareSides out;
  for (int k = 0; k < 2; ++k)
    for (const auto& p : sides[k]) out[k].push_back({p.chain.at(1), p.j});
  return out;
}

// The circles of the two intermediate resolutions holding the first right
// node of the arc at coords[which].  This is the whole ladybug convention.
inline std::array<int, 2> ladybug_circles(const FlowCube& F, std::uint32_t u, std::array<int, 2> c, int which) {
  const auto nodes = arc_right_nodes(F.diagram(), c[which], false);
  const Resolution& R1 = F.resolution(u | (1u << c[0]));
  const Resolution& R2 = F.resolution(u | (1u << c[1]));
  if (R1.node_circle[nodes[0]] == R1.node_circle[nodes[1]] || R2.node_circle[nodes[0]] == R2.node_circle[nodes[1]])
    throw ModuliError("face " + F.subcube_str(u, (1u << c[0]) | (1u << c[1])) + " has two-point boundaries without a ladybug");
  return {R1.node_circle[nodes[0]], R2.node_circle[nodes[0]]};
}

inline std::vector<Chord> ladybug_chords(const FlowCube& F, std::uint32_t u, std::array<int, 2> c, const SquareSides& sides,
                                         Ladybug choice, int which = 0) {
  const auto k = ladybug_circles(F, u, c, which);
  std::vector<Chord> chords;
  std::array<bool, 2> used{false, false};
  for (int i = 0; i < 2; ++i) {
    const bool bit = (sides[0][i].mid >> k[0]) & 1u;
    int hit = -1, hits = 0;
    for (int m = 0; m < 2; ++m) {
      const bool other = (sides[1][m].mid >> k[1]) & 1u;
      if ((bit == other) == (choice == Ladybug::Right)) {
        hit = m;
        ++hits;
      }
    }
    if (hits != 1 || used[hit]) throw ModuliError("ladybug labels do not determine a bijection");
    used[hit] = true;
    chords.push_back({ChordKind::ThroughStrand, {0, 1}, {i, hit}});
  }
  return chords;
}

inline std::string face_str(const FlowCube& F, std::uint32_t u, std::array<int, 2> c, std::uint32_t x, std::uint32_t y) {
  const std::uint32_t v = u | (1u << c[0]) | (1u << c[1]);
  return "face " + F.subcube_str(u, v ^ u) + " x=" + F.gen_str(u, x) + " y=" + F.gen_str(v, y);
}

// Matching of the boundary of one square moduli space.  Sides hold the
// composites through u + e_{c[0]} and u + e_{c[1]}.
inline std::vector<Chord> match_square(const FlowCube& F, std::uint32_t u, std::array<int, 2> c, const SquareSides& sides,
                                       Ladybug choice, bool* ladybug = nullptr) {
  std::vector<Chord> chords;
  if (c[1] != F.j_coord()) {
    const std::size_t N = sides[0].size();
    if (sides[1].size() != N) throw ModuliError("the two compositions have different sizes");
    if (N > 2) throw ModuliError("square face with more than two points per side");
    if (N == 1) chords.push_back({ChordKind::ThroughStrand, {0, 1}, {0, 0}});
    if (N == 2) {
      chords = ladybug_chords(F, u, c, sides, choice);
      if (ladybug) *ladybug = true;
    }
    return chords;
  }
  // Side 0 applies the saddle, then J on the target; side 1 applies J on the
  // source first.  Points are keyed by the acted-on circle of the source,
  // with 0 for circles the saddle creates or destroys.
  const Resolution& src = F.resolution(u);
  const Resolution& dst = F.resolution(u | (1u << c[0]));
  const SaddleInfo& S = F.cube().saddle(F.base(u), c[0]);
  auto key = [&](int side, int j) {
    if (side == 0) {
      const int from = S.essential_source(src, dst, dst.essential_circle(j));
      return from < 0 ? 0 : src.circles[from].nest;
    }
    const int circle = src.essential_circle(j);
    if (S.carry[circle] >= 0) return j;
    // a touched essential circle continues iff the saddle leaves an essential circle behind
    for (int t : S.to)
      if (t >= 0 && S.essential_source(src, dst, t) == circle) return j;
    return 0;
  };
  std::array<std::vector<std::pair<int, int>>, 2> keyed;  // (key, index)
  std::array<std::vector<int>, 2> leftover;
  for (int side = 0; side < 2; ++side) {
    for (int i = 0; i < static_cast<int>(sides[side].size()); ++i) {
      const int k = key(side, sides[side][i].j);
      if (k == 0) leftover[side].push_back(i);
      else keyed[side].emplace_back(k, i);
    }
    std::sort(keyed[side].begin(), keyed[side].end());
    for (std::size_t i = 1; i < keyed[side].size(); ++i)
      if (keyed[side][i].first == keyed[side][i - 1].first) throw ModuliError("two boundary points act on the same circle");
  }
  if (keyed[0].size() != keyed[1].size()) throw ModuliError("an essential circle carries an unmatched boundary point");
  for (std::size_t i = 0; i < keyed[0].size(); ++i) {
    if (keyed[0][i].first != keyed[1][i].first) throw ModuliError("an essential circle carries an unmatched boundary point");
    chords.push_back({ChordKind::ThroughStrand, {0, 1}, {keyed[0][i].second, keyed[1][i].second}});
  }
  for (int side = 0; side < 2; ++side) {
    if (leftover[side].empty()) continue;
    if (leftover[side].size() != 2) throw ModuliError("a created or destroyed circle carries an unpaired point");
    chords.push_back({ChordKind::Turnback, {side, side}, {leftover[side][0], leftover[side][1]}});
  }
  return chords;
}

}  // namespace detail

/// Square moduli between x at u and y at u + e_{c0} + e_{c1}.
inline IntervalMatching square_moduli(const FlowCube& F, std::uint32_t u, int c0, int c1, std::uint32_t x, std::uint32_t y,
                                      Ladybug choice = Ladybug::Right) {
  if (c0 == c1) throw std::invalid_argument("square face needs two coordinates");
  IntervalMatching M;
  M.u = u;
  M.coords = {std::min(c0, c1), std::max(c0, c1)};
  M.x = x;
  M.y = y;
  for (int k = 0; k < 2; ++k) {
    auto pts = path_points(F, u, {M.coords[k], M.coords[1 - k]}, x);
    if (auto it = pts.find(y); it != pts.end()) M.sides[k] = std::move(it->second);
  }
  M.chords = detail::match_square(F, u, M.coords, detail::square_points(M.sides), choice, &M.ladybug);
  return M;
}

/// True when the arcs of the two crossings interleave on one circle at u.
inline bool is_ladybug_face(const FlowCube& F, std::uint32_t u, int c0, int c1) {
  if (c0 == F.j_coord() || c1 == F.j_coord()) return false;
  const ArcDiagram A = arc_diagram(F.diagram(), Vertex(F.base(u), F.j_coord()));
  return A.interleaved(A.arc_at(c0), A.arc_at(c1));
}

/// Chords drawn in the strip [0,1] x (0,1) with side k on {k} x (0,1) are
/// disjoint iff the matching is non-crossing around the boundary.
inline bool is_planar(const IntervalMatching& M) {
  std::vector<std::pair<int, int>> around;  // (side, index) in boundary order
  for (int side = 0; side < 2; ++side) {
    std::vector<int> idx(M.sides[side].size());
    std::iota(idx.begin(), idx.end(), 0);
    for (int i : idx)
      if (!M.sides[side][i].position) return true;  // no J: points of an interval, nothing to cross
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return *M.sides[side][a].position < *M.sides[side][b].position; });
    for (std::size_t k = 1; k < idx.size(); ++k)
      if (*M.sides[side][idx[k]].position == *M.sides[side][idx[k - 1]].position) return false;
    if (side == 1) std::reverse(idx.begin(), idx.end());
    for (int i : idx) around.emplace_back(side, i);
  }
  std::map<std::pair<int, int>, int> chord_of;
  for (std::size_t k = 0; k < M.chords.size(); ++k)
    for (int e = 0; e < 2; ++e) chord_of[{M.chords[k].side[e], M.chords[k].index[e]}] = static_cast<int>(k);
  std::vector<int> open;
  std::vector<char> opened(M.chords.size(), 0);
  for (const auto& pt : around) {
    const int k = chord_of.at(pt);
    if (!opened[k]) {
      opened[k] = 1;
      open.push_back(k);
    } else {
      if (open.empty() || open.back() != k) return false;
      open.pop_back();
    }
  }
  return true;
}

/// Empty when the matching is boundary-exact, framing-consistent, planar and
/// the signed counts of the two sides agree; otherwise the first violation.
inline std::optional<std::string> matching_violation(const IntervalMatching& M) {
  std::array<std::vector<int>, 2> uses{std::vector<int>(M.sides[0].size()), std::vector<int>(M.sides[1].size())};
  for (const auto& ch : M.chords) {
    const FramedPoint& p = M.sides[ch.side[0]].at(ch.index[0]);
    const FramedPoint& q = M.sides[ch.side[1]].at(ch.index[1]);
    ++uses[ch.side[0]][ch.index[0]];
    ++uses[ch.side[1]][ch.index[1]];
    if (ch.kind == ChordKind::ThroughStrand) {
      if (ch.side[0] == ch.side[1]) return "through strand with both ends on one side";
      if (p.framing != q.framing) return "through strand joins opposite framings";
    } else {
      if (ch.side[0] != ch.side[1]) return "turnback with ends on both sides";
      if (p.framing == q.framing) return "turnback joins equal framings";
    }
  }
  for (int side = 0; side < 2; ++side)
    for (int u : uses[side])
      if (u != 1) return "boundary point not matched exactly once";
  int sum[2] = {0, 0};
  for (int side = 0; side < 2; ++side)
    for (const auto& p : M.sides[side]) sum[side] += p.framing;
  if (sum[0] != sum[1]) return "signed counts of the two compositions differ";
  if (!is_planar(M)) return "matching is not planar";
  return std::nullopt;
}

struct SquareReport {
  bool pass = true;
  std::size_t faces = 0;
  std::size_t matchings = 0;  // (face, x, y) with a nonempty boundary
  std::size_t ladybugs = 0;
  std::size_t through_strands = 0;
  std::size_t turnbacks = 0;
  std::optional<std::string> counterexample;
};

inline SquareReport verify_squares(const FlowCube& F, Ladybug choice = Ladybug::Right, unsigned threads = 0) {
  const int dim = F.dimension();
  auto per_vertex = parallel_map<SquareReport>(
      F.vertex_count(),
      [&](std::size_t ui) {
        const auto u = static_cast<std::uint32_t>(ui);
        SquareReport r;
        for (int c0 = 0; c0 < dim && r.pass; ++c0) {
          if ((u >> c0) & 1u) continue;
          for (int c1 = c0 + 1; c1 < dim && r.pass; ++c1) {
            if ((u >> c1) & 1u) continue;
            ++r.faces;
            const std::array<int, 2> c{c0, c1};
            std::optional<bool> ladybug_face;
            for (std::uint32_t x = 0; x < (1u << F.resolution(u).circle_count()) && r.pass; ++x) {
              auto first = path_points(F, u, {c0, c1}, x), second = path_points(F, u, {c1, c0}, x);
              std::map<std::uint32_t, std::array<std::vector<FramedPoint>, 2>> by_y;
              for (auto& [y, pts] : first) by_y[y][0] = std::move(pts);
              for (auto& [y, pts] : second) by_y[y][1] = std::move(pts);
              for (auto& [y, sides] : by_y) {
                IntervalMatching M{u, c, x, y, std::move(sides), {}, false};
                std::optional<std::string> bad;
                try {
                  M.chords = detail::match_square(F, u, c, detail::square_points(M.sides), choice, &M.ladybug);
                  if (M.ladybug) {
                    if (!ladybug_face) ladybug_face = is_ladybug_face(F, u, c0, c1);
                    if (!*ladybug_face) bad = "two-point boundaries on a face without a ladybug";
                  }
                  if (!bad) bad = matching_violation(M);
                } catch (const ModuliError& e) {
                  bad = e.what();
                }
                if (bad) {
                  r.pass = false;
                  r.counterexample = detail::face_str(F, u, c, x, y) + ": " + *bad;
                  break;
                }
                ++r.matchings;
                r.ladybugs += M.ladybug;
                for (const auto& ch : M.chords) ++(ch.kind == ChordKind::ThroughStrand ? r.through_strands : r.turnbacks);
              }
            }
          }
        }
        return r;
      },
      threads);
  SquareReport rep;
  for (const auto& r : per_vertex) {
    rep.faces += r.faces;
    rep.matchings += r.matchings;
    rep.ladybugs += r.ladybugs;
    rep.through_strands += r.through_strands;
    rep.turnbacks += r.turnbacks;
    if (!r.pass && rep.pass) {
      rep.pass = false;
      rep.counterexample = r.counterexample;
    }
  }
  return rep;
}

/// The boundary of the two-dimensional moduli space of a 3-subcube for one
/// pair (x, y): the corner points on the six paths and the chords of the six
/// hexagon-edge pieces joining them.
struct HexagonBoundary {
  struct Link {
    ChordKind kind;
    std::array<int, 2> path;   // indices into `paths`
    std::array<int, 2> index;  // indices into `corners[path]`
  };

  std::uint32_t u = 0, x = 0, y = 0;
  std::array<int, 3> coords{};
  std::array<std::vector<int>, 6> paths;  // coordinate orders, lexicographic
  std::array<std::vector<FramedPoint>, 6> corners;
  std::vector<Link> links;

  std::size_t corner_count() const {
    std::size_t n = 0;
    for (const auto& c : corners) n += c.size();
    return n;
  }

  /// Number of link ends at every corner.
  std::map<std::pair<int, int>, int> degrees() const {
    std::map<std::pair<int, int>, int> deg;
    for (int p = 0; p < 6; ++p)
      for (int i = 0; i < static_cast<int>(corners[p].size()); ++i) deg[{p, i}] = 0;
    for (const auto& l : links)
      for (int e = 0; e < 2; ++e) ++deg[{l.path[e], l.index[e]}];
    return deg;
  }

  /// Corners of each connected component.
  std::vector<std::vector<std::pair<int, int>>> components() const {
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> adj;
    for (const auto& l : links) {
      adj[{l.path[0], l.index[0]}].push_back({l.path[1], l.index[1]});
      adj[{l.path[1], l.index[1]}].push_back({l.path[0], l.index[0]});
    }
    std::vector<std::vector<std::pair<int, int>>> out;
    std::map<std::pair<int, int>, bool> seen;
    for (int p = 0; p < 6; ++p)
      for (int i = 0; i < static_cast<int>(corners[p].size()); ++i) {
        if (seen[{p, i}]) continue;
        std::vector<std::pair<int, int>> comp, stack{{p, i}};
        seen[{p, i}] = true;
        while (!stack.empty()) {
          auto at = stack.back();
          stack.pop_back();
          comp.push_back(at);
          for (const auto& nb : adj[at])
            if (!seen[nb]) {
              seen[nb] = true;
              stack.push_back(nb);
            }
        }
        out.push_back(std::move(comp));
      }
    return out;
  }
};

namespace detail {

// A corner point x -> z1 -> z2 -> y of a 3-subcube.
struct Corner {
  std::uint32_t y, z1, z2;
  int j, framing;
  bool operator<(const Corner& o) const { return std::tie(y, z1, z2, j) < std::tie(o.y, o.z1, o.z2, o.j); }
};

// The six coordinate orders of a 3-subcube and, for each pair of orders
// differing by one adjacent swap, the swapped step.
struct HexagonShape {
  std::array<std::array<int, 3>, 6> perms;
  struct Side {
    int a, b, pos;
  };
  std::vector<Side> sides;

  explicit HexagonShape(std::array<int, 3> c) {
    std::sort(c.begin(), c.end());
    for (int k = 0; k < 6; ++k, std::next_permutation(c.begin(), c.end())) perms[k] = c;
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b)
        for (int pos = 0; pos < 2; ++pos) {
          const auto &pa = perms[a], &pb = perms[b];
          if (pa[pos] == pb[pos + 1] && pa[pos + 1] == pb[pos] && pa[2 - 2 * pos] == pb[2 - 2 * pos]) sides.push_back({a, b, pos});
        }
  }
};

inline void corners_along(const FlowCube& F, std::uint32_t u, const std::array<int, 3>& p, std::uint32_t x, std::vector<Corner>& out) {
  out.clear();
  const std::uint32_t w1 = u | (1u << p[0]), w2 = w1 | (1u << p[1]);
  for_each_edge_term(F, u, p[0], x, [&](const EdgeTerm& a) {
    for_each_edge_term(F, w1, p[1], a.to, [&](const EdgeTerm& b) {
      for_each_edge_term(F, w2, p[2], b.to, [&](const EdgeTerm& c) {
        const EdgeTerm& jt = a.j ? a : b.j ? b : c;
        out.push_back({c.to, a.to, b.to, jt.j, jt.j ? jt.sign : 1});
      });
    });
  });
  std::sort(out.begin(), out.end());
}

// Links between the corners of one hexagon boundary.  corners[k] holds the
// points on order k ending at one y; emit(kind, path_a, index_a, path_b,
// index_b) receives every chord.
template <class Emit>
void link_hexagon(const FlowCube& F, std::uint32_t u, const HexagonShape& shape,
                  const std::array<const Corner*, 6>& corners, const std::array<int, 6>& counts, Ladybug choice, Emit&& emit) {
  const int J = F.j_coord();
  SquareSides sides;
  std::array<std::vector<int>, 2> index;
  std::vector<char> done;
  for (const auto& sd : shape.sides) {
    const auto& pa = shape.perms[sd.a];
    const std::array<int, 2> sq{std::min(pa[sd.pos], pa[sd.pos + 1]), std::max(pa[sd.pos], pa[sd.pos + 1])};
    const bool sq_j = sq[1] == J;
    const bool fixed_j = pa[2 - 2 * sd.pos] == J;
    const std::uint32_t w = sd.pos == 0 ? u : u | (1u << pa[0]);
    const std::array<int, 2> path{sd.a, sd.b};
    const std::array<int, 2> side_of{pa[sd.pos] == sq[0] ? 0 : 1, shape.perms[sd.b][sd.pos] == sq[0] ? 0 : 1};
    // group corners of both orders by the shared vertex and, when the shared
    // edge is J, the acted-on circle
    auto group_key = [&](const Corner& c) { return std::make_pair(sd.pos == 0 ? c.z2 : c.z1, fixed_j ? c.j : 0); };
    std::array<std::vector<char>, 2> used{std::vector<char>(counts[sd.a], 0), std::vector<char>(counts[sd.b], 0)};
    for (int e0 = 0; e0 < 2; ++e0)
      for (int i0 = 0; i0 < counts[path[e0]]; ++i0) {
        if (used[e0][i0]) continue;
        const auto key = group_key(corners[path[e0]][i0]);
        for (int s = 0; s < 2; ++s) {
          sides[s].clear();
          index[s].clear();
        }
        for (int e = 0; e < 2; ++e)
          for (int i = 0; i < counts[path[e]]; ++i) {
            const Corner& c = corners[path[e]][i];
            if (used[e][i] || group_key(c) != key) continue;
            used[e][i] = 1;
            sides[side_of[e]].push_back({sd.pos == 0 ? c.z1 : c.z2, sq_j ? c.j : 0});
            index[side_of[e]].push_back(i);
          }
        std::array<int, 2> path_of_side{};
        for (int e = 0; e < 2; ++e) path_of_side[side_of[e]] = path[e];
        for (const auto& ch : match_square(F, w, sq, sides, choice))
          emit(ch.kind, path_of_side[ch.side[0]], index[ch.side[0]][ch.index[0]], path_of_side[ch.side[1]],
               index[ch.side[1]][ch.index[1]]);
      }
  }
}

}  // namespace detail

/// Boundaries of the 3-subcube at u spanned by `coords`, one per y with a
/// nonempty corner set.
inline std::vector<HexagonBoundary> hexagon_boundaries(const FlowCube& F, std::uint32_t u, std::array<int, 3> coords,
                                                       std::uint32_t x, Ladybug choice = Ladybug::Right) {
  std::vector<int> path(coords.begin(), coords.end());
  detail::check_path(F, u, path);
  const detail::HexagonShape shape(coords);
  std::array<std::vector<detail::Corner>, 6> all;
  std::map<std::uint32_t, HexagonBoundary> out;
  const bool has_j = shape.perms[0][2] == F.j_coord();
  for (int k = 0; k < 6; ++k) {
    detail::corners_along(F, u, shape.perms[k], x, all[k]);
    for (const auto& c : all[k]) out[c.y];
  }
  std::vector<HexagonBoundary> res;
  for (auto& [y, H] : out) {
    H.u = u;
    H.x = x;
    H.y = y;
    std::copy(shape.perms[0].begin(), shape.perms[0].end(), H.coords.begin());
    std::array<const detail::Corner*, 6> ptr{};
    std::array<int, 6> counts{};
    for (int k = 0; k < 6; ++k) {
      H.paths[k] = std::vector<int>(shape.perms[k].begin(), shape.perms[k].end());
      auto lo = std::lower_bound(all[k].begin(), all[k].end(), detail::Corner{y, 0, 0, 0, 0});
      auto hi = std::lower_bound(all[k].begin(), all[k].end(), detail::Corner{y + 1, 0, 0, 0, 0});
      ptr[k] = all[k].data() + (lo - all[k].begin());
      counts[k] = static_cast<int>(hi - lo);
      std::uint32_t e0 = u;
      for (int c : shape.perms[k]) {
        if (c == F.j_coord()) break;
        e0 |= 1u << c;
      }
      const int s = F.resolution(e0).essential_count;
      for (auto it = lo; it != hi; ++it) {
        FramedPoint p{{x, it->z1, it->z2, y}, it->j, std::nullopt, it->framing};
        if (has_j) p.position = Rational(it->j, s + 1);
        H.corners[k].push_back(std::move(p));
      }
    }
    detail::link_hexagon(F, u, shape, ptr, counts, choice, [&](ChordKind kind, int pa, int ia, int pb, int ib) {
      H.links.push_back({kind, {pa, pb}, {ia, ib}});
    });
    res.push_back(std::move(H));
  }
  return res;
}

struct ClosureReport {
  bool pass = true;
  std::size_t subcubes = 0;
  std::size_t boundaries = 0;  // (subcube, x, y) with corners
  std::size_t corners = 0;
  std::size_t cycles = 0;
  std::size_t trivial_covers = 0;  // non-J boundaries whose cover is trivial
  std::optional<std::string> counterexample;
};

inline ClosureReport verify_closure_3d(const FlowCube& F, Ladybug choice = Ladybug::Right, unsigned threads = 0) {
  const int dim = F.dimension(), J = F.j_coord();
  auto per_vertex = parallel_map<ClosureReport>(
      F.vertex_count(),
      [&](std::size_t ui) {
        const auto u = static_cast<std::uint32_t>(ui);
        ClosureReport r;
        std::vector<int> free;
        for (int c = 0; c < dim; ++c)
          if (!((u >> c) & 1u)) free.push_back(c);
        const int m = static_cast<int>(free.size());
        std::array<std::vector<detail::Corner>, 6> all;
        std::vector<int> parent, degree;
        for (int i = 0; i < m && r.pass; ++i)
          for (int j = i + 1; j < m && r.pass; ++j)
            for (int k = j + 1; k < m && r.pass; ++k) {
              const detail::HexagonShape shape({free[i], free[j], free[k]});
              const std::uint32_t mask = (1u << free[i]) | (1u << free[j]) | (1u << free[k]);
              ++r.subcubes;
              const bool has_j = free[k] == J;
              for (std::uint32_t x = 0; x < (1u << F.resolution(u).circle_count()) && r.pass; ++x) {
                std::size_t total = 0;
                for (int p = 0; p < 6; ++p) {
                  detail::corners_along(F, u, shape.perms[p], x, all[p]);
                  total += all[p].size();
                }
                if (total == 0) continue;
                std::array<std::size_t, 6> at{};
                while (r.pass) {
                  // next y present on any order
                  std::optional<std::uint32_t> y;
                  for (int p = 0; p < 6; ++p)
                    if (at[p] < all[p].size() && (!y || all[p][at[p]].y < *y)) y = all[p][at[p]].y;
                  if (!y) break;
                  std::array<const detail::Corner*, 6> ptr{};
                  std::array<int, 6> counts{}, offset{};
                  int n_corners = 0;
                  for (int p = 0; p < 6; ++p) {
                    std::size_t e = at[p];
                    while (e < all[p].size() && all[p][e].y == *y) ++e;
                    ptr[p] = all[p].data() + at[p];
                    counts[p] = static_cast<int>(e - at[p]);
                    offset[p] = n_corners;
                    n_corners += counts[p];
                    at[p] = e;
                  }
                  ++r.boundaries;
                  r.corners += n_corners;
                  parent.resize(n_corners);
                  std::iota(parent.begin(), parent.end(), 0);
                  degree.assign(n_corners, 0);
                  auto find = [&](int a) {
                    while (parent[a] != a) a = parent[a] = parent[parent[a]];
                    return a;
                  };
                  auto fail = [&](const std::string& what) {
                    r.pass = false;
                    r.counterexample = "subcube " + F.subcube_str(u, mask) + " x=" + F.gen_str(u, x) +
                                       " y=" + F.gen_str(u | mask, *y) + ": " + what;
                  };
                  try {
                    detail::link_hexagon(F, u, shape, ptr, counts, choice, [&](ChordKind, int pa, int ia, int pb, int ib) {
                      const int a = offset[pa] + ia, b = offset[pb] + ib;
                      ++degree[a];
                      ++degree[b];
                      parent[find(a)] = find(b);
                    });
                  } catch (const ModuliError& e) {
                    fail(e.what());
                    break;
                  }
                  if (std::any_of(degree.begin(), degree.end(), [](int d) { return d != 2; })) {
                    fail("a corner point is not an endpoint of exactly two chords");
                    break;
                  }
                  std::map<int, std::array<int, 6>> hits;
                  for (int p = 0; p < 6; ++p)
                    for (int c = 0; c < counts[p]; ++c) ++hits[find(offset[p] + c)][p];
                  r.cycles += hits.size();
                  if (has_j) continue;
                  for (const auto& [root, h] : hits)
                    if (std::any_of(h.begin(), h.end(), [](int v) { return v != 1; })) {
                      fail("the cover of the hexagon boundary is not trivial");
                      break;
                    }
                  if (r.pass) ++r.trivial_covers;
                }
              }
            }
        return r;
      },
      threads);
  ClosureReport rep;
  for (const auto& r : per_vertex) {
    rep.subcubes += r.subcubes;
    rep.boundaries += r.boundaries;
    rep.corners += r.corners;
    rep.cycles += r.cycles;
    rep.trivial_covers += r.trivial_covers;
    if (!r.pass && rep.pass) {
      rep.pass = false;
      rep.counterexample = r.counterexample;
    }
  }
  return rep;
}

struct ThinReport {
  bool pass = true;
  std::size_t subcubes = 0;            // subcubes containing J
  std::size_t connected_subcubes = 0;
  std::size_t pairs = 0;               // connected (subcube, x, y) with a nonempty path space
  std::size_t thin_pairs = 0;          // every path thin and bijective (E/F) or surjective (H)
  std::size_t two_to_one_pairs = 0;    // H only
  std::size_t disconnected_thick_pairs = 0;
  std::size_t corollary_checks = 0;
  std::optional<std::string> counterexample;
  std::optional<std::string> two_to_one_witness;
  std::optional<std::string> disconnected_thick_witness;
};

namespace detail {

// True when the arcs of `mask` at u join all circles of the resolution.
inline bool arcs_connected(const FlowCube& F, std::uint32_t u, std::uint32_t mask) {
  const Resolution& R = F.resolution(u);
  std::vector<int> parent(R.circle_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int c = 0; c < F.j_coord(); ++c) {
    if (!((mask >> c) & 1u)) continue;
    const auto site = F.diagram().site_nodes(c);
    for (int k = 1; k < 4; ++k) parent[find(R.node_circle[site[k]])] = find(R.node_circle[site[0]]);
  }
  int roots = 0;
  for (int c = 0; c < R.circle_count(); ++c) roots += find(c) == c;
  return roots == 1;
}

using Mark = std::pair<Rational, int>;

inline std::vector<Mark> marks(const std::vector<FramedPoint>& pts) {
  std::vector<Mark> m;
  for (const auto& p : pts) m.emplace_back(*p.position, p.framing);
  std::sort(m.begin(), m.end());
  return m;
}

inline bool thin_onto_grid(const std::vector<FramedPoint>& pts, int s) {
  if (static_cast<int>(pts.size()) != s) return false;
  std::vector<Rational> pos;
  for (const auto& p : pts) pos.push_back(*p.position);
  std::sort(pos.begin(), pos.end());
  for (int i = 0; i < s; ++i)
    if (pos[i] != Rational(i + 1, s + 1)) return false;
  return true;
}

inline bool two_to_one(const std::vector<FramedPoint>& pts) {
  if (pts.size() != 4) return false;
  const auto m = marks(pts);
  const std::vector<Mark> want = {{Rational(1, 3), -1}, {Rational(1, 3), 1}, {Rational(2, 3), -1}, {Rational(2, 3), 1}};
  return m == want;
}

inline bool injective(const std::vector<FramedPoint>& pts) {
  std::vector<Rational> pos;
  for (const auto& p : pts) pos.push_back(*p.position);
  std::sort(pos.begin(), pos.end());
  return std::adjacent_find(pos.begin(), pos.end()) == pos.end();
}

}  // namespace detail

/// Thinness of path moduli over subcubes through J of dimension at most
/// `max_dim`.  Connected subcubes are checked against the thin and
/// two-to-one descriptions; disconnected ones only record thickness.  Paths
/// sharing their J edge must carry the same framed positions.
inline ThinReport check_thin_props(const FlowCube& F, int max_dim = 3, unsigned threads = 0) {
  const int n = F.j_coord();
  const std::uint32_t jbit = 1u << n;
  const bool is_h = F.op() == Sl2Op::H;
  auto per_vertex = parallel_map<ThinReport>(
      F.vertex_count() / 2,
      [&](std::size_t ui) {
        const auto u = static_cast<std::uint32_t>(ui);
        ThinReport r;
        std::vector<int> free;
        for (int c = 0; c < n; ++c)
          if (!((u >> c) & 1u)) free.push_back(c);
        const std::uint32_t subsets = 1u << free.size();
        for (std::uint32_t sel = 0; sel < subsets && r.pass; ++sel) {
          if (__builtin_popcount(sel) + 1 > max_dim) continue;
          std::vector<int> coords;
          std::uint32_t mask = jbit;
          for (std::size_t k = 0; k < free.size(); ++k)
            if ((sel >> k) & 1u) {
              coords.push_back(free[k]);
              mask |= 1u << free[k];
            }
          coords.push_back(n);
          ++r.subcubes;
          const bool connected = detail::arcs_connected(F, u, mask & ~jbit);
          r.connected_subcubes += connected;
          std::vector<std::vector<int>> perms;
          std::sort(coords.begin(), coords.end());
          do perms.push_back(coords);
          while (std::next_permutation(coords.begin(), coords.end()));
          for (std::uint32_t x = 0; x < (1u << F.resolution(u).circle_count()) && r.pass; ++x) {
            std::map<std::uint32_t, std::vector<std::pair<std::size_t, std::vector<FramedPoint>>>> by_y;
            for (std::size_t k = 0; k < perms.size(); ++k)
              for (auto& [y, pts] : path_points(F, u, perms[k], x)) by_y[y].emplace_back(k, std::move(pts));
            for (const auto& [y, paths] : by_y) {
              const std::string where =
                  "subcube " + F.subcube_str(u, mask) + " x=" + F.gen_str(u, x) + " y=" + F.gen_str(u | mask, y);
              // fixed J edge: compare paths with equal e0, treating absent paths as empty
              std::map<std::uint32_t, std::vector<std::optional<std::vector<detail::Mark>>>> by_e0;
              std::vector<const std::vector<FramedPoint>*> of_perm(perms.size(), nullptr);
              for (const auto& [k, pts] : paths) of_perm[k] = &pts;
              for (std::size_t k = 0; k < perms.size(); ++k) {
                std::uint32_t e0 = u;
                for (int c : perms[k]) {
                  if (c == n) break;
                  e0 |= 1u << c;
                }
                by_e0[e0].push_back(of_perm[k] ? detail::marks(*of_perm[k]) : std::vector<detail::Mark>{});
              }
              for (const auto& [e0, group] : by_e0) {
                ++r.corollary_checks;
                for (const auto& g : group)
                  if (g != group.front()) {
                    r.pass = false;
                    r.counterexample = where + ": paths through one J edge carry different framed points";
                  }
              }
              if (!r.pass) break;
              if (!connected) {
                bool thick = false;
                for (const auto& [k, pts] : paths) thick = thick || !detail::injective(pts);
                if (thick) {
                  ++r.disconnected_thick_pairs;
                  if (!r.disconnected_thick_witness) r.disconnected_thick_witness = where;
                }
                continue;
              }
              ++r.pairs;
              bool all_thin = true, all_two = true;
              for (const auto& [k, pts] : paths) {
                std::uint32_t e0 = u;
                for (int c : perms[k]) {
                  if (c == n) break;
                  e0 |= 1u << c;
                }
                const int s = F.resolution(e0).essential_count;
                all_thin = all_thin && detail::thin_onto_grid(pts, s);
                all_two = all_two && is_h && s == 2 && detail::two_to_one(pts);
              }
              if (all_thin) {
                ++r.thin_pairs;
              } else if (all_two) {
                ++r.two_to_one_pairs;
                if (!r.two_to_one_witness) r.two_to_one_witness = where;
              } else {
                r.pass = false;
                r.counterexample = where + (is_h ? ": path moduli are neither all thin and surjective nor all two-to-one"
                                                 : ": a path moduli space is not thin and bijective onto the grid");
                break;
              }
            }
          }
        }
        return r;
      },
      threads);
  ThinReport rep;
  for (const auto& r : per_vertex) {
    rep.subcubes += r.subcubes;
    rep.connected_subcubes += r.connected_subcubes;
    rep.pairs += r.pairs;
    rep.thin_pairs += r.thin_pairs;
    rep.two_to_one_pairs += r.two_to_one_pairs;
    rep.disconnected_thick_pairs += r.disconnected_thick_pairs;
    rep.corollary_checks += r.corollary_checks;
    if (!rep.two_to_one_witness) rep.two_to_one_witness = r.two_to_one_witness;
    if (!rep.disconnected_thick_witness) rep.disconnected_thick_witness = r.disconnected_thick_witness;
    if (!r.pass && rep.pass) {
      rep.pass = false;
      rep.counterexample = r.counterexample;
    }
  }
  return rep;
}

}  // namespace akh
