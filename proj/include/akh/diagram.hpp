#pragma once

// Annular link diagrams given as Morse words on the annulus, their
// resolutions, and arc diagrams.
//
// Geometry: the annulus is cut along a radial segment and drawn as the strip
// [0, N+1] x (0, 1) with the inner boundary (puncture side) at the bottom.
// Strand positions are 1-based and counted upward from the puncture.  Event e
// sits between region e and region e+1; region N is glued back to region 0
// across the cut.  A node is a strand segment inside one region; it has a
// left and a right end, and a wiring pairs up ends.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace akh {

enum class EventKind { CrossingPositive, CrossingNegative, Cup, Cap };

struct MorseEvent {
  EventKind kind;
  int position;  // 1-based lower strand

  constexpr bool is_crossing() const noexcept {
    return kind == EventKind::CrossingPositive || kind == EventKind::CrossingNegative;
  }
  friend bool operator==(const MorseEvent&, const MorseEvent&) = default;
};

/// Raised by the diagram constructor; `event()` is -1 for whole-diagram errors.
class DiagramError : public std::runtime_error {
 public:
  DiagramError(int event, const std::string& what) : std::runtime_error(what), event_(event) {}
  int event() const noexcept { return event_; }

 private:
  int event_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A point of {0,1}^dim.  Coordinate i is bit i.
class Vertex {
 public:
  Vertex() = default;
  Vertex(std::uint32_t bits, int dim) : bits_(bits), dim_(dim) {
    if (dim < 0 || dim > 31) throw std::invalid_argument("vertex dimension out of range");
    if (dim < 32 && (bits >> dim) != 0) throw std::invalid_argument("vertex bits exceed dimension");
  }

  static Vertex parse(std::string_view s) {
    std::uint32_t bits = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1') bits |= 1u << i;
      else if (s[i] != '0') throw std::invalid_argument("vertex must be a string of 0 and 1");
    }
    return Vertex(bits, static_cast<int>(s.size()));
  }

  std::uint32_t bits() const noexcept { return bits_; }
  int dim() const noexcept { return dim_; }
  bool operator[](int i) const noexcept { return (bits_ >> i) & 1u; }
  int weight() const noexcept { return __builtin_popcount(bits_); }
  Vertex flipped(int i) const { return Vertex(bits_ ^ (1u << i), dim_); }

  std::string str() const {
    std::string s(dim_, '0');
    for (int i = 0; i < dim_; ++i)
      if ((*this)[i]) s[i] = '1';
    return s;
  }

  friend bool operator==(const Vertex&, const Vertex&) = default;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;

 private:
  std::uint32_t bits_ = 0;
  int dim_ = 0;
};

/// Closed interval lo <= hi of a cube.
struct Subcube {
  Vertex lo, hi;

  Subcube(Vertex l, Vertex h) : lo(l), hi(h) {
    if (l.dim() != h.dim() || (l.bits() & ~h.bits()) != 0)
      throw std::invalid_argument("subcube endpoints are not ordered");
  }
  static Subcube parse(std::string_view s) {
    auto dots = s.find("..");
    if (dots == std::string_view::npos) throw std::invalid_argument("subcube must read U..V");
    return Subcube(Vertex::parse(s.substr(0, dots)), Vertex::parse(s.substr(dots + 2)));
  }

  std::uint32_t free_mask() const noexcept { return lo.bits() ^ hi.bits(); }
  int dim() const noexcept { return __builtin_popcount(free_mask()); }
  bool contains(Vertex w) const noexcept {
    return w.dim() == lo.dim() && (lo.bits() & ~w.bits()) == 0 && (w.bits() & ~hi.bits()) == 0;
  }
  std::vector<int> free_coords() const {
    std::vector<int> out;
    for (int i = 0; i < lo.dim(); ++i)
      if ((free_mask() >> i) & 1u) out.push_back(i);
    return out;
  }
  std::string str() const { return lo.str() + ".." + hi.str(); }
};

struct Crossing {
  int event;       // index into the event list
  int position;    // 1-based lower strand
  EventKind kind;  // CrossingPositive or CrossingNegative
  int sign;        // +1 or -1 once orientations are taken into account
};

namespace detail {
constexpr int left_end(int node) { return 2 * node; }
constexpr int right_end(int node) { return 2 * node + 1; }
constexpr int end_node(int end) { return end / 2; }

inline void join(std::vector<int>& partner, int a, int b) {
  partner[a] = b;
  partner[b] = a;
}
}  // namespace detail

class AnnularDiagram {
 public:
  AnnularDiagram() : AnnularDiagram(0, {}) {}

  /// `orientation` lists +1 (rightward) or -1 per strand at the cut, bottom
  /// to top; empty means all rightward.
  AnnularDiagram(int strands, std::vector<MorseEvent> events, std::vector<int> orientation = {})
      : strands_(strands), events_(std::move(events)), orientation_(std::move(orientation)) {
    if (strands_ < 0) throw DiagramError(-1, "negative strand count");
    if (orientation_.empty()) orientation_.assign(strands_, +1);
    if (static_cast<int>(orientation_.size()) != strands_)
      throw DiagramError(-1, "orientation lists " + std::to_string(orientation_.size()) +
                                 " strands but the cut has " + std::to_string(strands_));
    for (int o : orientation_)
      if (o != 1 && o != -1) throw DiagramError(-1, "orientation entries must be + or -");
    layout();
    orient();
  }

  /// Cut strands grouped by link component: (0-based cut position, direction
  /// when the component is traversed one fixed way).  Components that miss the
  /// cut are omitted.
  static std::vector<std::vector<std::pair<int, int>>> cut_components(int strands, std::vector<MorseEvent> events) {
    AnnularDiagram D(strands, std::move(events), Unoriented{});
    std::vector<std::vector<std::pair<int, int>>> out;
    for (const auto& walk : D.link_walks()) {
      std::vector<std::pair<int, int>> cut;
      for (auto [m, d] : walk)
        if (D.node_region(m) == 0) cut.emplace_back(D.node_position(m), d);
      if (!cut.empty()) out.push_back(std::move(cut));
    }
    return out;
  }

  int strands_at_cut() const noexcept { return strands_; }
  const std::vector<MorseEvent>& events() const noexcept { return events_; }
  const std::vector<int>& orientation() const noexcept { return orientation_; }
  const std::vector<Crossing>& crossings() const noexcept { return crossings_; }
  int crossing_count() const noexcept { return static_cast<int>(crossings_.size()); }
  int n_plus() const noexcept { return n_plus_; }
  int n_minus() const noexcept { return n_minus_; }
  int link_components() const noexcept { return link_components_; }

  int region_count() const noexcept { return static_cast<int>(events_.size()) + 1; }
  int strands_in_region(int r) const { return counts_[r]; }
  int node(int region, int pos0) const { return offsets_[region] + pos0; }
  int node_count() const noexcept { return offsets_.back(); }
  int node_region(int n) const {
    return static_cast<int>(std::upper_bound(offsets_.begin(), offsets_.end(), n) - offsets_.begin()) - 1;
  }
  int node_position(int n) const { return n - offsets_[node_region(n)]; }

  /// True when the given smoothing of crossing c is the straight-through one.
  /// x+ uses it as its 0-smoothing, x- as its 1-smoothing.
  bool identity_smoothing(int c, bool one) const {
    return (crossings_[c].kind == EventKind::CrossingPositive) != one;
  }

  /// Wiring of the resolution with smoothing bits `u` (bit c for crossing c).
  std::vector<int> wiring(std::uint32_t u) const {
    std::vector<int> p = skeleton();
    for (int c = 0; c < crossing_count(); ++c) wire_site(p, c, identity_smoothing(c, (u >> c) & 1u));
    return p;
  }

  /// Rewires one crossing site inside an existing wiring.
  void wire_site(std::vector<int>& p, int c, bool identity) const {
    using namespace detail;
    const int e = crossings_[c].event;
    const int i = crossings_[c].position - 1;
    const int a = right_end(node(e, i)), b = right_end(node(e, i + 1));
    const int l = left_end(node(e + 1, i)), m = left_end(node(e + 1, i + 1));
    if (identity) {
      join(p, a, l);
      join(p, b, m);
    } else {
      join(p, a, b);
      join(p, l, m);
    }
  }

  /// The four nodes adjacent to crossing c.
  std::array<int, 4> site_nodes(int c) const {
    const int e = crossings_[c].event;
    const int i = crossings_[c].position - 1;
    return {node(e, i), node(e, i + 1), node(e + 1, i), node(e + 1, i + 1)};
  }

  std::string to_text() const {
    std::ostringstream out;
    out << "strands " << strands_ << "\n";
    if (strands_ > 0) {
      out << "orient";
      for (int o : orientation_) out << (o > 0 ? " +" : " -");
      out << "\n";
    }
    for (const auto& ev : events_) {
      switch (ev.kind) {
        case EventKind::CrossingPositive: out << "x+ "; break;
        case EventKind::CrossingNegative: out << "x- "; break;
        case EventKind::Cup: out << "cup "; break;
        case EventKind::Cap: out << "cap "; break;
      }
      out << ev.position << "\n";
    }
    return out.str();
  }

 private:
  void layout() {
    counts_.assign(1, strands_);
    for (std::size_t e = 0; e < events_.size(); ++e) {
      const auto& ev = events_[e];
      const int k = counts_.back();
      const int i = ev.position;
      const int ei = static_cast<int>(e);
      switch (ev.kind) {
        case EventKind::CrossingPositive:
        case EventKind::CrossingNegative:
          if (i < 1 || i + 1 > k) throw DiagramError(ei, "crossing position " + std::to_string(i) + " outside 1.." + std::to_string(k - 1));
          crossings_.push_back({ei, i, ev.kind, 0});
          counts_.push_back(k);
          break;
        case EventKind::Cup:
          if (i < 1 || i > k + 1) throw DiagramError(ei, "cup position " + std::to_string(i) + " outside 1.." + std::to_string(k + 1));
          counts_.push_back(k + 2);
          break;
        case EventKind::Cap:
          if (i < 1 || i + 1 > k) throw DiagramError(ei, "cap position " + std::to_string(i) + " outside 1.." + std::to_string(k - 1));
          counts_.push_back(k - 2);
          break;
      }
    }
    if (counts_.back() != strands_)
      throw DiagramError(-1, "unbalanced word: " + std::to_string(counts_.back()) + " strands at the end, " +
                                 std::to_string(strands_) + " at the start");
    offsets_.assign(1, 0);
    for (int k : counts_) offsets_.push_back(offsets_.back() + k);
  }

  // Wiring of everything except the crossing sites.
  std::vector<int> skeleton() const {
    using namespace detail;
    std::vector<int> p(2 * node_count(), -1);
    for (std::size_t e = 0; e < events_.size(); ++e) {
      const int r = static_cast<int>(e);
      const auto& ev = events_[e];
      const int i = ev.position - 1;
      const int k = counts_[r];
      switch (ev.kind) {
        case EventKind::CrossingPositive:
        case EventKind::CrossingNegative:
          for (int j = 0; j < k; ++j)
            if (j != i && j != i + 1) join(p, right_end(node(r, j)), left_end(node(r + 1, j)));
          break;
        case EventKind::Cup:
          for (int j = 0; j < k; ++j) join(p, right_end(node(r, j)), left_end(node(r + 1, j < i ? j : j + 2)));
          join(p, left_end(node(r + 1, i)), left_end(node(r + 1, i + 1)));
          break;
        case EventKind::Cap:
          for (int j = 0; j < k; ++j) {
            if (j == i || j == i + 1) continue;
            join(p, right_end(node(r, j)), left_end(node(r + 1, j < i ? j : j - 2)));
          }
          join(p, right_end(node(r, i)), right_end(node(r, i + 1)));
          break;
      }
    }
    const int last = static_cast<int>(events_.size());
    for (int j = 0; j < strands_; ++j) join(p, right_end(node(last, j)), left_end(node(0, j)));
    return p;
  }

  struct Unoriented {};
  AnnularDiagram(int strands, std::vector<MorseEvent> events, Unoriented)
      : strands_(strands), events_(std::move(events)) {
    layout();
  }

  // Link components as (node, traversal direction) walks, following strands
  // straight through crossings.
  std::vector<std::vector<std::pair<int, int>>> link_walks() const {
    using namespace detail;
    std::vector<int> p = skeleton();
    for (const auto& c : crossings_) {
      const int i = c.position - 1;
      join(p, right_end(node(c.event, i)), left_end(node(c.event + 1, i + 1)));
      join(p, right_end(node(c.event, i + 1)), left_end(node(c.event + 1, i)));
    }
    std::vector<std::vector<std::pair<int, int>>> walks;
    std::vector<char> seen(node_count(), 0);
    for (int start = 0; start < node_count(); ++start) {
      if (seen[start]) continue;
      std::vector<std::pair<int, int>> walk;
      int n = start, entry = left_end(start);
      do {
        seen[n] = 1;
        walk.emplace_back(n, entry == left_end(n) ? +1 : -1);
        const int next = p[entry ^ 1];
        n = end_node(next);
        entry = next;
      } while (!(n == start && entry == left_end(start)));
      walks.push_back(std::move(walk));
    }
    return walks;
  }

  // Fixes crossing signs from the cut orientation.
  void orient() {
    // direction[n] = +1 when the oriented component runs rightward through n
    std::vector<int> direction(node_count(), 0);
    const auto walks = link_walks();
    link_components_ = static_cast<int>(walks.size());
    for (const auto& walk : walks) {
      int flip = 0;
      for (auto [m, d] : walk) {
        if (node_region(m) != 0) continue;
        const int want = orientation_[node_position(m)];
        if (flip == 0) flip = want * d;
        else if (flip != want * d)
          throw DiagramError(-1, "orientation is inconsistent along the component through cut strand " +
                                     std::to_string(node_position(m) + 1));
      }
      if (flip == 0) flip = 1;
      for (auto [m, d] : walk) direction[m] = flip * d;
    }
    n_plus_ = n_minus_ = 0;
    for (auto& c : crossings_) {
      const int i = c.position - 1;
      const bool same = direction[node(c.event, i)] == direction[node(c.event, i + 1)];
      const int type = c.kind == EventKind::CrossingPositive ? 1 : -1;
      c.sign = same ? type : -type;
      (c.sign > 0 ? n_plus_ : n_minus_)++;
    }
  }

  int strands_ = 0;
  std::vector<MorseEvent> events_;
  std::vector<int> orientation_;
  std::vector<int> counts_;
  std::vector<int> offsets_;
  std::vector<Crossing> crossings_;
  int n_plus_ = 0, n_minus_ = 0;
  int link_components_ = 0;
};

/// Parses the line-oriented word format.  Statements may also be separated by
/// ';'.  Errors carry the 1-based line number.
inline AnnularDiagram parse_morse_word(std::string_view text) {
  struct Stmt {
    int line;
    std::vector<std::string> tok;
  };
  std::vector<Stmt> stmts;
  int line = 1;
  std::string cur;
  auto flush = [&] {
    std::istringstream in(cur);
    Stmt s{line, {}};
    for (std::string t; in >> t;) s.tok.push_back(t);
    if (!s.tok.empty()) stmts.push_back(std::move(s));
    cur.clear();
  };
  bool comment = false;
  for (char ch : text) {
    if (ch == '\n') {
      flush();
      comment = false;
      ++line;
    } else if (comment) {
    } else if (ch == '#') {
      comment = true;
    } else if (ch == ';') {
      flush();
    } else {
      cur.push_back(ch);
    }
  }
  flush();

  auto integer = [](const Stmt& s, const std::string& t) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || t.empty()) throw ParseError(s.line, "expected an integer, got '" + t + "'");
    return v;
  };

  if (stmts.empty()) throw ParseError(line, "empty word: expected 'strands <k>'");
  const Stmt& head = stmts.front();
  if (head.tok[0] != "strands" || head.tok.size() != 2) throw ParseError(head.line, "first statement must be 'strands <k>'");
  const int k = integer(head, head.tok[1]);
  if (k < 0) throw ParseError(head.line, "strand count must be non-negative");

  std::vector<int> orientation;
  int orient_line = head.line;
  std::vector<MorseEvent> events;
  std::vector<int> event_lines;
  int count = k;
  for (std::size_t s = 1; s < stmts.size(); ++s) {
    const Stmt& st = stmts[s];
    const std::string& w = st.tok[0];
    if (w == "orient") {
      if (!events.empty() || !orientation.empty()) throw ParseError(st.line, "'orient' must directly follow 'strands'");
      for (std::size_t t = 1; t < st.tok.size(); ++t) {
        for (char c : st.tok[t]) {
          if (c == '+') orientation.push_back(1);
          else if (c == '-') orientation.push_back(-1);
          else throw ParseError(st.line, std::string("orientation symbol '") + c + "' is not + or -");
        }
      }
      if (static_cast<int>(orientation.size()) != k)
        throw ParseError(st.line, "orient lists " + std::to_string(orientation.size()) + " strands, expected " + std::to_string(k));
      orient_line = st.line;
      continue;
    }
    EventKind kind;
    if (w == "x+") kind = EventKind::CrossingPositive;
    else if (w == "x-") kind = EventKind::CrossingNegative;
    else if (w == "cup") kind = EventKind::Cup;
    else if (w == "cap") kind = EventKind::Cap;
    else throw ParseError(st.line, "unknown statement '" + w + "'");
    if (st.tok.size() != 2) throw ParseError(st.line, "'" + w + "' takes exactly one position");
    const int i = integer(st, st.tok[1]);
    const int hi = kind == EventKind::Cup ? count + 1 : count - 1;
    if (i < 1 || i > hi)
      throw ParseError(st.line, "position " + std::to_string(i) + " is outside 1.." + std::to_string(hi) + " (" +
                                    std::to_string(count) + " strands here)");
    count += kind == EventKind::Cup ? 2 : kind == EventKind::Cap ? -2 : 0;
    events.push_back({kind, i});
    event_lines.push_back(st.line);
  }
  if (count != k)
    throw ParseError(stmts.back().line, "unbalanced word: ends with " + std::to_string(count) + " strands, starts with " + std::to_string(k));
  try {
    return AnnularDiagram(k, std::move(events), std::move(orientation));
  } catch (const DiagramError& e) {
    const int at = e.event() >= 0 ? event_lines[e.event()] : orient_line;
    throw ParseError(at, e.what());
  }
}

struct Circle {
  bool essential = false;
  int nest = 0;                 // 1-based nesting index for essential circles, 0 for trivial
  int cut_crossings = 0;
  std::vector<int> nodes;       // traversal order
  std::vector<int> entry_ends;  // end through which nodes[k] is entered; it leaves through entry ^ 1

  int min_node() const { return *std::min_element(nodes.begin(), nodes.end()); }
};

/// A complete resolution: trivial circles first (ordered by least node), then
/// essential circles from the innermost outward.
struct Resolution {
  Vertex vertex;
  std::vector<Circle> circles;
  std::vector<int> node_circle;
  int trivial_count = 0;
  int essential_count = 0;

  int circle_count() const noexcept { return static_cast<int>(circles.size()); }
  bool is_essential(int c) const { return circles[c].essential; }
  /// Circle id of the essential circle with the given 1-based nesting index.
  int essential_circle(int nest) const { return trivial_count + nest - 1; }
  std::uint32_t essential_mask() const {
    return static_cast<std::uint32_t>(((1ull << circle_count()) - 1) & ~((1ull << trivial_count) - 1));
  }
};

namespace detail {

inline std::vector<Circle> trace(const std::vector<int>& partner, int node_count) {
  std::vector<Circle> out;
  std::vector<char> seen(node_count, 0);
  for (int start = 0; start < node_count; ++start) {
    if (seen[start]) continue;
    Circle c;
    int n = start, entry = left_end(start);
    do {
      seen[n] = 1;
      c.nodes.push_back(n);
      c.entry_ends.push_back(entry);
      entry = partner[entry ^ 1];
      n = end_node(entry);
    } while (!(n == start && entry == left_end(start)));
    out.push_back(std::move(c));
  }
  return out;
}

inline Resolution build_resolution(const AnnularDiagram& D, Vertex u, const std::vector<int>& partner) {
  std::vector<Circle> raw = trace(partner, D.node_count());
  std::vector<std::vector<int>> cut_positions(raw.size());
  for (std::size_t c = 0; c < raw.size(); ++c) {
    for (int n : raw[c].nodes)
      if (D.node_region(n) == 0) cut_positions[c].push_back(D.node_position(n));
    raw[c].cut_crossings = static_cast<int>(cut_positions[c].size());
    raw[c].essential = raw[c].cut_crossings % 2 == 1;
  }
  std::vector<int> essential;
  for (std::size_t c = 0; c < raw.size(); ++c)
    if (raw[c].essential) essential.push_back(static_cast<int>(c));
  // A ray from the puncture to the lowest cut point of C crosses C' an odd
  // number of times exactly when C' separates C from the puncture.
  for (int c : essential) {
    const int low = *std::min_element(cut_positions[c].begin(), cut_positions[c].end());
    int inside = 0;
    for (int d : essential) {
      if (d == c) continue;
      const auto below = std::count_if(cut_positions[d].begin(), cut_positions[d].end(), [&](int p) { return p < low; });
      inside += below % 2;
    }
    raw[c].nest = inside + 1;
  }
  std::vector<int> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (raw[a].essential != raw[b].essential) return !raw[a].essential;
    if (raw[a].essential) return raw[a].nest < raw[b].nest;
    return raw[a].min_node() < raw[b].min_node();
  });
  Resolution R;
  R.vertex = u;
  R.node_circle.assign(D.node_count(), -1);
  for (int id : order) {
    const int idx = R.circle_count();
    for (int n : raw[id].nodes) R.node_circle[n] = idx;
    (raw[id].essential ? R.essential_count : R.trivial_count)++;
    R.circles.push_back(std::move(raw[id]));
  }
  for (int e = 0; e < R.essential_count; ++e)
    if (R.circles[R.trivial_count + e].nest != e + 1) throw std::logic_error("essential circles are not linearly nested");
  return R;
}

}  // namespace detail

inline Resolution resolve(const AnnularDiagram& D, Vertex u) {
  if (u.dim() != D.crossing_count()) throw std::invalid_argument("vertex dimension differs from the crossing count");
  return detail::build_resolution(D, u, D.wiring(u.bits()));
}

/// How circles of two adjacent resolutions correspond across one saddle.
struct SaddleInfo {
  int crossing = -1;
  bool merge = false;
  std::array<int, 2> from{-1, -1};  // touched circles of the source (one for a split)
  std::array<int, 2> to{-1, -1};    // touched circles of the target (one for a merge)
  std::vector<int> carry;           // source circle -> target circle, -1 when touched
  std::vector<int> carry_back;      // target circle -> source circle, -1 when touched

  /// Source circle that an essential target circle continues, or -1 when the
  /// saddle creates it.
  int essential_source(const Resolution& src, const Resolution& dst, int t) const {
    if (!dst.is_essential(t)) return -1;
    if (carry_back[t] >= 0) return carry_back[t];
    if (merge) {
      for (int f : from)
        if (src.is_essential(f)) return f;
      return -1;
    }
    return src.is_essential(from[0]) ? from[0] : -1;
  }
};

inline SaddleInfo saddle_info(const AnnularDiagram& D, const Resolution& src, const Resolution& dst, int crossing) {
  SaddleInfo s;
  s.crossing = crossing;
  const auto site = D.site_nodes(crossing);
  std::vector<int> ts, td;
  for (int n : site) {
    if (std::find(ts.begin(), ts.end(), src.node_circle[n]) == ts.end()) ts.push_back(src.node_circle[n]);
    if (std::find(td.begin(), td.end(), dst.node_circle[n]) == td.end()) td.push_back(dst.node_circle[n]);
  }
  std::sort(ts.begin(), ts.end());
  std::sort(td.begin(), td.end());
  if (ts.size() + td.size() != 3) throw std::logic_error("saddle does not merge or split");
  s.merge = ts.size() == 2;
  for (std::size_t k = 0; k < ts.size(); ++k) s.from[k] = ts[k];
  for (std::size_t k = 0; k < td.size(); ++k) s.to[k] = td[k];
  s.carry.assign(src.circle_count(), -1);
  s.carry_back.assign(dst.circle_count(), -1);
  for (int c = 0; c < src.circle_count(); ++c) {
    if (std::find(ts.begin(), ts.end(), c) != ts.end()) continue;
    const int t = dst.node_circle[src.circles[c].nodes.front()];
    s.carry[c] = t;
    s.carry_back[t] = c;
  }
  return s;
}

enum class ArcType { Past, Future };

/// Nodes to the right of the two junctions of the arc at crossing c when the
/// crossing carries the given smoothing.
inline std::array<int, 2> arc_right_nodes(const AnnularDiagram& D, int c, bool one) {
  const int e = D.crossings()[c].event;
  const int i = D.crossings()[c].position - 1;
  if (D.identity_smoothing(c, one)) return {D.node(e + 1, i), D.node(e, i + 1)};
  return {D.node(e, i), D.node(e + 1, i + 1)};
}

/// A surgery arc at one crossing site.  A Future arc sits on a 0-smoothed
/// crossing and records the edge leaving the vertex; a Past arc sits on a
/// 1-smoothed crossing and records the edge arriving at it.
struct Arc {
  int crossing = -1;
  ArcType type = ArcType::Future;
  bool straight = false;             // drawn across a straight-through smoothing
  std::array<int, 2> junctions{};    // one end of each attaching junction
  std::array<int, 2> right_nodes{};  // node to the right when standing on the junction facing along the arc
  std::array<int, 2> circles{};
};

class ArcDiagram {
 public:
  const AnnularDiagram& diagram() const noexcept { return D_; }
  Vertex vertex() const noexcept { return vertex_; }
  const Resolution& resolution() const noexcept { return res_; }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  const std::vector<int>& wiring() const noexcept { return partner_; }

  int arc_at(int crossing) const {
    for (std::size_t a = 0; a < arcs_.size(); ++a)
      if (arcs_[a].crossing == crossing) return static_cast<int>(a);
    return -1;
  }

  /// Index k such that the junction is crossed between nodes[k] and nodes[k+1].
  int junction_index(int circle, int end) const {
    const Circle& c = res_.circles[circle];
    const int m = static_cast<int>(c.nodes.size());
    for (int k = 0; k < m; ++k) {
      const int leave = c.entry_ends[k] ^ 1;
      if (leave == end || leave == partner_[end]) return k;
    }
    throw std::logic_error("junction not on circle");
  }

  /// True when the endpoints of arcs a and b alternate around one circle.
  bool interleaved(int a, int b) const {
    const Arc& A = arcs_[a];
    const Arc& B = arcs_[b];
    const int c = A.circles[0];
    if (A.circles[1] != c || B.circles[0] != c || B.circles[1] != c) return false;
    int a0 = junction_index(c, A.junctions[0]), a1 = junction_index(c, A.junctions[1]);
    if (a0 > a1) std::swap(a0, a1);
    auto inside = [&](int k) { return a0 < k && k < a1; };
    return inside(junction_index(c, B.junctions[0])) != inside(junction_index(c, B.junctions[1]));
  }

  static ArcDiagram build(const AnnularDiagram& D, Vertex u, std::vector<int> sites, std::vector<int> partner) {
    ArcDiagram A;
    A.D_ = D;
    A.vertex_ = u;
    A.partner_ = std::move(partner);
    A.res_ = detail::build_resolution(D, u, A.partner_);
    std::sort(sites.begin(), sites.end());
    for (int c : sites) A.arcs_.push_back(A.make_arc(c));
    return A;
  }

 private:
  Arc make_arc(int c) const {
    using namespace detail;
    Arc a;
    a.crossing = c;
    const bool one = vertex_[c];
    a.type = one ? ArcType::Past : ArcType::Future;
    a.straight = D_.identity_smoothing(c, one);
    const int e = D_.crossings()[c].event;
    const int i = D_.crossings()[c].position - 1;
    if (a.straight) {
      // vertical arc between strands i and i+1
      a.junctions = {right_end(D_.node(e, i)), right_end(D_.node(e, i + 1))};
    } else {
      // horizontal arc from the cap tip to the cup tip
      a.junctions = {right_end(D_.node(e, i)), left_end(D_.node(e + 1, i))};
    }
    a.right_nodes = arc_right_nodes(D_, c, one);
    for (int k = 0; k < 2; ++k) a.circles[k] = res_.node_circle[end_node(a.junctions[k])];
    return a;
  }

  AnnularDiagram D_;
  Vertex vertex_;
  std::vector<int> partner_;
  Resolution res_;
  std::vector<Arc> arcs_;
};

/// Arc diagram at u.  Without a subcube every crossing carries an arc;
/// otherwise only the subcube's free crossing coordinates do (a trailing
/// extra coordinate, such as a cone direction, is ignored).
inline ArcDiagram arc_diagram(const AnnularDiagram& D, Vertex u, std::optional<Subcube> sub = std::nullopt) {
  const int n = D.crossing_count();
  if (sub && !sub->contains(u)) throw std::invalid_argument("vertex lies outside the subcube");
  if (u.dim() != n && u.dim() != n + 1) throw std::invalid_argument("vertex dimension does not match the diagram");
  Vertex base(u.bits() & ((1u << n) - 1), n);
  std::vector<int> sites;
  for (int c = 0; c < n; ++c)
    if (!sub || ((sub->free_mask() >> c) & 1u)) sites.push_back(c);
  return ArcDiagram::build(D, base, std::move(sites), D.wiring(base.bits()));
}

/// Surgery along one arc; the arc is replaced by its dual, of the opposite type.
inline ArcDiagram surger(const ArcDiagram& A, int arc) {
  const Arc& a = A.arcs().at(arc);
  std::vector<int> partner = A.wiring();
  A.diagram().wire_site(partner, a.crossing, !a.straight);
  std::vector<int> sites;
  for (const auto& b : A.arcs()) sites.push_back(b.crossing);
  return ArcDiagram::build(A.diagram(), A.vertex().flipped(a.crossing), std::move(sites), std::move(partner));
}

/// Connected components of circles joined by arcs.  Components are keyed by
/// their least node, which is unchanged by surgery along internal arcs.
struct ComponentPartition {
  std::vector<int> component_of_circle;
  std::vector<int> keys;  // least node per component, ascending

  int count() const noexcept { return static_cast<int>(keys.size()); }
};

inline ComponentPartition components(const ArcDiagram& A) {
  const Resolution& R = A.resolution();
  std::vector<int> parent(R.circle_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& a : A.arcs()) parent[find(a.circles[0])] = find(a.circles[1]);
  std::vector<int> key(R.circle_count(), std::numeric_limits<int>::max());
  for (int c = 0; c < R.circle_count(); ++c) key[find(c)] = std::min(key[find(c)], R.circles[c].min_node());
  ComponentPartition P;
  for (int c = 0; c < R.circle_count(); ++c)
    if (find(c) == c) P.keys.push_back(key[c]);
  std::sort(P.keys.begin(), P.keys.end());
  P.component_of_circle.resize(R.circle_count());
  for (int c = 0; c < R.circle_count(); ++c)
    P.component_of_circle[c] = static_cast<int>(std::lower_bound(P.keys.begin(), P.keys.end(), key[find(c)]) - P.keys.begin());
  return P;
}

}  // namespace akh
