#pragma once

// Integral homology of cube complexes, one (q, a) stratum at a time, and the
// maps induced by the sl2 action.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "akh/complex.hpp"
#include "akh/snf.hpp"

namespace akh {

struct HomologyGroup {
  std::size_t rank = 0;
  std::vector<BigInt> torsion;  // invariant factors greater than 1

  bool is_zero() const noexcept { return rank == 0 && torsion.empty(); }
  friend bool operator==(const HomologyGroup&, const HomologyGroup&) = default;
};

/// Nonzero groups only, keyed by (h, q, a).
using HomologyTable = std::map<TriDegree, HomologyGroup>;

/// A complex flattened into tri-graded cells.  Every generator also has a
/// global id; ids of one degree are contiguous.
class GradedChains {
 public:
  struct Gen {
    std::uint32_t vertex;
    std::uint32_t labels;
  };

  explicit GradedChains(const CubeComplex& C) : C_(&C) {
    position_.resize(C.vertex_count());
    for (std::uint32_t u = 0; u < C.vertex_count(); ++u) {
      const std::uint32_t size = C.basis_size(u);
      const int circles = C.resolution(u).circle_count();
      position_[u].resize(size);
      for (std::uint32_t idx = 0; idx < size; ++idx) {
        const std::uint32_t x = basis_labels(idx, circles);
        auto& cell = cells_[C.degree(u, x)];
        position_[u][idx] = static_cast<int>(cell.size());
        cell.push_back({u, x});
      }
    }
    int next = 0;
    for (const auto& [d, gens] : cells_) {
      offset_[d] = next;
      for (std::size_t k = 0; k < gens.size(); ++k) degree_.push_back(d);
      next += static_cast<int>(gens.size());
    }
  }

  const CubeComplex& complex() const noexcept { return *C_; }
  const std::map<TriDegree, std::vector<Gen>>& cells() const noexcept { return cells_; }
  std::size_t generator_count() const noexcept { return degree_.size(); }

  const std::vector<Gen>& cell(const TriDegree& d) const {
    static const std::vector<Gen> none;
    auto it = cells_.find(d);
    return it == cells_.end() ? none : it->second;
  }

  int position(std::uint32_t u, std::uint32_t labels) const {
    return position_[u][basis_index(labels, C_->resolution(u).circle_count())];
  }

  int id(const TriDegree& d, int pos) const { return offset_.at(d) + pos; }
  int id(std::uint32_t u, std::uint32_t labels) const { return id(C_->degree(u, labels), position(u, labels)); }
  const TriDegree& degree_of(int id) const { return degree_[id]; }
  const Gen& gen(int id) const { return cells_.at(degree_[id])[id - offset_.at(degree_[id])]; }

  /// d of one generator as (target id, coefficient), sorted by id.
  std::vector<std::pair<int, BigInt>> boundary(int id) const {
    const auto [u, x] = gen(id);
    const std::uint32_t col = basis_index(x, C_->resolution(u).circle_count());
    std::map<int, std::int64_t> acc;
    for (int i = 0; i < C_->dimension(); ++i) {
      if ((u >> i) & 1u) continue;
      const std::uint32_t v = u | (1u << i);
      const SparseMap& e = C_->edge(u, i);
      const int cv = C_->resolution(v).circle_count();
      for (int k = e.col_start[col]; k < e.col_start[col + 1]; ++k) {
        const std::uint32_t y = basis_labels(e.row[k], cv);
        const TriDegree& to = degree_[id];
        if (C_->degree(v, y) != TriDegree{to.h + 1, to.q, to.a}) throw std::logic_error("differential is not homogeneous");
        acc[offset_.at(C_->degree(v, y)) + position_[v][e.row[k]]] += C_->edge_sign(u, i) * e.val[k];
      }
    }
    std::vector<std::pair<int, BigInt>> out;
    for (const auto& [r, v] : acc)
      if (v != 0) out.emplace_back(r, v);
    return out;
  }

 private:
  const CubeComplex* C_;
  std::map<TriDegree, std::vector<Gen>> cells_;
  std::map<TriDegree, int> offset_;
  std::vector<TriDegree> degree_;
  std::vector<std::vector<int>> position_;
};

/// Sparse vector over generator ids, sorted by id.
using SparseVector = std::vector<std::pair<int, BigInt>>;

namespace detail {

// y += q * x
inline SparseVector axpy(const SparseVector& y, const BigInt& q, const SparseVector& x) {
  SparseVector out;
  out.reserve(y.size() + x.size());
  std::size_t i = 0, j = 0;
  while (i < y.size() || j < x.size()) {
    if (j == x.size() || (i < y.size() && y[i].first < x[j].first)) {
      out.push_back(y[i++]);
    } else if (i == y.size() || x[j].first < y[i].first) {
      out.emplace_back(x[j].first, q * x[j].second);
      ++j;
    } else {
      BigInt v = y[i].second + q * x[j].second;
      if (v != 0) out.emplace_back(y[i].first, std::move(v));
      ++i, ++j;
    }
  }
  return out;
}

inline const BigInt* lookup(const SparseVector& v, int id) {
  auto it = std::lower_bound(v.begin(), v.end(), id, [](const auto& e, int k) { return e.first < k; });
  return it != v.end() && it->first == id ? &it->second : nullptr;
}

}  // namespace detail

/// The complex after cancelling unit entries of the differential one pair at
/// a time.  It is chain homotopy equivalent to the original; with
/// `track_maps` the inclusion and projection of the equivalence are kept so
/// that chains can be moved between the two.
class ReducedChains {
 public:
  ReducedChains(const GradedChains& G, bool track_maps) : G_(&G), track_(track_maps) {
    const int N = static_cast<int>(G.generator_count());
    cols_.resize(N);
    rows_.resize(N);
    alive_.assign(N, true);
    for (int x = 0; x < N; ++x) {
      cols_[x] = G.boundary(x);
      for (const auto& [y, v] : cols_[x]) rows_[y].insert(x);
    }
    if (track_) {
      lift_.resize(N);
      for (int x = 0; x < N; ++x) lift_[x] = {{x, BigInt(1)}};
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (int b = 0; b < N; ++b) {
        if (!alive_[b]) continue;
        int c = -1;
        for (const auto& [y, v] : cols_[b])
          if (is_unit(v) && (c < 0 || rows_[y].size() < rows_[c].size())) c = y;
        if (c < 0) continue;
        cancel(b, c);
        changed = true;
      }
    }
    for (int x = 0; x < N; ++x) {
      if (!alive_[x]) continue;
      auto& cell = cells_[G.degree_of(x)];
      index_[x] = static_cast<int>(cell.size());
      cell.push_back(x);
    }
    rows_.clear();
  }

  const GradedChains& chains() const noexcept { return *G_; }
  /// Surviving generator ids per degree.
  const std::map<TriDegree, std::vector<int>>& cells() const noexcept { return cells_; }
  std::size_t size(const TriDegree& d) const {
    auto it = cells_.find(d);
    return it == cells_.end() ? 0 : it->second.size();
  }

  /// Matrix of the reduced d from (h, q, a) to (h+1, q, a).
  IntMatrix differential(const TriDegree& from) const {
    const TriDegree to{from.h + 1, from.q, from.a};
    IntMatrix m(size(to), size(from));
    auto it = cells_.find(from);
    if (it == cells_.end()) return m;
    for (std::size_t j = 0; j < it->second.size(); ++j)
      for (const auto& [y, v] : cols_[it->second[j]]) m(index_.at(y), j) = v;
    return m;
  }

  /// Column `col` of `m`, a chain of the reduced complex in degree d, as a
  /// chain of the original complex.
  SparseVector lift(const TriDegree& d, const IntMatrix& m, std::size_t col) const {
    require_maps();
    SparseVector out;
    const auto& ids = cells_.at(d);
    for (std::size_t j = 0; j < ids.size(); ++j)
      if (m(j, col) != 0) out = detail::axpy(out, m(j, col), lift_[ids[j]]);
    return out;
  }

  /// Image of an original chain of degree d under the projection.
  std::vector<BigInt> project(const TriDegree& d, const SparseVector& chain) const {
    require_maps();
    std::unordered_map<int, BigInt> v;
    for (const auto& [y, c] : chain) v[y] += c;
    for (const auto& s : log_) {
      v.erase(s.b);
      auto it = v.find(s.c);
      if (it == v.end()) continue;
      const BigInt k = it->second * s.unit;
      v.erase(it);
      for (const auto& [y, g] : s.gamma) v[y] -= k * g;
    }
    std::vector<BigInt> out(size(d));
    for (const auto& [y, c] : v) {
      if (c == 0) continue;
      if (G_->degree_of(y) != d) throw std::logic_error("projected chain left its degree");
      out[index_.at(y)] = c;
    }
    return out;
  }

 private:
  struct Step {
    int b, c;
    BigInt unit;
    SparseVector gamma;  // d(b) without its c entry, at the time of cancelling
  };

  void require_maps() const {
    if (!track_) throw std::logic_error("reduction was built without chain maps");
  }

  // Cancels b -> c where d(b) has a unit coefficient u on c.
  void cancel(int b, int c) {
    const BigInt u = *detail::lookup(cols_[b], c);
    const std::vector<int> sources(rows_[c].begin(), rows_[c].end());
    for (int x : sources) {
      if (x == b) continue;
      const BigInt q = -(*detail::lookup(cols_[x], c)) * u;
      SparseVector next = detail::axpy(cols_[x], q, cols_[b]);
      for (const auto& [y, v] : cols_[b]) {
        const bool had = detail::lookup(cols_[x], y) != nullptr, has = detail::lookup(next, y) != nullptr;
        if (had && !has) rows_[y].erase(x);
        if (!had && has) rows_[y].insert(x);
      }
      cols_[x] = std::move(next);
      if (track_) lift_[x] = detail::axpy(lift_[x], q, lift_[b]);
    }
    if (track_) {
      Step s{b, c, u, {}};
      for (const auto& e : cols_[b])
        if (e.first != c) s.gamma.push_back(e);
      log_.push_back(std::move(s));
      lift_[b].clear();
      lift_[c].clear();
    }
    for (int z : {b, c}) {
      for (const auto& [y, v] : cols_[z]) rows_[y].erase(z);
      cols_[z].clear();
      for (int w : rows_[z]) {
        auto& col = cols_[w];
        col.erase(std::find_if(col.begin(), col.end(), [z](const auto& e) { return e.first == z; }));
      }
      rows_[z].clear();
      alive_[z] = false;
    }
  }

  const GradedChains* G_;
  bool track_;
  std::vector<SparseVector> cols_;
  std::vector<std::unordered_set<int>> rows_;
  std::vector<bool> alive_;
  std::vector<SparseVector> lift_;
  std::vector<Step> log_;
  std::map<TriDegree, std::vector<int>> cells_;
  std::unordered_map<int, int> index_;
};

inline HomologyTable homology(const ReducedChains& R) {
  HomologyTable out;
  std::map<TriDegree, SnfResult> snf;  // keyed by source degree
  auto d_from = [&](const TriDegree& d) -> const SnfResult& {
    auto it = snf.find(d);
    if (it == snf.end()) it = snf.emplace(d, smith_normal_form(R.differential(d))).first;
    return it->second;
  };
  for (const auto& [deg, gens] : R.cells()) {
    const SnfResult& out_of = d_from(deg);
    const SnfResult& into = d_from({deg.h - 1, deg.q, deg.a});
    HomologyGroup g;
    g.rank = gens.size() - out_of.rank - into.rank;
    for (const auto& v : into.divisors)
      if (v > 1) g.torsion.push_back(v);
    if (!g.is_zero()) out[deg] = std::move(g);
  }
  return out;
}

inline HomologyTable homology(const GradedChains& G) { return homology(ReducedChains(G, false)); }
inline HomologyTable homology(const CubeComplex& C) { return homology(GradedChains(C)); }

/// Explicit basis of one homology group, in the coordinates of a reduced
/// complex.  Columns [0, divisors.size()) of `generators` are the torsion
/// directions (a generator times its divisor is a boundary), the remaining
/// columns span the free part.
struct CellBasis {
  TriDegree degree;
  std::vector<BigInt> divisors;
  IntMatrix generators;   // chains x k
  IntMatrix coordinates;  // k x chains, valid on cycles
  std::size_t free_rank() const { return generators.cols() - divisors.size(); }
};

inline CellBasis homology_basis(const ReducedChains& R, const TriDegree& deg) {
  CellBasis b;
  b.degree = deg;
  const KernelBasis K = kernel_basis(R.differential(deg));
  const IntMatrix boundary = K.coordinates * R.differential({deg.h - 1, deg.q, deg.a});
  const SnfResult S = smith_normal_form(boundary, true);
  b.divisors = S.divisors;
  b.generators = K.basis * S.left_inverse;
  b.coordinates = S.left * K.coordinates;
  return b;
}

namespace detail {

// J applied to a chain of CKh given by generator ids.
inline SparseVector apply_J_to_chain(const GradedChains& G, Sl2Op J, const SparseVector& chain) {
  std::map<int, BigInt> acc;
  for (const auto& [id, c] : chain) {
    const auto [u, x] = G.gen(id);
    for (const auto& t : j_terms(J, G.complex().resolution(u), x)) acc[G.id(u, t.labels)] += c * t.coefficient;
  }
  SparseVector out;
  for (auto& [id, c] : acc)
    if (c != 0) out.emplace_back(id, std::move(c));
  return out;
}

inline std::vector<BigInt> apply(const IntMatrix& m, const std::vector<BigInt>& v) {
  std::vector<BigInt> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0 && v[j] != 0) out[i] += m(i, j) * v[j];
  return out;
}

}  // namespace detail

/// Matrices of J* on the free parts of H(CKh), keyed by source degree.  The
/// target degree is (h, q + w, a + w) with w the weight of J.
inline std::map<TriDegree, IntMatrix> induced_map(const ReducedChains& R, Sl2Op J) {
  const GradedChains& G = R.chains();
  if (G.complex().j_op()) throw std::invalid_argument("induced maps are defined on CKh, not on a cone");
  const int w = sl2_weight(J);
  std::map<TriDegree, CellBasis> bases;
  auto basis = [&](const TriDegree& d) -> const CellBasis& {
    auto it = bases.find(d);
    if (it == bases.end()) it = bases.emplace(d, homology_basis(R, d)).first;
    return it->second;
  };
  std::map<TriDegree, IntMatrix> out;
  for (const auto& [deg, gens] : R.cells()) {
    const TriDegree to{deg.h, deg.q + w, deg.a + w};
    const CellBasis& src = basis(deg);
    if (src.generators.cols() == 0) continue;
    const CellBasis& dst = basis(to);
    const std::size_t rs = src.divisors.size(), rt = dst.divisors.size();
    IntMatrix m(dst.free_rank(), src.free_rank());
    for (std::size_t k = 0; k < src.generators.cols(); ++k) {
      const SparseVector chain = detail::apply_J_to_chain(G, J, R.lift(deg, src.generators, k));
      std::vector<BigInt> image = R.project(to, chain);
      if (k < rs)
        for (auto& v : image) v *= src.divisors[k];
      const std::vector<BigInt> t = detail::apply(dst.coordinates, image);
      if (k < rs) {
        // image of a boundary must again be a boundary
        for (std::size_t i = 0; i < t.size(); ++i) {
          const bool ok = i < rt ? t[i] % dst.divisors[i] == 0 : t[i] == 0;
          if (!ok) throw std::logic_error("induced map is not well defined: a boundary maps outside the image");
        }
        continue;
      }
      for (std::size_t i = rt; i < t.size(); ++i) m(i - rt, k - rs) = t[i];
    }
    if (m.rows() > 0 && m.cols() > 0) out.emplace(deg, std::move(m));
  }
  return out;
}

inline std::map<TriDegree, IntMatrix> induced_map(const GradedChains& G, Sl2Op J) {
  return induced_map(ReducedChains(G, true), J);
}

inline std::map<TriDegree, IntMatrix> induced_map(const AnnularDiagram& D, Sl2Op J) {
  const CubeComplex C = build_ckh(D);
  return induced_map(GradedChains(C), J);
}

inline std::size_t rank_of(const IntMatrix& m) { return smith_normal_form(m).rank; }

struct LesReport {
  bool pass = true;
  std::size_t degrees = 0;
  std::optional<std::string> counterexample;
};

/// Rational check of the long exact sequence of the cone of J:
/// dim H^{h,q,a}(Cone) = dim coker J*^{h-1} + dim ker J*^{h}, where J* runs
/// from (q, a) to (q + w, a + w).
inline LesReport verify_les(const AnnularDiagram& D, Sl2Op J) {
  auto Q = std::make_shared<const ResolutionCube>(D);
  const CubeComplex ckh = build_ckh(Q);
  const CubeComplex cone = build_cone(Q, J);
  const GradedChains G(ckh);
  const ReducedChains R(G, true);
  const HomologyTable H = homology(R);
  const HomologyTable HC = homology(cone);
  const auto maps = induced_map(R, J);
  const int w = sl2_weight(J);
  auto dim = [](const HomologyTable& T, const TriDegree& d) -> long long {
    auto it = T.find(d);
    return it == T.end() ? 0 : static_cast<long long>(it->second.rank);
  };
  auto rank_at = [&](const TriDegree& d) -> long long {
    auto it = maps.find(d);
    return it == maps.end() ? 0 : static_cast<long long>(rank_of(it->second));
  };
  std::set<TriDegree> degrees;
  for (const auto& [d, g] : H) {
    degrees.insert(d);
    degrees.insert({d.h + 1, d.q - w, d.a - w});
  }
  for (const auto& [d, g] : HC) degrees.insert(d);
  LesReport rep;
  for (const TriDegree& d : degrees) {
    ++rep.degrees;
    const TriDegree prev{d.h - 1, d.q, d.a};
    const long long coker = dim(H, {d.h - 1, d.q + w, d.a + w}) - rank_at(prev);
    const long long ker = dim(H, d) - rank_at(d);
    const long long lhs = dim(HC, d);
    if (lhs != coker + ker) {
      rep.pass = false;
      rep.counterexample = "degree (" + std::to_string(d.h) + "," + std::to_string(d.q) + "," + std::to_string(d.a) +
                           "): cone rank " + std::to_string(lhs) + ", sequence predicts " + std::to_string(coker + ker);
      break;
    }
  }
  return rep;
}

}  // namespace akh
