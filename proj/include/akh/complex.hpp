#pragma once

// Cube complexes: the annular Khovanov complex CKh and the mapping cone of an
// sl2 operator, which lives on a cube with one extra coordinate (the last).

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "akh/cube.hpp"
#include "akh/sl2.hpp"

namespace akh {

/// Column-compressed integer matrix for one cube edge, indexed by basis
/// position (see basis_index).
struct SparseMap {
  int rows = 0, cols = 0;
  std::vector<int> col_start{0};
  std::vector<int> row;
  std::vector<std::int64_t> val;

  void push_column(const std::map<int, std::int64_t>& entries) {
    for (const auto& [r, v] : entries)
      if (v != 0) {
        row.push_back(r);
        val.push_back(v);
      }
    col_start.push_back(static_cast<int>(row.size()));
    ++cols;
  }
};

class CubeComplex {
 public:
  CubeComplex(std::shared_ptr<const ResolutionCube> cube, std::optional<Sl2Op> J)
      : cube_(std::move(cube)), n_(cube_->dimension()), j_(J), dim_(n_ + (J ? 1 : 0)) {
    const std::uint32_t count = vertex_count();
    edges_.resize(static_cast<std::size_t>(count) * dim_);
    signs_.assign(edges_.size(), 0);
    for (std::uint32_t u = 0; u < count; ++u) {
      for (int i = 0; i < dim_; ++i) {
        if ((u >> i) & 1u) continue;
        const std::size_t k = static_cast<std::size_t>(u) * dim_ + i;
        signs_[k] = __builtin_popcount(u & ((1u << i) - 1)) % 2 ? -1 : 1;
        edges_[k] = build_edge(u, i);
      }
    }
  }

  const ResolutionCube& cube() const noexcept { return *cube_; }
  std::shared_ptr<const ResolutionCube> cube_ptr() const noexcept { return cube_; }
  const AnnularDiagram& diagram() const noexcept { return cube_->diagram(); }
  int dimension() const noexcept { return dim_; }
  int crossings() const noexcept { return n_; }
  std::optional<Sl2Op> j_op() const noexcept { return j_; }
  /// Coordinate carrying J in a cone, -1 otherwise.
  int j_coord() const noexcept { return j_ ? n_ : -1; }
  std::uint32_t vertex_count() const noexcept { return 1u << dim_; }

  const Resolution& resolution(std::uint32_t u) const { return cube_->at(u & ((1u << n_) - 1)); }
  std::uint32_t basis_size(std::uint32_t u) const { return 1u << resolution(u).circle_count(); }

  TriDegree degree(std::uint32_t u, std::uint32_t labels) const {
    TriDegree d = gradings(diagram(), resolution(u), Generator{labels});
    if (j_ && ((u >> n_) & 1u)) {
      d.h += 1;
      d.q -= sl2_weight(*j_);
      d.a -= sl2_weight(*j_);
    }
    return d;
  }

  /// Unsigned edge matrix of u -> u + e_i.
  const SparseMap& edge(std::uint32_t u, int i) const { return edges_[static_cast<std::size_t>(u) * dim_ + i]; }
  int edge_sign(std::uint32_t u, int i) const { return signs_[static_cast<std::size_t>(u) * dim_ + i]; }

  /// Test hook: reverses the sign of one edge.
  void flip_edge_sign(std::uint32_t u, int i) { signs_[static_cast<std::size_t>(u) * dim_ + i] *= -1; }

 private:
  SparseMap build_edge(std::uint32_t u, int i) const {
    const Resolution& src = resolution(u);
    const Resolution& dst = resolution(u | (1u << i));
    SparseMap m;
    m.rows = 1 << dst.circle_count();
    const int cs = src.circle_count(), cd = dst.circle_count();
    for (std::uint32_t col = 0; col < (1u << cs); ++col) {
      const std::uint32_t x = basis_labels(col, cs);
      std::map<int, std::int64_t> entries;
      if (i < n_) {
        const SaddleImage img = cube_->apply(u & ((1u << n_) - 1), i, x);
        for (int k = 0; k < img.count; ++k) entries[static_cast<int>(basis_index(img.out[k], cd))] += 1;
      } else {
        for (const auto& t : j_terms(*j_, src, x)) entries[static_cast<int>(basis_index(t.labels, cd))] += t.coefficient;
      }
      m.push_column(entries);
    }
    return m;
  }

  std::shared_ptr<const ResolutionCube> cube_;
  int n_;
  std::optional<Sl2Op> j_;
  int dim_;
  std::vector<SparseMap> edges_;
  std::vector<int> signs_;
};

inline CubeComplex build_ckh(std::shared_ptr<const ResolutionCube> Q) { return CubeComplex(std::move(Q), std::nullopt); }
inline CubeComplex build_ckh(const AnnularDiagram& D) { return build_ckh(std::make_shared<const ResolutionCube>(D)); }

inline CubeComplex build_cone(std::shared_ptr<const ResolutionCube> Q, Sl2Op J) { return CubeComplex(std::move(Q), J); }
inline CubeComplex build_cone(const AnnularDiagram& D, Sl2Op J) {
  return build_cone(std::make_shared<const ResolutionCube>(D), J);
}

struct DSquaredReport {
  bool pass = true;
  std::size_t faces = 0;
  std::optional<std::string> counterexample;
};

/// Checks that every square face anticommutes, which is d^2 = 0 face by face.
inline DSquaredReport verify_d_squared(const CubeComplex& C) {
  DSquaredReport rep;
  const int N = C.dimension();
  for (std::uint32_t u = 0; u < C.vertex_count() && rep.pass; ++u) {
    for (int i = 0; i < N && rep.pass; ++i) {
      if ((u >> i) & 1u) continue;
      for (int j = i + 1; j < N && rep.pass; ++j) {
        if ((u >> j) & 1u) continue;
        ++rep.faces;
        const std::uint32_t ui = u | (1u << i), uj = u | (1u << j);
        const SparseMap& a1 = C.edge(u, i);
        const SparseMap& a2 = C.edge(ui, j);
        const SparseMap& b1 = C.edge(u, j);
        const SparseMap& b2 = C.edge(uj, i);
        const std::int64_t sa = C.edge_sign(u, i) * C.edge_sign(ui, j);
        const std::int64_t sb = C.edge_sign(u, j) * C.edge_sign(uj, i);
        for (int col = 0; col < a1.cols && rep.pass; ++col) {
          std::map<int, std::int64_t> acc;
          for (int k = a1.col_start[col]; k < a1.col_start[col + 1]; ++k)
            for (int l = a2.col_start[a1.row[k]]; l < a2.col_start[a1.row[k] + 1]; ++l)
              acc[a2.row[l]] += sa * a1.val[k] * a2.val[l];
          for (int k = b1.col_start[col]; k < b1.col_start[col + 1]; ++k)
            for (int l = b2.col_start[b1.row[k]]; l < b2.col_start[b1.row[k] + 1]; ++l)
              acc[b2.row[l]] += sb * b1.val[k] * b2.val[l];
          for (const auto& [r, v] : acc) {
            if (v == 0) continue;
            rep.pass = false;
            const Resolution& R = C.resolution(u);
            rep.counterexample = "face at " + Vertex(u, N).str() + " along " + std::to_string(i) + "," +
                                 std::to_string(j) + ": generator (" +
                                 to_string(R, Generator{basis_labels(col, R.circle_count())}) + ") has d^2 coefficient " +
                                 std::to_string(v);
            break;
          }
        }
      }
    }
  }
  return rep;
}

/// Signed generator count per (q, a).
inline std::map<std::pair<int, int>, long long> graded_euler(const CubeComplex& C) {
  std::map<std::pair<int, int>, long long> chi;
  for (std::uint32_t u = 0; u < C.vertex_count(); ++u) {
    const int c = C.resolution(u).circle_count();
    for (std::uint32_t x = 0; x < (1u << c); ++x) {
      const TriDegree d = C.degree(u, x);
      chi[{d.q, d.a}] += d.h % 2 == 0 ? 1 : -1;
    }
  }
  for (auto it = chi.begin(); it != chi.end();) it = it->second == 0 ? chi.erase(it) : std::next(it);
  return chi;
}

}  // namespace akh
