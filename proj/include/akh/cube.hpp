#pragma once

// All resolutions of a diagram together with the saddle data of every edge.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "akh/algebra.hpp"
#include "akh/diagram.hpp"

namespace akh {

/// Hard limit on crossings for cube-wide computations.
inline constexpr int kMaxCrossings = 12;

class ResolutionCube {
 public:
  explicit ResolutionCube(AnnularDiagram D) : D_(std::move(D)), n_(D_.crossing_count()) {
    if (n_ > kMaxCrossings)
      throw std::invalid_argument("diagram has " + std::to_string(n_) + " crossings; the cube is limited to " +
                                  std::to_string(kMaxCrossings));
    const std::uint32_t count = 1u << n_;
    res_.reserve(count);
    for (std::uint32_t u = 0; u < count; ++u) {
      res_.push_back(resolve(D_, Vertex(u, n_)));
      if (res_.back().circle_count() > 24) throw std::invalid_argument("resolution has more than 24 circles");
    }
    saddles_.resize(static_cast<std::size_t>(count) * n_);
    for (std::uint32_t u = 0; u < count; ++u)
      for (int i = 0; i < n_; ++i)
        if (!((u >> i) & 1u)) saddles_[u * n_ + i] = saddle_info(D_, res_[u], res_[u | (1u << i)], i);
  }

  const AnnularDiagram& diagram() const noexcept { return D_; }
  int dimension() const noexcept { return n_; }
  std::uint32_t vertex_count() const noexcept { return 1u << n_; }
  const Resolution& at(std::uint32_t u) const { return res_[u]; }

  /// Saddle of the edge u -> u + e_i (bit i of u must be 0).
  const SaddleInfo& saddle(std::uint32_t u, int i) const { return saddles_[u * n_ + i]; }

  SaddleImage apply(std::uint32_t u, int i, std::uint32_t x) const {
    return apply_saddle(saddle(u, i), res_[u], res_[u | (1u << i)], x);
  }

 private:
  AnnularDiagram D_;
  int n_;
  std::vector<Resolution> res_;
  std::vector<SaddleInfo> saddles_;
};

}  // namespace akh
