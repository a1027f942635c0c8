#pragma once

// Whether two consecutive surgeries of an arc diagram, optionally with J
// between them, kill every generator.

#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "akh/algebra.hpp"
#include "akh/diagram.hpp"
#include "akh/sl2.hpp"

namespace akh {

/// A Past arc is the edge arriving at A, a Future arc the edge leaving it;
/// two arcs of one type are performed in the given order.  J acts at the
/// vertex between the two edges.  The pair is zero when no sequence of
/// nonzero terms of the edge maps connects any pair of generators.
inline bool is_zero_pair(const ArcDiagram& A, int first, int second, std::optional<Sl2Op> J = std::nullopt) {
  const auto& arcs = A.arcs();
  if (first < 0 || second < 0 || first >= static_cast<int>(arcs.size()) || second >= static_cast<int>(arcs.size()))
    throw std::invalid_argument("no such arc");
  if (arcs[first].crossing == arcs[second].crossing) throw std::invalid_argument("the two arcs sit at the same site");
  const AnnularDiagram& D = A.diagram();
  std::vector<int> past, future;
  for (int a : {first, second}) (arcs[a].type == ArcType::Past ? past : future).push_back(arcs[a].crossing);
  Vertex v = A.vertex();
  for (int c : past) v = v.flipped(c);
  std::vector<int> steps = past;
  steps.insert(steps.end(), future.begin(), future.end());

  Resolution R = resolve(D, v);
  std::set<std::uint32_t> alive;
  for (std::uint32_t x = 0; x < (1u << R.circle_count()); ++x) alive.insert(x);
  for (int k = 0; k < 2; ++k) {
    const Vertex w = v.flipped(steps[k]);
    const Resolution S = resolve(D, w);
    const SaddleInfo info = saddle_info(D, R, S, steps[k]);
    std::set<std::uint32_t> next;
    for (std::uint32_t x : alive) {
      const SaddleImage img = apply_saddle(info, R, S, x);
      for (int i = 0; i < img.count; ++i) next.insert(img.out[i]);
    }
    alive = std::move(next);
    v = w;
    R = S;
    if (k == 0 && J) {
      std::set<std::uint32_t> acted;
      for (std::uint32_t x : alive)
        for (const auto& t : j_terms(*J, R, x)) acted.insert(t.labels);
      alive = std::move(acted);
    }
  }
  return alive.empty();
}

}  // namespace akh
