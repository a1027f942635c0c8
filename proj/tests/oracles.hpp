#pragma once

// Independent reference computations used only by the tests.  They are
// written directly from the definitions and share no code with the library
// beyond parsing, resolutions and the single-edge saddle map.

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <numeric>
#include <vector>

#include "akh/algebra.hpp"
#include "akh/homology.hpp"
#include "akh/sl2.hpp"

namespace oracle {

using akh::BigInt;
using Rational = boost::multiprecision::cpp_rational;
using Dense = std::vector<std::vector<BigInt>>;

/// Rank over Q by plain Gaussian elimination on rationals.
inline std::size_t rational_rank(const Dense& m) {
  if (m.empty()) return 0;
  std::vector<std::vector<Rational>> a(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& v : m[i]) a[i].emplace_back(v);
  const std::size_t R = a.size(), C = a[0].size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < C && rank < R; ++c) {
    std::size_t p = rank;
    while (p < R && a[p][c] == 0) ++p;
    if (p == R) continue;
    std::swap(a[p], a[rank]);
    for (std::size_t i = 0; i < R; ++i) {
      if (i == rank || a[i][c] == 0) continue;
      const Rational f = a[i][c] / a[rank][c];
      for (std::size_t j = c; j < C; ++j) a[i][j] -= f * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

/// Textbook Smith form by Bezout steps: the pivot is replaced by the gcd of
/// itself and each entry in its row and column in turn.
inline std::vector<BigInt> smith_divisors(Dense a) {
  const std::size_t R = a.size(), C = R ? a[0].size() : 0;
  std::vector<BigInt> out;
  auto ext_gcd = [](BigInt x, BigInt y, BigInt& s, BigInt& t) {
    BigInt s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (y != 0) {
      BigInt q = x / y;
      BigInt r = x - q * y;
      x = y, y = r;
      BigInt ns = s0 - q * s1, nt = t0 - q * t1;
      s0 = s1, s1 = ns, t0 = t1, t1 = nt;
    }
    s = s0, t = t0;
    return x;
  };
  for (std::size_t t = 0; t < std::min(R, C); ++t) {
    std::size_t pi = R, pj = C;
    for (std::size_t i = t; i < R && pi == R; ++i)
      for (std::size_t j = t; j < C; ++j)
        if (a[i][j] != 0) {
          pi = i, pj = j;
          break;
        }
    if (pi == R) break;
    std::swap(a[t], a[pi]);
    for (auto& row : a) std::swap(row[t], row[pj]);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = t + 1; i < R; ++i) {
        if (a[i][t] == 0) continue;
        if (a[i][t] % a[t][t] == 0) {
          const BigInt f = a[i][t] / a[t][t];
          for (std::size_t j = t; j < C; ++j) a[i][j] -= f * a[t][j];
          continue;
        }
        BigInt s, u;
        const BigInt g = ext_gcd(a[t][t], a[i][t], s, u);
        const BigInt p = a[t][t] / g, q = a[i][t] / g;
        for (std::size_t j = t; j < C; ++j) {
          const BigInt top = s * a[t][j] + u * a[i][j];
          const BigInt bot = -q * a[t][j] + p * a[i][j];
          a[t][j] = top, a[i][j] = bot;
        }
      }
      for (std::size_t j = t + 1; j < C; ++j) {
        if (a[t][j] == 0) continue;
        if (a[t][j] % a[t][t] == 0) {
          const BigInt f = a[t][j] / a[t][t];
          for (std::size_t i = t; i < R; ++i) a[i][j] -= f * a[i][t];
          continue;
        }
        BigInt s, u;
        const BigInt g = ext_gcd(a[t][t], a[t][j], s, u);
        const BigInt p = a[t][t] / g, q = a[t][j] / g;
        for (std::size_t i = t; i < R; ++i) {
          const BigInt left = s * a[i][t] + u * a[i][j];
          const BigInt right = -q * a[i][t] + p * a[i][j];
          a[i][t] = left, a[i][j] = right;
        }
        changed = true;
      }
    }
    out.push_back(a[t][t] < 0 ? BigInt(-a[t][t]) : a[t][t]);
  }
  // diagonal entries need not divide each other yet; normalise pairwise
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      const BigInt g = boost::multiprecision::gcd(out[i], out[j]);
      const BigInt l = out[i] / g * out[j];
      out[i] = g, out[j] = l;
    }
  return out;
}

/// Determinant by cofactor expansion.
inline BigInt det(const Dense& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  BigInt total = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (m[0][j] == 0) continue;
    Dense minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<BigInt> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(row);
    }
    total += (j % 2 ? -1 : 1) * m[0][j] * det(minor);
  }
  return total;
}

/// gcd of all k x k minors.
inline BigInt determinantal_divisor(const Dense& m, std::size_t k) {
  const std::size_t R = m.size(), C = m[0].size();
  BigInt g = 0;
  std::vector<std::size_t> rs(k), cs(k);
  std::function<void(std::size_t, std::size_t, std::size_t, std::size_t)> pick = [&](std::size_t ri, std::size_t r0,
                                                                                       std::size_t ci, std::size_t c0) {
    if (ri < k) {
      for (std::size_t r = r0; r < R; ++r) {
        rs[ri] = r;
        pick(ri + 1, r + 1, ci, c0);
      }
      return;
    }
    if (ci < k) {
      for (std::size_t c = c0; c < C; ++c) {
        cs[ci] = c;
        pick(ri, r0, ci + 1, c + 1);
      }
      return;
    }
    Dense sub(k, std::vector<BigInt>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub[i][j] = m[rs[i]][cs[j]];
    g = boost::multiprecision::gcd(g, det(sub));
  };
  pick(0, 0, 0, 0);
  return g;
}

/// Brute-force generator enumeration of CKh or a cone, straight from the
/// grading formulas.
inline std::map<std::pair<int, int>, long long> euler(const akh::AnnularDiagram& D, std::optional<akh::Sl2Op> J) {
  std::map<std::pair<int, int>, long long> chi;
  const int n = D.crossing_count();
  const int w = J ? akh::sl2_weight(*J) : 0;
  for (std::uint32_t u = 0; u < (1u << n); ++u) {
    const akh::Resolution R = akh::resolve(D, akh::Vertex(u, n));
    for (std::uint32_t x = 0; x < (1u << R.circle_count()); ++x) {
      int q = D.n_plus() - 2 * D.n_minus() + __builtin_popcount(u), a = 0;
      for (int c = 0; c < R.circle_count(); ++c) {
        const int s = ((x >> c) & 1u) ? -1 : 1;
        q += s;
        if (R.is_essential(c)) a += s;
      }
      const int h = __builtin_popcount(u) - D.n_minus();
      chi[{q, a}] += h % 2 == 0 ? 1 : -1;
      if (J) chi[{q - w, a - w}] += h % 2 == 0 ? -1 : 1;
    }
  }
  for (auto it = chi.begin(); it != chi.end();) it = it->second == 0 ? chi.erase(it) : std::next(it);
  return chi;
}

/// Homology of CKh or Cone(J) from differentials assembled generator by
/// generator with the FormalSum interface.
inline akh::HomologyTable homology(const akh::AnnularDiagram& D, std::optional<akh::Sl2Op> J) {
  const int n = D.crossing_count();
  const int N = n + (J ? 1 : 0);
  const int w = J ? akh::sl2_weight(*J) : 0;
  struct G {
    std::uint32_t u;
    std::uint32_t x;
  };
  std::map<akh::TriDegree, std::vector<G>> cells;
  std::vector<akh::Resolution> res;
  for (std::uint32_t u = 0; u < (1u << n); ++u) res.push_back(akh::resolve(D, akh::Vertex(u, n)));
  auto degree = [&](std::uint32_t u, std::uint32_t x) {
    akh::TriDegree d = akh::gradings(D, res[u & ((1u << n) - 1)], akh::Generator{x});
    if (J && ((u >> n) & 1u)) d = {d.h + 1, d.q - w, d.a - w};
    return d;
  };
  for (std::uint32_t u = 0; u < (1u << N); ++u)
    for (std::uint32_t x = 0; x < (1u << res[u & ((1u << n) - 1)].circle_count()); ++x) cells[degree(u, x)].push_back({u, x});
  auto differential = [&](const akh::TriDegree& from) {
    const auto& src = cells[from];
    const auto& dst = cells[{from.h + 1, from.q, from.a}];
    Dense m(dst.size(), std::vector<BigInt>(src.size()));
    for (std::size_t j = 0; j < src.size(); ++j) {
      const auto [u, x] = src[j];
      for (int i = 0; i < N; ++i) {
        if ((u >> i) & 1u) continue;
        const int sign = __builtin_popcount(u & ((1u << i) - 1)) % 2 ? -1 : 1;
        akh::FormalSum img;
        if (i < n) img = akh::apply_saddle(D, akh::Vertex(u & ((1u << n) - 1), n), i, akh::Generator{x});
        else img = akh::apply_J(*J, res[u & ((1u << n) - 1)], akh::Generator{x});
        const std::uint32_t v = u | (1u << i);
        for (const auto& [y, c] : img)
          for (std::size_t r = 0; r < dst.size(); ++r)
            if (dst[r].u == v && dst[r].x == y.labels) m[r][j] += sign * c;
      }
    }
    return m;
  };
  akh::HomologyTable out;
  for (const auto& [deg, gens] : std::map(cells)) {
    const Dense out_of = differential(deg);
    const Dense into = differential({deg.h - 1, deg.q, deg.a});
    akh::HomologyGroup g;
    g.rank = gens.size() - rational_rank(out_of) - rational_rank(into);
    if (!into.empty() && !into[0].empty())
      for (const auto& v : smith_divisors(into))
        if (v > 1) g.torsion.push_back(v);
    if (!g.is_zero()) out[deg] = g;
  }
  return out;
}

/// Number of composable edge terms from each x to each y along a path of
/// the cone cube, as a product of count matrices (rows y, columns x).  A
/// saddle or E/F entry counts |coefficient|; an H edge is s times the
/// identity.
inline std::vector<std::vector<long long>> path_counts(const akh::AnnularDiagram& D, akh::Sl2Op J, std::uint32_t u,
                                                      const std::vector<int>& coords) {
  const int n = D.crossing_count();
  auto res = [&](std::uint32_t w) { return akh::resolve(D, akh::Vertex(w & ((1u << n) - 1), n)); };
  akh::Resolution R = res(u);
  const std::size_t dim0 = std::size_t{1} << R.circle_count();
  std::vector<std::vector<long long>> acc(dim0, std::vector<long long>(dim0));
  for (std::size_t i = 0; i < dim0; ++i) acc[i][i] = 1;
  std::uint32_t w = u;
  for (int c : coords) {
    const std::uint32_t v = w | (1u << c);
    const akh::Resolution S = res(v);
    std::vector<std::vector<long long>> step(std::size_t{1} << S.circle_count(), std::vector<long long>(std::size_t{1} << R.circle_count()));
    for (std::uint32_t x = 0; x < (1u << R.circle_count()); ++x) {
      if (c == n) {
        if (J == akh::Sl2Op::H) {
          step[x][x] = R.essential_count;
        } else {
          for (const auto& [y, k] : akh::apply_J(J, R, akh::Generator{x})) step[y.labels][x] += static_cast<long long>(abs(k));
        }
      } else {
        for (const auto& [y, k] : akh::apply_saddle(D, akh::Vertex(w & ((1u << n) - 1), n), c, akh::Generator{x}))
          step[y.labels][x] += static_cast<long long>(abs(k));
      }
    }
    std::vector<std::vector<long long>> next(step.size(), std::vector<long long>(dim0));
    for (std::size_t i = 0; i < step.size(); ++i)
      for (std::size_t k = 0; k < step[i].size(); ++k)
        if (step[i][k])
          for (std::size_t j = 0; j < dim0; ++j) next[i][j] += step[i][k] * acc[k][j];
    acc = std::move(next);
    R = S;
    w = v;
  }
  return acc;
}

}  // namespace oracle
