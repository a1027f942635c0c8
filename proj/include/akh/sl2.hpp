#pragma once

// The sl2 action on annular Khovanov generators.  The i-th essential circle
// (innermost is i = 1) carries the sign (-1)^(i+1).

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "akh/algebra.hpp"
#include "akh/cube.hpp"

namespace akh {

enum class Sl2Op { E, F, H };

inline const char* to_string(Sl2Op J) {
  switch (J) {
    case Sl2Op::E: return "E";
    case Sl2Op::F: return "F";
    case Sl2Op::H: return "H";
  }
  return "?";
}

inline Sl2Op parse_sl2_op(std::string_view s) {
  if (s == "E") return Sl2Op::E;
  if (s == "F") return Sl2Op::F;
  if (s == "H") return Sl2Op::H;
  throw std::invalid_argument("operator must be E, F or H");
}

/// (q, a) shift of J.
inline int sl2_weight(Sl2Op J) { return J == Sl2Op::E ? 2 : J == Sl2Op::F ? -2 : 0; }

/// One summand of J acting on a single essential circle.  For H the summand is
/// s_i x with coefficient +1 on v+ and -1 on v-.
struct JTerm {
  std::uint32_t labels;
  int coefficient;
  int nest;  // acted-on essential circle, 1-based
};

inline std::vector<JTerm> j_terms(Sl2Op J, const Resolution& R, std::uint32_t x) {
  std::vector<JTerm> out;
  for (int i = 1; i <= R.essential_count; ++i) {
    const int c = R.essential_circle(i);
    const bool minus = (x >> c) & 1u;
    const int sign = i % 2 == 1 ? 1 : -1;
    switch (J) {
      case Sl2Op::E:
        if (minus) out.push_back({x & ~(1u << c), sign, i});
        break;
      case Sl2Op::F:
        if (!minus) out.push_back({x | (1u << c), sign, i});
        break;
      case Sl2Op::H:
        out.push_back({x, minus ? -1 : 1, i});
        break;
    }
  }
  return out;
}

inline FormalSum apply_J(Sl2Op J, const Resolution& R, Generator x) {
  FormalSum out;
  for (const auto& t : j_terms(J, R, x.labels)) out.add(Generator{t.labels}, t.coefficient);
  return out;
}

/// Swaps v+ and v- on every essential circle.
inline Generator theta(const Resolution& R, Generator x) { return Generator{x.labels ^ R.essential_mask()}; }

inline FormalSum theta(const Resolution& R, const FormalSum& s) {
  FormalSum out;
  for (const auto& [g, c] : s) out.add(theta(R, g), c);
  return out;
}

inline FormalSum apply_J(Sl2Op J, const Resolution& R, const FormalSum& s) {
  FormalSum out;
  for (const auto& [g, c] : s) out.add(apply_J(J, R, g), c);
  return out;
}

inline FormalSum apply_saddle(const ResolutionCube& Q, std::uint32_t u, int i, const FormalSum& s) {
  FormalSum out;
  for (const auto& [g, c] : s) {
    const SaddleImage img = Q.apply(u, i, g.labels);
    for (int k = 0; k < img.count; ++k) out.add(Generator{img.out[k]}, c);
  }
  return out;
}

enum class Sl2Check { All, Relations, ChainMap, Theta, Weight };

inline Sl2Check parse_sl2_check(std::string_view s) {
  if (s == "all") return Sl2Check::All;
  if (s == "relations") return Sl2Check::Relations;
  if (s == "chainmap") return Sl2Check::ChainMap;
  if (s == "theta") return Sl2Check::Theta;
  if (s == "weight") return Sl2Check::Weight;
  throw std::invalid_argument("check must be all, relations, chainmap, theta or weight");
}

struct Sl2Report {
  bool pass = true;
  std::size_t checks = 0;
  std::optional<std::string> counterexample;
};

/// Chain-level checks of the sl2 action over every vertex and generator.
/// `J` selects the operator for the chain-map check; the other checks involve
/// all three operators.
inline Sl2Report verify_sl2(const ResolutionCube& Q, Sl2Op J, Sl2Check which = Sl2Check::All) {
  Sl2Report rep;
  const int n = Q.dimension();
  auto want = [&](Sl2Check c) { return which == Sl2Check::All || which == c; };
  auto fail = [&](const std::string& what, std::uint32_t u, std::uint32_t x) {
    if (rep.pass) {
      rep.pass = false;
      rep.counterexample = what + " at vertex " + Vertex(u, n).str() + ", generator (" +
                           to_string(Q.at(u), Generator{x}) + ")";
    }
  };
  for (std::uint32_t u = 0; u < Q.vertex_count() && rep.pass; ++u) {
    const Resolution& R = Q.at(u);
    for (std::uint32_t x = 0; x < (1u << R.circle_count()) && rep.pass; ++x) {
      const Generator g{x};
      FormalSum one;
      one.add(g, 1);
      const FormalSum e = apply_J(Sl2Op::E, R, g), f = apply_J(Sl2Op::F, R, g), h = apply_J(Sl2Op::H, R, g);
      if (want(Sl2Check::Relations)) {
        ++rep.checks;
        if (apply_J(Sl2Op::E, R, f) - apply_J(Sl2Op::F, R, e) != h) fail("EF - FE != H", u, x);
        FormalSum he = apply_J(Sl2Op::H, R, e) - apply_J(Sl2Op::E, R, h), two_e;
        two_e.add(e, 2);
        if (he != two_e) fail("HE - EH != 2E", u, x);
        FormalSum hf = apply_J(Sl2Op::H, R, f) - apply_J(Sl2Op::F, R, h), two_f;
        two_f.add(f, -2);
        if (hf != two_f) fail("HF - FH != -2F", u, x);
      }
      if (want(Sl2Check::Theta)) {
        ++rep.checks;
        if (theta(R, apply_J(Sl2Op::E, R, theta(R, g))) != f) fail("F != Theta E Theta", u, x);
        for (int i = 0; i < n && rep.pass; ++i) {
          if ((u >> i) & 1u) continue;
          const std::uint32_t v = u | (1u << i);
          if (apply_saddle(Q, u, i, theta(R, one)) != theta(Q.at(v), apply_saddle(Q, u, i, one)))
            fail("Theta does not commute with the saddle along coordinate " + std::to_string(i), u, x);
        }
      }
      if (want(Sl2Check::Weight)) {
        ++rep.checks;
        FormalSum ax;
        ax.add(g, annular_weight(R, x));
        if (h != ax) fail("H x != adeg(x) x", u, x);
        for (const auto& [y, c] : e)
          if (annular_weight(R, y.labels) != annular_weight(R, x) + 2) fail("E does not raise adeg by 2", u, x);
        for (const auto& [y, c] : f)
          if (annular_weight(R, y.labels) != annular_weight(R, x) - 2) fail("F does not lower adeg by 2", u, x);
      }
      if (want(Sl2Check::ChainMap)) {
        for (int i = 0; i < n && rep.pass; ++i) {
          if ((u >> i) & 1u) continue;
          ++rep.checks;
          const std::uint32_t v = u | (1u << i);
          if (apply_J(J, Q.at(v), apply_saddle(Q, u, i, one)) != apply_saddle(Q, u, i, apply_J(J, R, one)))
            fail(std::string(to_string(J)) + " does not commute with the saddle along coordinate " + std::to_string(i), u, x);
        }
      }
    }
  }
  return rep;
}

}  // namespace akh
