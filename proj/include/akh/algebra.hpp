#pragma once

// Generators of the annular Khovanov complex and the annular TQFT on saddles.
//
// A generator at a resolution labels every circle.  Bit c of the label mask is
// 0 for 1 (trivial) or v+ (essential) and 1 for X or v-.

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "akh/diagram.hpp"
#include "akh/integer.hpp"

namespace akh {

enum class Label { One, X, VPlus, VMinus };

struct Generator {
  std::uint32_t labels = 0;

  friend bool operator==(const Generator&, const Generator&) = default;
  friend auto operator<=>(const Generator&, const Generator&) = default;
};

inline Label label_of(const Resolution& R, Generator x, int c) {
  const bool minus = (x.labels >> c) & 1u;
  if (R.is_essential(c)) return minus ? Label::VMinus : Label::VPlus;
  return minus ? Label::X : Label::One;
}

inline std::string to_string(const Resolution& R, Generator x) {
  std::string s;
  for (int c = 0; c < R.circle_count(); ++c) {
    if (c) s += ',';
    switch (label_of(R, x, c)) {
      case Label::One: s += "1"; break;
      case Label::X: s += "X"; break;
      case Label::VPlus: s += "v+"; break;
      case Label::VMinus: s += "v-"; break;
    }
  }
  return s;
}

/// Reads comma-separated labels in circle order, e.g. "1,v-".
inline Generator parse_generator(const Resolution& R, std::string_view text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur.push_back(ch);
    }
  }
  if (!text.empty()) parts.push_back(cur);
  if (static_cast<int>(parts.size()) != R.circle_count())
    throw std::invalid_argument("generator '" + std::string(text) + "' has " + std::to_string(parts.size()) +
                                " labels, the resolution has " + std::to_string(R.circle_count()) + " circles");
  Generator x;
  for (int c = 0; c < R.circle_count(); ++c) {
    const std::string& p = parts[c];
    bool minus;
    if (R.is_essential(c)) {
      if (p == "v+") minus = false;
      else if (p == "v-") minus = true;
      else throw std::invalid_argument("circle " + std::to_string(c + 1) + " is essential: label must be v+ or v-");
    } else {
      if (p == "1") minus = false;
      else if (p == "X") minus = true;
      else throw std::invalid_argument("circle " + std::to_string(c + 1) + " is trivial: label must be 1 or X");
    }
    if (minus) x.labels |= 1u << c;
  }
  return x;
}

/// Position of x in the basis order: labels compared circle by circle, 1 < X.
inline std::uint32_t basis_index(std::uint32_t labels, int circles) {
  std::uint32_t r = 0;
  for (int c = 0; c < circles; ++c)
    if ((labels >> c) & 1u) r |= 1u << (circles - 1 - c);
  return r;
}
inline std::uint32_t basis_labels(std::uint32_t index, int circles) { return basis_index(index, circles); }

struct TriDegree {
  int h = 0, q = 0, a = 0;

  friend bool operator==(const TriDegree&, const TriDegree&) = default;
  friend auto operator<=>(const TriDegree&, const TriDegree&) = default;
};

inline int quantum_weight(const Resolution& R, std::uint32_t labels) {
  return R.circle_count() - 2 * __builtin_popcount(labels & ((1ull << R.circle_count()) - 1));
}

inline int annular_weight(const Resolution& R, std::uint32_t labels) {
  return R.essential_count - 2 * __builtin_popcount(labels & R.essential_mask());
}

/// (h, q, a) of x at vertex u, normalised by the diagram's crossing signs.
inline TriDegree gradings(const AnnularDiagram& D, const Resolution& R, Generator x) {
  const int u = R.vertex.weight();
  return {u - D.n_minus(), quantum_weight(R, x.labels) + u + D.n_plus() - 2 * D.n_minus(), annular_weight(R, x.labels)};
}

/// Linear combination of generators of one resolution with exact coefficients.
class FormalSum {
 public:
  void add(Generator g, const BigInt& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.try_emplace(g, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  void add(const FormalSum& other, const BigInt& scale = 1) {
    for (const auto& [g, c] : other.terms_) add(g, c * scale);
  }
  BigInt coefficient(Generator g) const {
    auto it = terms_.find(g);
    return it == terms_.end() ? BigInt(0) : it->second;
  }
  bool empty() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

  friend bool operator==(const FormalSum&, const FormalSum&) = default;
  friend FormalSum operator-(const FormalSum& a, const FormalSum& b) {
    FormalSum r = a;
    r.add(b, -1);
    return r;
  }

  std::string str(const Resolution& R) const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [g, c] : terms_) {
      if (!first) out << (c < 0 ? " - " : " + ");
      else if (c < 0) out << "-";
      const BigInt m = c < 0 ? BigInt(-c) : c;
      if (m != 1) out << m << "*";
      out << "(" << to_string(R, g) << ")";
      first = false;
    }
    return out.str();
  }

 private:
  std::map<Generator, BigInt> terms_;
};

/// Up to two output label masks of a saddle map; every coefficient is 1.
struct SaddleImage {
  std::uint32_t out[2];
  int count = 0;
};

/// The annular saddle map: the Khovanov map m or Delta with v+ = 1, v- = X,
/// keeping only the terms that preserve the annular grading.
inline SaddleImage apply_saddle(const SaddleInfo& s, const Resolution& src, const Resolution& dst, std::uint32_t x) {
  std::uint32_t base = 0;
  for (int c = 0; c < src.circle_count(); ++c)
    if (s.carry[c] >= 0 && ((x >> c) & 1u)) base |= 1u << s.carry[c];
  auto adeg = [](const Resolution& R, int c, std::uint32_t bit) { return R.is_essential(c) ? (bit ? -1 : 1) : 0; };
  SaddleImage img;
  if (s.merge) {
    const std::uint32_t p = (x >> s.from[0]) & 1u, q = (x >> s.from[1]) & 1u;
    if (p && q) return img;
    const std::uint32_t r = p | q;
    if (adeg(src, s.from[0], p) + adeg(src, s.from[1], q) != adeg(dst, s.to[0], r)) return img;
    img.out[img.count++] = base | (r << s.to[0]);
  } else {
    const std::uint32_t p = (x >> s.from[0]) & 1u;
    const int in = adeg(src, s.from[0], p);
    const std::uint32_t options[2][2] = {{0, 1}, {1, 0}};
    for (int k = 0; k < (p ? 1 : 2); ++k) {
      const std::uint32_t a = p ? 1 : options[k][0], b = p ? 1 : options[k][1];
      if (adeg(dst, s.to[0], a) + adeg(dst, s.to[1], b) != in) continue;
      img.out[img.count++] = base | (a << s.to[0]) | (b << s.to[1]);
    }
  }
  return img;
}

inline FormalSum apply_saddle(const AnnularDiagram& D, Vertex u, int coord, Generator x) {
  if (u[coord]) throw std::invalid_argument("edge must leave a vertex whose coordinate is 0");
  const Resolution src = resolve(D, u);
  const Resolution dst = resolve(D, u.flipped(coord));
  const SaddleInfo s = saddle_info(D, src, dst, coord);
  FormalSum out;
  const SaddleImage img = apply_saddle(s, src, dst, x.labels);
  for (int k = 0; k < img.count; ++k) out.add(Generator{img.out[k]}, 1);
  return out;
}

}  // namespace akh
