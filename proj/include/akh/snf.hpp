#pragma once

// Dense integer matrices, Smith normal form with unimodular transforms, and
// integer kernel bases.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "akh/integer.hpp"

namespace akh {

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  BigInt& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const BigInt& v) { return v == 0; });
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix shapes do not compose");
    IntMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const BigInt& v = a(i, k);
        if (v == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (b(k, j) != 0) c(i, j) += v * b(k, j);
      }
    return c;
  }

  /// Rows [r0, r1) as a new matrix.
  IntMatrix row_block(std::size_t r0, std::size_t r1) const {
    IntMatrix m(r1 - r0, cols_);
    std::copy(data_.begin() + r0 * cols_, data_.begin() + r1 * cols_, m.data_.begin());
    return m;
  }

  IntMatrix col_block(std::size_t c0, std::size_t c1) const {
    IntMatrix m(rows_, c1 - c0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = c0; j < c1; ++j) m(i, j - c0) = (*this)(i, j);
    return m;
  }

  // row dst += q * row src
  void add_row(std::size_t dst, std::size_t src, const BigInt& q) {
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(src, j) != 0) (*this)(dst, j) += q * (*this)(src, j);
  }
  void add_col(std::size_t dst, std::size_t src, const BigInt& q) {
    for (std::size_t i = 0; i < rows_; ++i)
      if ((*this)(i, src) != 0) (*this)(i, dst) += q * (*this)(i, src);
  }
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  void negate_row(std::size_t r) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<BigInt> data_;
};

inline bool is_unit(const BigInt& v) { return v == 1 || v == -1; }

/// left * M * right = diag(divisors, 0...), with d_i | d_{i+1} and d_i > 0.
/// The transforms are empty unless requested.
struct SnfResult {
  std::vector<BigInt> divisors;
  std::size_t rank = 0;
  IntMatrix left, left_inverse, right, right_inverse;
};

namespace detail {

// Row and column operations applied to a working matrix and mirrored into
// optional transforms.
struct Tracker {
  IntMatrix& a;
  IntMatrix* left = nullptr;
  IntMatrix* left_inv = nullptr;
  IntMatrix* right = nullptr;
  IntMatrix* right_inv = nullptr;

  void add_row(std::size_t dst, std::size_t src, const BigInt& q) {
    a.add_row(dst, src, q);
    if (left) left->add_row(dst, src, q);
    if (left_inv) left_inv->add_col(src, dst, -q);
  }
  void add_col(std::size_t dst, std::size_t src, const BigInt& q) {
    a.add_col(dst, src, q);
    if (right) right->add_col(dst, src, q);
    if (right_inv) right_inv->add_row(src, dst, -q);
  }
  void swap_rows(std::size_t i, std::size_t k) {
    a.swap_rows(i, k);
    if (left) left->swap_rows(i, k);
    if (left_inv) left_inv->swap_cols(i, k);
  }
  void swap_cols(std::size_t i, std::size_t k) {
    a.swap_cols(i, k);
    if (right) right->swap_cols(i, k);
    if (right_inv) right_inv->swap_rows(i, k);
  }
  void negate_row(std::size_t r) {
    a.negate_row(r);
    if (left) left->negate_row(r);
    if (left_inv) {
      for (std::size_t i = 0; i < left_inv->rows(); ++i) (*left_inv)(i, r) = -(*left_inv)(i, r);
    }
  }
};

inline bool abs_less(const BigInt& x, const BigInt& y) {
  return (x < 0 ? BigInt(-x) : x) < (y < 0 ? BigInt(-y) : y);
}

}  // namespace detail

inline SnfResult smith_normal_form(const IntMatrix& m, bool with_transforms = false) {
  SnfResult res;
  IntMatrix a = m;
  const std::size_t R = a.rows(), C = a.cols();
  if (with_transforms) {
    res.left = res.left_inverse = IntMatrix::identity(R);
    res.right = res.right_inverse = IntMatrix::identity(C);
  }
  detail::Tracker tr{a};
  if (with_transforms) {
    tr.left = &res.left;
    tr.left_inv = &res.left_inverse;
    tr.right = &res.right;
    tr.right_inv = &res.right_inverse;
  }
  const std::size_t lim = std::min(R, C);
  for (std::size_t t = 0; t < lim; ++t) {
    // smallest nonzero entry of the trailing block, stopping at a unit
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (std::size_t i = t; i < R; ++i) {
      for (std::size_t j = t; j < C; ++j) {
        if (a(i, j) == 0) continue;
        if (!best || detail::abs_less(a(i, j), a(best->first, best->second))) best = {i, j};
        if (is_unit(a(i, j))) break;
      }
      if (best && is_unit(a(best->first, best->second))) break;
    }
    if (!best) break;
    tr.swap_rows(t, best->first);
    tr.swap_cols(t, best->second);
    for (;;) {
      bool dirty = false;
      for (std::size_t i = t + 1; i < R; ++i) {
        if (a(i, t) == 0) continue;
        const BigInt q = a(i, t) / a(t, t);
        tr.add_row(i, t, -q);
        if (a(i, t) != 0) dirty = true;
      }
      for (std::size_t j = t + 1; j < C; ++j) {
        if (a(t, j) == 0) continue;
        const BigInt q = a(t, j) / a(t, t);
        tr.add_col(j, t, -q);
        if (a(t, j) != 0) dirty = true;
      }
      if (dirty) {
        std::size_t bi = t, bj = t;
        for (std::size_t i = t + 1; i < R; ++i)
          if (a(i, t) != 0 && detail::abs_less(a(i, t), a(bi, bj))) bi = i, bj = t;
        for (std::size_t j = t + 1; j < C; ++j)
          if (a(t, j) != 0 && detail::abs_less(a(t, j), a(bi, bj))) bi = t, bj = j;
        tr.swap_rows(t, bi);
        tr.swap_cols(t, bj);
        continue;
      }
      if (is_unit(a(t, t))) break;
      std::optional<std::size_t> bad;
      for (std::size_t i = t + 1; i < R && !bad; ++i)
        for (std::size_t j = t + 1; j < C; ++j)
          if (a(i, j) % a(t, t) != 0) {
            bad = i;
            break;
          }
      if (!bad) break;
      tr.add_row(t, *bad, 1);
    }
    if (a(t, t) < 0) tr.negate_row(t);
    res.divisors.push_back(a(t, t));
    res.rank = t + 1;
  }
  return res;
}

/// Integer basis of ker(d) together with coordinates: `coordinates * c` gives
/// the coefficients of a cycle c in `basis`.
struct KernelBasis {
  std::size_t rank = 0;  // rank of d
  IntMatrix basis;        // n x k
  IntMatrix coordinates;  // k x n
};

inline KernelBasis kernel_basis(const IntMatrix& d) {
  const std::size_t n = d.cols();
  IntMatrix a = d;
  IntMatrix v = IntMatrix::identity(n), vi = IntMatrix::identity(n);
  detail::Tracker tr{a, nullptr, nullptr, &v, &vi};
  std::size_t pc = 0;
  for (std::size_t r = 0; r < a.rows() && pc < n; ++r) {
    for (;;) {
      std::optional<std::size_t> best;
      for (std::size_t j = pc; j < n; ++j)
        if (a(r, j) != 0 && (!best || detail::abs_less(a(r, j), a(r, *best)))) best = j;
      if (!best) break;
      tr.swap_cols(pc, *best);
      bool clean = true;
      for (std::size_t j = pc + 1; j < n; ++j) {
        if (a(r, j) == 0) continue;
        tr.add_col(j, pc, -(a(r, j) / a(r, pc)));
        if (a(r, j) != 0) clean = false;
      }
      if (clean) {
        ++pc;
        break;
      }
    }
  }
  KernelBasis kb;
  kb.rank = pc;
  kb.basis = v.col_block(pc, n);
  kb.coordinates = vi.row_block(pc, n);
  return kb;
}

}  // namespace akh
