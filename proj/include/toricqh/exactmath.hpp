#pragma once

// Exact integer and rational arithmetic plus the lattice linear algebra
// (Hermite and Smith normal forms, rational solving, integer kernels) used
// throughout the library. Nothing here ever rounds.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace toricqh {

using Integer = mpz_class;
using Rational = mpq_class;
using RatVector = std::vector<Rational>;
using IntVector = std::vector<Integer>;

/// Parses "p/q", "p" or "-p/q" into a canonical rational. Throws ParseError.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

Rational make_rational(std::int64_t num, std::int64_t den = 1);

bool is_integer(const Rational& q);

/// Lattice coordinates are stored as int64 with overflow checks; an
/// overflow throws instead of wrapping.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t to_int64(const Integer& z);
std::int64_t to_int64(const Rational& q);

/// Dense row-major matrix of arbitrary-precision integers.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows,
                             std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  IntMatrix transpose() const;
  bool is_zero() const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  /// row[dst] += factor * row[src]
  void add_row_multiple(std::size_t dst, std::size_t src, const Integer& factor);
  /// col[dst] += factor * col[src]
  void add_col_multiple(std::size_t dst, std::size_t src, const Integer& factor);
  void negate_row(std::size_t r);
  void negate_col(std::size_t c);

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

IntVector operator*(const IntMatrix& a, const IntVector& x);

struct HermiteForm {
  IntMatrix H;  // row-style Hermite normal form
  IntMatrix U;  // unimodular, U * M == H
};

/// Row-style HNF: H is in row echelon form, pivots positive, entries above a
/// pivot reduced into [0, pivot).
HermiteForm hermite_normal_form(const IntMatrix& M);

struct SmithForm {
  IntMatrix S;  // diagonal, d_i | d_{i+1}, non-negative
  IntMatrix U;  // unimodular (rows x rows)
  IntMatrix V;  // unimodular (cols x cols), U * M * V == S
};

SmithForm smith_normal_form(const IntMatrix& M);

/// Non-zero invariant factors only (no transforms).
std::vector<Integer> invariant_factors(const IntMatrix& M);

/// A particular solution of A x = b with free variables set to zero, or
/// nullopt when the system is inconsistent.
std::optional<RatVector> solve_rational(const IntMatrix& A, const RatVector& b);

/// Lattice basis of { x in Z^cols : M x = 0 }. Each vector has its first
/// non-zero entry positive.
std::vector<IntVector> integer_kernel(const IntMatrix& M);

Integer determinant(const IntMatrix& M);
std::size_t rank_over_rationals(const IntMatrix& M);

/// Inverse of a square integer matrix over Q; nullopt when singular.
std::optional<std::vector<RatVector>> inverse_rational(const IntMatrix& M);

bool is_unimodular(const IntMatrix& M);

}  // namespace toricqh
