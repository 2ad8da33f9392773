#include "toricqh/exactmath.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <utility>

#include "toricqh/errors.hpp"

namespace toricqh {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1")
                                                         : body.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den)) {
    throw ParseError("not an exact rational: '" + std::string(text) + "'");
  }
  Integer n(std::string(num), 10);
  Integer d(std::string(den), 10);
  if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  Rational q(n, d);
  q.canonicalize();
  if (negative) q = -q;
  return q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const Integer& z) { return z.get_str(); }

Rational make_rational(std::int64_t num, std::int64_t den) {
  Rational q(Integer(static_cast<long>(num)), Integer(static_cast<long>(den)));
  q.canonicalize();
  return q;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw Error("lattice coordinate overflow");
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw Error("lattice coordinate overflow");
  return out;
}

std::int64_t to_int64(const Integer& z) {
  if (!z.fits_slong_p()) throw Error("integer does not fit a lattice coordinate");
  return z.get_si();
}

std::int64_t to_int64(const Rational& q) {
  if (!is_integer(q)) throw Error("expected an integer, got " + to_string(q));
  return to_int64(q.get_num());
}

// ---------------------------------------------------------------------------
// IntMatrix

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Integer(0)) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw Error("ragged matrix literal");
    for (long v : row) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1;
  return I;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows,
                               std::size_t cols) {
  IntMatrix M(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw Error("ragged matrix");
    for (std::size_t j = 0; j < cols; ++j) M(i, j) = static_cast<long>(rows[i][j]);
  }
  return M;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix T(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
  return T;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Integer& z) { return z == 0; });
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMatrix::add_row_multiple(std::size_t dst, std::size_t src, const Integer& factor) {
  if (factor == 0) return;
  for (std::size_t j = 0; j < cols_; ++j) {
    if ((*this)(src, j) != 0) (*this)(dst, j) += factor * (*this)(src, j);
  }
}

void IntMatrix::add_col_multiple(std::size_t dst, std::size_t src, const Integer& factor) {
  if (factor == 0) return;
  for (std::size_t i = 0; i < rows_; ++i) {
    if ((*this)(i, src) != 0) (*this)(i, dst) += factor * (*this)(i, src);
  }
}

void IntMatrix::negate_row(std::size_t r) {
  for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
}

void IntMatrix::negate_col(std::size_t c) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, c) = -(*this)(i, c);
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw Error("matrix dimension mismatch");
  IntMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

bool operator==(const IntMatrix& a, const IntMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

IntVector operator*(const IntMatrix& a, const IntVector& x) {
  if (a.cols() != x.size()) throw Error("matrix/vector dimension mismatch");
  IntVector out(a.rows(), Integer(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * x[j];
  return out;
}

// ---------------------------------------------------------------------------
// Hermite normal form

HermiteForm hermite_normal_form(const IntMatrix& M) {
  IntMatrix H = M;
  IntMatrix U = IntMatrix::identity(M.rows());
  std::size_t r = 0;
  for (std::size_t c = 0; c < H.cols() && r < H.rows(); ++c) {
    while (true) {
      std::size_t best = H.rows();
      for (std::size_t i = r; i < H.rows(); ++i) {
        if (H(i, c) == 0) continue;
        if (best == H.rows() || abs(H(i, c)) < abs(H(best, c))) best = i;
      }
      if (best == H.rows()) break;
      H.swap_rows(r, best);
      U.swap_rows(r, best);
      bool cleared = true;
      for (std::size_t i = r + 1; i < H.rows(); ++i) {
        if (H(i, c) == 0) continue;
        Integer q;
        mpz_tdiv_q(q.get_mpz_t(), H(i, c).get_mpz_t(), H(r, c).get_mpz_t());
        H.add_row_multiple(i, r, -q);
        U.add_row_multiple(i, r, -q);
        if (H(i, c) != 0) cleared = false;
      }
      if (cleared) break;
    }
    if (H(r, c) == 0) continue;
    if (H(r, c) < 0) {
      H.negate_row(r);
      U.negate_row(r);
    }
    for (std::size_t i = 0; i < r; ++i) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), H(i, c).get_mpz_t(), H(r, c).get_mpz_t());
      H.add_row_multiple(i, r, -q);
      U.add_row_multiple(i, r, -q);
    }
    ++r;
  }
  return {std::move(H), std::move(U)};
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

struct SmithWork {
  IntMatrix S;
  IntMatrix* U = nullptr;
  IntMatrix* V = nullptr;

  void swap_rows(std::size_t a, std::size_t b) {
    S.swap_rows(a, b);
    if (U) U->swap_rows(a, b);
  }
  void swap_cols(std::size_t a, std::size_t b) {
    S.swap_cols(a, b);
    if (V) V->swap_cols(a, b);
  }
  void add_row(std::size_t dst, std::size_t src, const Integer& f) {
    S.add_row_multiple(dst, src, f);
    if (U) U->add_row_multiple(dst, src, f);
  }
  void add_col(std::size_t dst, std::size_t src, const Integer& f) {
    S.add_col_multiple(dst, src, f);
    if (V) V->add_col_multiple(dst, src, f);
  }
  void negate_row(std::size_t r) {
    S.negate_row(r);
    if (U) U->negate_row(r);
  }

  void run() {
    const std::size_t rows = S.rows();
    const std::size_t cols = S.cols();
    for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
      // Smallest non-zero entry of the trailing block becomes the pivot.
      std::size_t pi = rows, pj = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j) {
          if (S(i, j) == 0) continue;
          if (pi == rows || abs(S(i, j)) < abs(S(pi, pj))) {
            pi = i;
            pj = j;
          }
        }
      if (pi == rows) return;
      swap_rows(t, pi);
      swap_cols(t, pj);

      while (true) {
        bool clean = true;
        for (std::size_t i = t + 1; i < rows; ++i) {
          if (S(i, t) == 0) continue;
          Integer q;
          mpz_tdiv_q(q.get_mpz_t(), S(i, t).get_mpz_t(), S(t, t).get_mpz_t());
          add_row(i, t, -q);
          if (S(i, t) != 0) clean = false;
        }
        for (std::size_t j = t + 1; j < cols; ++j) {
          if (S(t, j) == 0) continue;
          Integer q;
          mpz_tdiv_q(q.get_mpz_t(), S(t, j).get_mpz_t(), S(t, t).get_mpz_t());
          add_col(j, t, -q);
          if (S(t, j) != 0) clean = false;
        }
        if (!clean) {
          // A remainder survived: move the smallest entry of row/column t in.
          std::size_t bi = t, bj = t;
          for (std::size_t i = t + 1; i < rows; ++i)
            if (S(i, t) != 0 && abs(S(i, t)) < abs(S(bi, bj))) {
              bi = i;
              bj = t;
            }
          for (std::size_t j = t + 1; j < cols; ++j)
            if (S(t, j) != 0 && abs(S(t, j)) < abs(S(bi, bj))) {
              bi = t;
              bj = j;
            }
          swap_rows(t, bi);
          swap_cols(t, bj);
          continue;
        }
        // Divisibility: every later entry must be a multiple of the pivot.
        bool divisible = true;
        for (std::size_t i = t + 1; i < rows && divisible; ++i)
          for (std::size_t j = t + 1; j < cols; ++j) {
            if (S(i, j) == 0) continue;
            if (!mpz_divisible_p(S(i, j).get_mpz_t(), S(t, t).get_mpz_t())) {
              add_row(t, i, Integer(1));
              divisible = false;
              break;
            }
          }
        if (divisible) break;
      }
      if (S(t, t) < 0) negate_row(t);
    }
  }
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& M) {
  IntMatrix U = IntMatrix::identity(M.rows());
  IntMatrix V = IntMatrix::identity(M.cols());
  SmithWork work{M, &U, &V};
  work.run();
  return {std::move(work.S), std::move(U), std::move(V)};
}

std::vector<Integer> invariant_factors(const IntMatrix& M) {
  SmithWork work{M, nullptr, nullptr};
  work.run();
  std::vector<Integer> out;
  for (std::size_t t = 0; t < std::min(M.rows(), M.cols()); ++t) {
    if (work.S(t, t) != 0) out.push_back(work.S(t, t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rational solving

namespace {

using RatMatrix = std::vector<RatVector>;

// Gauss-Jordan in place; returns pivot columns in row order.
std::vector<std::size_t> gauss_jordan(RatMatrix& A, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < A.size(); ++c) {
    std::size_t p = r;
    while (p < A.size() && A[p][c] == 0) ++p;
    if (p == A.size()) continue;
    std::swap(A[r], A[p]);
    Rational inv = 1 / A[r][c];
    for (auto& x : A[r]) x *= inv;
    for (std::size_t i = 0; i < A.size(); ++i) {
      if (i == r || A[i][c] == 0) continue;
      Rational f = A[i][c];
      for (std::size_t j = 0; j < A[i].size(); ++j) A[i][j] -= f * A[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

std::optional<RatVector> solve_rational(const IntMatrix& A, const RatVector& b) {
  if (b.size() != A.rows()) throw Error("solve_rational: dimension mismatch");
  const std::size_t n = A.cols();
  RatMatrix aug(A.rows(), RatVector(n + 1));
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = Rational(A(i, j));
    aug[i][n] = b[i];
  }
  auto pivots = gauss_jordan(aug, n + 1);
  RatVector x(n, Rational(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    if (pivots[r] == n) return std::nullopt;  // 0 = nonzero
    x[pivots[r]] = aug[r][n];
  }
  return x;
}

std::vector<IntVector> integer_kernel(const IntMatrix& M) {
  SmithForm snf = smith_normal_form(M);
  std::size_t rank = 0;
  while (rank < std::min(M.rows(), M.cols()) && snf.S(rank, rank) != 0) ++rank;
  const std::size_t k = M.cols() - rank;
  if (k == 0) return {};
  IntMatrix K(k, M.cols());
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t j = 0; j < M.cols(); ++j) K(a, j) = snf.V(j, rank + a);
  IntMatrix H = hermite_normal_form(K).H;
  std::vector<IntVector> basis;
  for (std::size_t a = 0; a < k; ++a) {
    IntVector v(M.cols());
    for (std::size_t j = 0; j < M.cols(); ++j) v[j] = H(a, j);
    basis.push_back(std::move(v));
  }
  return basis;
}

Integer determinant(const IntMatrix& M) {
  if (M.rows() != M.cols()) throw Error("determinant of non-square matrix");
  const std::size_t n = M.rows();
  if (n == 0) return 1;
  // Bareiss fraction-free elimination.
  IntMatrix A = M;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (A(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && A(p, k) == 0) ++p;
      if (p == n) return 0;
      A.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = A(i, j) * A(k, k) - A(i, k) * A(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        A(i, j) = v;
      }
    prev = A(k, k);
  }
  return sign * A(n - 1, n - 1);
}

std::size_t rank_over_rationals(const IntMatrix& M) {
  RatMatrix A(M.rows(), RatVector(M.cols()));
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j) A[i][j] = Rational(M(i, j));
  return gauss_jordan(A, M.cols()).size();
}

std::optional<std::vector<RatVector>> inverse_rational(const IntMatrix& M) {
  if (M.rows() != M.cols()) throw Error("inverse of non-square matrix");
  const std::size_t n = M.rows();
  RatMatrix aug(n, RatVector(2 * n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = Rational(M(i, j));
    aug[i][n + i] = 1;
  }
  auto pivots = gauss_jordan(aug, n);
  if (pivots.size() != n) return std::nullopt;
  std::vector<RatVector> inv(n, RatVector(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
  return inv;
}

bool is_unimodular(const IntMatrix& M) {
  if (M.rows() != M.cols()) return false;
  return abs(determinant(M)) == 1;
}

}  // namespace toricqh
