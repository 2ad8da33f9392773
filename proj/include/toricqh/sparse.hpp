#pragma once

// Sparse row echelon reduction over a field, and a sparse Smith invariant
// computation for integer relation matrices.

#include <algorithm>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "toricqh/exactmath.hpp"

namespace toricqh {

template <class Elem>
using SparseRow = std::vector<std::pair<std::size_t, Elem>>;  // sorted by column

/// Incremental forward elimination. The pivot of a row is its lowest column,
/// so the non-pivot columns are the greedy quotient basis that prefers the
/// highest column indices.
template <class F>
class RowReducer {
 public:
  using Elem = typename F::Elem;
  using Row = SparseRow<Elem>;

  RowReducer(F field, std::size_t ncols)
      : field_(std::move(field)), pivot_of_(ncols, kNone) {}

  std::size_t cols() const { return pivot_of_.size(); }
  std::size_t rank() const { return rows_.size(); }
  bool is_pivot(std::size_t c) const { return pivot_of_[c] != kNone; }
  const F& field() const { return field_; }

  /// Adds a row; returns true when the rank went up.
  bool insert(const Row& row) {
    if (dense_.size() != cols()) dense_.assign(cols(), field_.zero());
    std::size_t start = cols();
    for (const auto& [c, v] : row) {
      dense_[c] = field_.add(dense_[c], v);
      start = std::min(start, c);
    }
    std::size_t lead = cols();
    for (std::size_t c = start; c < cols(); ++c) {
      if (field_.is_zero(dense_[c])) continue;
      std::size_t p = pivot_of_[c];
      if (p == kNone) {
        lead = c;
        break;
      }
      Elem factor = dense_[c];
      for (const auto& [c2, v] : rows_[p]) dense_[c2] = field_.sub(dense_[c2], field_.mul(factor, v));
    }
    if (lead == cols()) return false;
    Elem scale = field_.inv(dense_[lead]);
    Row stored;
    for (std::size_t c = lead; c < cols(); ++c) {
      if (field_.is_zero(dense_[c])) continue;
      stored.emplace_back(c, field_.mul(dense_[c], scale));
      dense_[c] = field_.zero();
    }
    pivot_of_[lead] = rows_.size();
    rows_.push_back(std::move(stored));
    return true;
  }

  /// Reduced echelon form: each stored row keeps its pivot and otherwise
  /// only non-pivot columns.
  void back_substitute() {
    if (dense_.size() != cols()) dense_.assign(cols(), field_.zero());
    std::vector<std::size_t> touched;
    for (std::size_t c = cols(); c-- > 0;) {
      std::size_t p = pivot_of_[c];
      if (p == kNone) continue;
      touched.clear();
      for (const auto& [c2, v] : rows_[p]) {
        dense_[c2] = v;
        touched.push_back(c2);
      }
      for (const auto& [c2, v] : rows_[p]) {
        if (c2 == c || pivot_of_[c2] == kNone || field_.is_zero(dense_[c2])) continue;
        Elem factor = dense_[c2];
        for (const auto& [c3, w] : rows_[pivot_of_[c2]]) {
          if (field_.is_zero(dense_[c3])) touched.push_back(c3);
          dense_[c3] = field_.sub(dense_[c3], field_.mul(factor, w));
        }
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      Row out;
      for (auto c2 : touched) {
        if (!field_.is_zero(dense_[c2])) out.emplace_back(c2, dense_[c2]);
        dense_[c2] = field_.zero();
      }
      rows_[p] = std::move(out);
    }
  }

  /// Stored row with pivot in column c (c must be a pivot).
  const Row& pivot_row(std::size_t c) const { return rows_[pivot_of_[c]]; }

  /// Remainder of `row` modulo the row space; supported on non-pivot columns.
  Row reduce(const Row& row) const {
    std::map<std::size_t, Elem> work = to_map(row);
    Row out;
    while (!work.empty()) {
      auto it = work.begin();
      std::size_t p = pivot_of_[it->first];
      if (p == kNone) {
        out.emplace_back(it->first, it->second);
        work.erase(it);
        continue;
      }
      eliminate(work, it->second, rows_[p]);
    }
    return out;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::map<std::size_t, Elem> to_map(const Row& row) const {
    std::map<std::size_t, Elem> work;
    for (const auto& [c, v] : row) {
      if (field_.is_zero(v)) continue;
      auto [it, fresh] = work.emplace(c, v);
      if (!fresh) {
        it->second = field_.add(it->second, v);
        if (field_.is_zero(it->second)) work.erase(it);
      }
    }
    return work;
  }

  // work -= factor * pivot_row; pivot_row is monic at its lead.
  void eliminate(std::map<std::size_t, Elem>& work, Elem factor, const Row& pivot_row) const {
    for (const auto& [c, v] : pivot_row) {
      Elem delta = field_.mul(factor, v);
      auto it = work.find(c);
      if (it == work.end()) {
        work.emplace(c, field_.neg(delta));
      } else {
        it->second = field_.sub(it->second, delta);
        if (field_.is_zero(it->second)) work.erase(it);
      }
    }
  }

  F field_;
  std::vector<Elem> dense_;  // scratch for insert, all zero between calls
  std::vector<Row> rows_;
  std::vector<std::size_t> pivot_of_;
};

using IntSparseRow = SparseRow<Integer>;

/// Proves over Q that the columns >= first_basis project to a basis of
/// Q^ncols modulo the row space, by elimination modulo large primes, rational
/// reconstruction of the normal-form coefficients and an exact check that they
/// annihilate every row. False means "not proven", not "not a basis".
bool certify_quotient_basis(const std::vector<SparseRow<Rational>>& rows, std::size_t ncols,
                            std::size_t first_basis);

/// Non-zero invariant factors of the integer matrix with the given sparse
/// rows. Unit pivots are peeled off sparsely; the residue goes to a dense SNF.
std::vector<Integer> sparse_invariant_factors(std::vector<IntSparseRow> rows, std::size_t ncols);

}  // namespace toricqh
