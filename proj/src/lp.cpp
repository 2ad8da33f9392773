#include "toricqh/lp.hpp"

#include "toricqh/errors.hpp"

namespace toricqh {

namespace {

struct Tableau {
  std::vector<RatVector> rows;  // each row: columns then rhs last
  std::vector<std::size_t> basis;
  std::size_t ncols = 0;

  const Rational& rhs(std::size_t i) const { return rows[i][ncols]; }

  void pivot(std::size_t r, std::size_t c) {
    Rational inv = 1 / rows[r][c];
    for (auto& v : rows[r]) v *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || sgn(rows[i][c]) == 0) continue;
      Rational f = rows[i][c];
      for (std::size_t j = 0; j <= ncols; ++j) {
        if (sgn(rows[r][j]) != 0) rows[i][j] -= f * rows[r][j];
      }
    }
    basis[r] = c;
  }

  // Maximizes cost over columns < limit. Returns false if unbounded.
  bool optimize(const RatVector& cost, std::size_t limit) {
    while (true) {
      std::size_t enter = limit;
      for (std::size_t j = 0; j < limit; ++j) {
        Rational reduced = cost[j];
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (sgn(rows[i][j]) != 0) reduced -= cost[basis[i]] * rows[i][j];
        }
        if (sgn(reduced) > 0) {
          enter = j;
          break;
        }
      }
      if (enter == limit) return true;
      std::size_t leave = rows.size();
      Rational best;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (sgn(rows[i][enter]) <= 0) continue;
        Rational ratio = rhs(i) / rows[i][enter];
        if (leave == rows.size() || ratio < best ||
            (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == rows.size()) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LPResult solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars;
  auto is_free = [&](std::size_t i) { return !lp.free_var.empty() && lp.free_var[i]; };

  // Structural columns: x_i (or x_i+ and x_i-), then one slack per inequality.
  std::vector<std::size_t> col_of(n);
  std::size_t nstruct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    col_of[i] = nstruct;
    nstruct += is_free(i) ? 2 : 1;
  }
  std::size_t nslack = 0;
  for (const auto& c : lp.constraints) {
    if (c.coeffs.size() != n) throw Error("linear program: constraint width mismatch");
    if (c.sense != Sense::Equal) ++nslack;
  }
  const std::size_t m = lp.constraints.size();
  const std::size_t real_cols = nstruct + nslack;
  Tableau t;
  t.ncols = real_cols + m;
  t.rows.assign(m, RatVector(t.ncols + 1, Rational(0)));
  t.basis.resize(m);

  std::size_t slack = nstruct;
  for (std::size_t r = 0; r < m; ++r) {
    const auto& c = lp.constraints[r];
    RatVector& row = t.rows[r];
    for (std::size_t i = 0; i < n; ++i) {
      row[col_of[i]] = c.coeffs[i];
      if (is_free(i)) row[col_of[i] + 1] = -c.coeffs[i];
    }
    if (c.sense == Sense::LessEq) row[slack++] = 1;
    if (c.sense == Sense::GreaterEq) row[slack++] = -1;
    row[t.ncols] = c.rhs;
    if (sgn(c.rhs) < 0) {
      for (auto& v : row) v = -v;
    }
    row[real_cols + r] = 1;
    t.basis[r] = real_cols + r;
  }

  // Phase one: drive artificials to zero.
  RatVector phase1(t.ncols, Rational(0));
  for (std::size_t r = 0; r < m; ++r) phase1[real_cols + r] = -1;
  t.optimize(phase1, t.ncols);
  Rational infeas = 0;
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis[r] >= real_cols) infeas += t.rhs(r);
  }
  LPResult result;
  if (sgn(infeas) != 0) {
    result.status = LPStatus::Infeasible;
    return result;
  }
  for (std::size_t r = 0; r < t.rows.size();) {
    if (t.basis[r] < real_cols) {
      ++r;
      continue;
    }
    std::size_t c = 0;
    while (c < real_cols && sgn(t.rows[r][c]) == 0) ++c;
    if (c == real_cols) {
      t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(r));
      t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(r));
      continue;
    }
    t.pivot(r, c);
    ++r;
  }

  // Phase two.
  RatVector cost(t.ncols, Rational(0));
  if (!lp.objective.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      cost[col_of[i]] = lp.objective[i];
      if (is_free(i)) cost[col_of[i] + 1] = -lp.objective[i];
    }
  }
  if (!t.optimize(cost, real_cols)) {
    result.status = LPStatus::Unbounded;
    return result;
  }

  RatVector value(t.ncols, Rational(0));
  for (std::size_t r = 0; r < t.rows.size(); ++r) value[t.basis[r]] = t.rhs(r);
  result.status = LPStatus::Optimal;
  result.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    result.x[i] = value[col_of[i]];
    if (is_free(i)) result.x[i] -= value[col_of[i] + 1];
  }
  result.value = 0;
  if (!lp.objective.empty()) {
    for (std::size_t i = 0; i < n; ++i) result.value += lp.objective[i] * result.x[i];
  }
  return result;
}

}  // namespace toricqh
