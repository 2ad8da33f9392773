#pragma once

// Exact two-phase simplex over the rationals (Bland's rule, dense tableau).

#include <cstddef>
#include <vector>

#include "toricqh/exactmath.hpp"

namespace toricqh {

enum class Sense { LessEq, Equal, GreaterEq };

struct LinearConstraint {
  RatVector coeffs;
  Sense sense = Sense::Equal;
  Rational rhs;
};

struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<bool> free_var;  // empty means every variable is >= 0
  std::vector<LinearConstraint> constraints;
  RatVector objective;  // maximized; empty means pure feasibility

  void add(RatVector coeffs, Sense sense, Rational rhs) {
    constraints.push_back({std::move(coeffs), sense, std::move(rhs)});
  }
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  Rational value;
  RatVector x;
};

LPResult solve_lp(const LinearProgram& lp);

inline bool lp_feasible(const LinearProgram& lp) {
  LinearProgram copy = lp;
  copy.objective.clear();
  return solve_lp(copy).status != LPStatus::Infeasible;
}

}  // namespace toricqh
