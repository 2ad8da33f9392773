#include "toricqh/sparse.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "toricqh/field.hpp"

namespace toricqh {

std::vector<Integer> sparse_invariant_factors(std::vector<IntSparseRow> input, std::size_t ncols) {
  std::vector<std::map<std::size_t, Integer>> rows;
  std::vector<std::set<std::size_t>> col_rows(ncols);
  for (auto& r : input) {
    std::map<std::size_t, Integer> m;
    for (auto& [c, v] : r) {
      if (v == 0) continue;
      m[c] += v;
      if (m[c] == 0) m.erase(c);
    }
    if (m.empty()) continue;
    for (auto& [c, v] : m) col_rows[c].insert(rows.size());
    rows.push_back(std::move(m));
  }

  std::vector<bool> alive(rows.size(), true);
  std::vector<Integer> factors;

  while (true) {
    // Unit entry in the shortest row, breaking ties by sparsest column.
    std::size_t best_r = rows.size(), best_c = 0;
    std::size_t best_cost = static_cast<std::size_t>(-1);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!alive[r]) continue;
      for (auto& [c, v] : rows[r]) {
        if (abs(v) != 1) continue;
        std::size_t cost = rows[r].size() * col_rows[c].size();
        if (cost < best_cost) {
          best_cost = cost;
          best_r = r;
          best_c = c;
        }
      }
    }
    if (best_r == rows.size()) break;

    const Integer unit = rows[best_r][best_c];
    std::vector<std::size_t> targets(col_rows[best_c].begin(), col_rows[best_c].end());
    for (std::size_t r : targets) {
      if (r == best_r) continue;
      Integer f = rows[r][best_c] * unit;  // unit^-1 == unit
      for (auto& [c, v] : rows[best_r]) {
        auto it = rows[r].find(c);
        Integer delta = f * v;
        if (it == rows[r].end()) {
          rows[r].emplace(c, -delta);
          col_rows[c].insert(r);
        } else {
          it->second -= delta;
          if (it->second == 0) {
            rows[r].erase(it);
            col_rows[c].erase(r);
          }
        }
      }
      if (rows[r].empty()) alive[r] = false;
    }
    for (auto& [c, v] : rows[best_r]) col_rows[c].erase(best_r);
    alive[best_r] = false;
    factors.emplace_back(1);
  }

  // Dense residue.
  std::vector<std::size_t> live_rows;
  std::set<std::size_t> live_cols;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!alive[r] || rows[r].empty()) continue;
    live_rows.push_back(r);
    for (auto& [c, v] : rows[r]) live_cols.insert(c);
  }
  if (!live_rows.empty()) {
    std::vector<std::size_t> cols(live_cols.begin(), live_cols.end());
    IntMatrix M(live_rows.size(), cols.size());
    for (std::size_t i = 0; i < live_rows.size(); ++i) {
      for (auto& [c, v] : rows[live_rows[i]]) {
        auto pos = std::lower_bound(cols.begin(), cols.end(), c) - cols.begin();
        M(i, static_cast<std::size_t>(pos)) = v;
      }
    }
    for (auto& d : invariant_factors(M)) factors.push_back(d);
  }
  std::sort(factors.begin(), factors.end());
  return factors;
}

namespace {

std::optional<Rational> reconstruct(const Integer& a, const Integer& m) {
  if (a == 0) return Rational(0);
  Integer bound = sqrt(Integer(m / 2));
  Integer r0 = m, r1 = a, s0 = 0, s1 = 1;
  while (r1 > bound) {
    Integer q = r0 / r1;
    Integer r2 = r0 - q * r1;
    Integer s2 = s0 - q * s1;
    r0 = std::move(r1);
    r1 = std::move(r2);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (s1 == 0 || abs(s1) > bound || gcd(r1, s1) != 1) return std::nullopt;
  Rational x(r1, s1);
  x.canonicalize();
  return x;
}

}  // namespace

bool certify_quotient_basis(const std::vector<SparseRow<Rational>>& rows, std::size_t ncols,
                            std::size_t first_basis) {
  const std::size_t nb = ncols - first_basis;
  std::vector<IntSparseRow> irows;
  irows.reserve(rows.size());
  for (const auto& row : rows) {
    Integer l = 1;
    for (const auto& [c, v] : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den().get_mpz_t());
    IntSparseRow r;
    for (const auto& [c, v] : row) {
      if (sgn(v) != 0) r.emplace_back(c, Integer(v.get_num() * (l / v.get_den())));
    }
    if (!r.empty()) irows.push_back(std::move(r));
  }

  std::vector<Integer> residues(first_basis * nb);
  Integer modulus = 1;
  Integer prime = Integer(1) << 61;
  int unlucky = 0;
  for (int round = 0; round < 32; ++round) {
    mpz_nextprime(prime.get_mpz_t(), prime.get_mpz_t());
    PrimeField F{prime.get_ui()};
    RowReducer<PrimeField> red(F, ncols);
    for (const auto& r : irows) {
      SparseRow<std::uint64_t> m;
      for (const auto& [c, v] : r) {
        std::uint64_t x = mpz_fdiv_ui(v.get_mpz_t(), F.p);
        if (x) m.emplace_back(c, x);
      }
      red.insert(m);
    }
    bool shape = true;
    for (std::size_t c = 0; c < ncols && shape; ++c) shape = red.is_pivot(c) == (c < first_basis);
    if (!shape) {
      if (++unlucky >= 2) return false;
      continue;
    }
    red.back_substitute();

    std::vector<std::uint64_t> vals(first_basis * nb, 0);
    for (std::size_t c = 0; c < first_basis; ++c) {
      for (const auto& [c2, v] : red.pivot_row(c)) {
        if (c2 >= first_basis) vals[c * nb + (c2 - first_basis)] = F.neg(v);
      }
    }
    if (modulus == 1) {
      for (std::size_t i = 0; i < vals.size(); ++i) residues[i] = static_cast<unsigned long>(vals[i]);
    } else {
      std::uint64_t inv = F.inv(mpz_fdiv_ui(modulus.get_mpz_t(), F.p));
      for (std::size_t i = 0; i < vals.size(); ++i) {
        std::uint64_t t = F.mul(F.sub(vals[i], mpz_fdiv_ui(residues[i].get_mpz_t(), F.p)), inv);
        residues[i] += modulus * Integer(static_cast<unsigned long>(t));
      }
    }
    modulus *= prime;

    // Kernel vectors x_b = (-C e_b, e_b), scaled to integers per b.
    std::vector<std::vector<Integer>> z(nb, std::vector<Integer>(first_basis));
    std::vector<Integer> scale(nb, Integer(1));
    bool reconstructed = true;
    {
      std::vector<Rational> x(first_basis * nb);
      for (std::size_t i = 0; i < x.size() && reconstructed; ++i) {
        auto q = reconstruct(residues[i], modulus);
        if (q) {
          x[i] = *q;
        } else {
          reconstructed = false;
        }
      }
      if (!reconstructed) continue;
      for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t c = 0; c < first_basis; ++c) {
          mpz_lcm(scale[b].get_mpz_t(), scale[b].get_mpz_t(), x[c * nb + b].get_den().get_mpz_t());
        }
        for (std::size_t c = 0; c < first_basis; ++c) {
          const Rational& q = x[c * nb + b];
          z[b][c] = q.get_num() * (scale[b] / q.get_den());
        }
      }
    }
    bool annihilates = true;
    for (const auto& r : irows) {
      for (std::size_t b = 0; b < nb && annihilates; ++b) {
        Integer sum = 0;
        for (const auto& [c, v] : r) {
          if (c < first_basis) {
            sum += v * z[b][c];
          } else if (c - first_basis == b) {
            sum += v * scale[b];
          }
        }
        annihilates = sum == 0;
      }
      if (!annihilates) break;
    }
    if (annihilates) return true;
  }
  return false;
}

}  // namespace toricqh
