#pragma once

// Shared fixtures and brute-force oracles for the test executables.

#include <algorithm>
#include <functional>
#include <optional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "toricqh/conemonoid.hpp"
#include "toricqh/polyhedron.hpp"
#include "toricqh/presentation.hpp"

namespace testing_support {

using namespace toricqh;

inline std::string data_path(const std::string& name) { return std::string(TORICQH_DATA_DIR) + "/" + name + ".json"; }

inline DelzantPolyhedron load(const std::string& name) { return DelzantPolyhedron::from_file(data_path(name)); }

inline const std::vector<std::string>& corpus() {
  static const std::vector<std::string> names = {"cp1", "cp2", "cp3", "cp1xcp1", "c1", "c2", "c3",
                                                 "o_minus_1", "hirzebruch_f1", "hirzebruch_f2", "non_delzant",
                                                 "vertexless"};
  return names;
}

/// Corpus entries that are Delzant and have a vertex.
inline const std::vector<std::string>& valid_corpus() {
  static const std::vector<std::string> names = {"cp1", "cp2", "cp3", "cp1xcp1", "c1", "c2", "c3",
                                                 "o_minus_1", "hirzebruch_f1", "hirzebruch_f2"};
  return names;
}

inline DelzantPolyhedron make(std::size_t dim, const std::vector<LatticeVector>& normals,
                              const std::vector<Rational>& offsets = {}) {
  std::vector<Facet> facets;
  for (std::size_t j = 0; j < normals.size(); ++j) {
    facets.push_back({normals[j], offsets.empty() ? Rational(1) : offsets[j]});
  }
  return DelzantPolyhedron(dim, facets);
}

inline Rational rat(long p, long q = 1) { return make_rational(p, q); }

/// Blow up a random vertex: add the facet with normal the sum of the
/// incident normals, cutting just below the vertex.
inline std::optional<DelzantPolyhedron> corner_cut(const DelzantPolyhedron& P, std::mt19937_64& rng) {
  auto verts = enumerate_vertices(P);
  if (verts.empty()) return std::nullopt;
  const auto& v = verts[rng() % verts.size()];
  LatticeVector nu(P.dim(), 0);
  Rational sum = 0;
  for (auto j : v.incident) {
    for (std::size_t i = 0; i < P.dim(); ++i) nu[i] += P.normal(j)[i];
    sum += P.offset(j);
  }
  static const long denominators[] = {2, 3, 4, 5};
  for (long den : denominators) {
    Rational delta = sum / den;
    std::vector<Facet> facets = P.facets();
    facets.push_back({nu, sum - delta});
    try {
      DelzantPolyhedron Q(P.dim(), facets);
      if (check_delzant(Q).passed && enumerate_vertices(Q).size() == verts.size() + P.dim() - 1) return Q;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

/// Random Delzant polyhedron with dim <= max_dim and at most max_facets
/// facets: a simplex, cube or orthant, a few corner cuts, a unimodular
/// change of basis.
inline DelzantPolyhedron random_delzant(std::mt19937_64& rng, std::size_t max_dim, std::size_t max_facets) {
  for (;;) {
    std::size_t n = 1 + rng() % max_dim;
    int kind = static_cast<int>(rng() % 3);
    std::vector<LatticeVector> normals;
    for (std::size_t i = 0; i < n; ++i) {
      LatticeVector e(n, 0);
      e[i] = 1;
      normals.push_back(e);
    }
    if (kind == 0) normals.push_back(LatticeVector(n, -1));
    if (kind == 1) {
      for (std::size_t i = 0; i < n; ++i) {
        LatticeVector e(n, 0);
        e[i] = -1;
        normals.push_back(e);
      }
    }
    if (normals.size() > max_facets) continue;
    std::vector<Rational> offsets;
    for (std::size_t j = 0; j < normals.size(); ++j) offsets.push_back(Rational(1 + static_cast<long>(rng() % 3)));
    DelzantPolyhedron P = make(n, normals, offsets);
    std::size_t cuts = rng() % 3;
    for (std::size_t c = 0; c < cuts && P.num_facets() < max_facets; ++c) {
      auto Q = corner_cut(P, rng);
      if (Q) P = *Q;
    }
    IntMatrix A = random_unimodular(n, rng());
    return transform_normals(P, A);
  }
}

/// Random element of Gamma_R: a small non-negative combination of the
/// (lambda_j, nu_j) plus s*(1,0).
inline ConeElement random_gamma_element(const DelzantPolyhedron& P, std::mt19937_64& rng, int max_coeff = 2,
                                        const std::vector<Rational>& shifts = {Rational(0), Rational(1, 2),
                                                                              Rational(1)}) {
  ConeElement c{shifts[rng() % shifts.size()], LatticeVector(P.dim(), 0)};
  for (std::size_t j = 0; j < P.num_facets(); ++j) {
    long m = static_cast<long>(rng() % (max_coeff + 1));
    c.lambda += Rational(m) * P.offset(j);
    for (std::size_t i = 0; i < P.dim(); ++i) c.nu[i] += m * P.normal(j)[i];
  }
  return c;
}

struct BruteDecomposition {
  Rational s;
  std::vector<std::int64_t> t;
  bool operator<(const BruteDecomposition& o) const { return t != o.t ? t < o.t : s < o.s; }
};

/// Every c = s(1,0) + sum t_j (lambda_j, nu_j) with s >= 0, t_j <= bound and
/// support of t a set of facets with non-empty intersection (tested by LP,
/// not by the cone machinery).
inline std::vector<BruteDecomposition> brute_decompositions(const DelzantPolyhedron& P, const ConeElement& c,
                                                            std::int64_t bound) {
  const std::size_t N = P.num_facets();
  std::vector<BruteDecomposition> out;
  std::vector<std::int64_t> t(N, 0);
  std::map<FacetSet, bool> face_cache;
  auto is_face = [&](FacetSet J) {
    auto it = face_cache.find(J);
    if (it != face_cache.end()) return it->second;
    bool f = J == 0 || facet_intersection_nonempty(P, J);
    face_cache[J] = f;
    return f;
  };
  std::function<void(std::size_t, FacetSet)> rec = [&](std::size_t j, FacetSet support) {
    if (j == N) {
      LatticeVector nu(P.dim(), 0);
      Rational lam = 0;
      for (std::size_t k = 0; k < N; ++k) {
        lam += Rational(static_cast<long>(t[k])) * P.offset(k);
        for (std::size_t i = 0; i < P.dim(); ++i) nu[i] += t[k] * P.normal(k)[i];
      }
      if (nu != c.nu) return;
      Rational s = c.lambda - lam;
      if (sgn(s) < 0) return;
      out.push_back({s, t});
      return;
    }
    for (std::int64_t e = 0; e <= bound; ++e) {
      FacetSet next = e ? support | (FacetSet(1) << j) : support;
      if (e == 1 && !is_face(next)) break;
      t[j] = e;
      rec(j + 1, next);
    }
    t[j] = 0;
  };
  rec(0, 0);
  return out;
}

/// Number of degree-d monomials whose support has non-empty facet
/// intersection, by direct enumeration with LP face tests.
inline std::uint64_t brute_sr_count(const DelzantPolyhedron& P, std::size_t d) {
  const std::size_t N = P.num_facets();
  std::uint64_t count = 0;
  std::vector<std::int64_t> t(N, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t j, std::size_t left) {
    if (j + 1 == N) {
      t[j] = static_cast<std::int64_t>(left);
      FacetSet J = 0;
      for (std::size_t k = 0; k < N; ++k) {
        if (t[k]) J |= FacetSet(1) << k;
      }
      if (J == 0 || facet_intersection_nonempty(P, J)) ++count;
      return;
    }
    for (std::size_t e = 0; e <= left; ++e) {
      t[j] = static_cast<std::int64_t>(e);
      rec(j + 1, left - e);
    }
  };
  rec(0, d);
  return count;
}

/// T-polynomial helpers for hand-written expectations.
inline TPoly T(long power, long coeff = 1) {
  TPoly p(static_cast<std::size_t>(power) + 1, Rational(0));
  p.back() = coeff;
  return p;
}

inline std::size_t basis_index(const std::vector<BasisElement>& basis, const std::string& name) {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].name == name) return i;
  }
  return basis.size();
}

/// (e_a e_b) e_c and e_a (e_b e_c) as coordinate vectors.
inline std::vector<TPoly> product_with(const std::vector<std::vector<std::vector<TPoly>>>& table,
                                       const std::vector<TPoly>& x, std::size_t c) {
  std::vector<TPoly> out(table.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (x[d].empty()) continue;
    for (std::size_t f = 0; f < table.size(); ++f) out[f] = tpoly_add(out[f], tpoly_mul(x[d], table[d][c][f]));
  }
  return out;
}

}  // namespace testing_support
