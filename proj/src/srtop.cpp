#include "toricqh/srtop.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "toricqh/errors.hpp"
#include "toricqh/sparse.hpp"

namespace toricqh {

namespace {

bool by_size_then_mask(FacetSet a, FacetSet b) {
  auto pa = std::popcount(a), pb = std::popcount(b);
  return pa != pb ? pa < pb : a < b;
}

std::vector<FacetSet> keep_maximal(std::vector<FacetSet> sets) {
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  std::vector<FacetSet> out;
  for (auto F : sets) {
    bool dominated = std::any_of(sets.begin(), sets.end(),
                                 [&](FacetSet G) { return G != F && (F & G) == F; });
    if (!dominated) out.push_back(F);
  }
  std::sort(out.begin(), out.end(), by_size_then_mask);
  return out;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

template <class F>
std::size_t boundary_rank(const F& field, const std::vector<FacetSet>& upper,
                          const std::map<FacetSet, std::size_t>& lower_index) {
  RowReducer<F> red(field, lower_index.size());
  for (auto face : upper) {
    SparseRow<typename F::Elem> row;
    int sign = 1;
    for (auto j : facet_list(face)) {
      FacetSet sub = face & ~(FacetSet(1) << j);
      row.emplace_back(lower_index.at(sub), sign > 0 ? field.one() : field.neg(field.one()));
      sign = -sign;
    }
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    red.insert(row);
  }
  return red.rank();
}

void collect_monomials(const SimplicialComplex& K, std::size_t j, std::size_t remaining,
                       FacetSet support, std::vector<std::int64_t>& cur,
                       std::vector<std::vector<std::int64_t>>& out) {
  if (j == K.ground_size()) {
    if (remaining == 0) out.push_back(cur);
    return;
  }
  for (std::size_t e = 0; e <= remaining; ++e) {
    FacetSet s = e ? support | (FacetSet(1) << j) : support;
    if (e && !K.contains(s)) break;
    cur[j] = static_cast<std::int64_t>(e);
    collect_monomials(K, j + 1, remaining - e, s, cur, out);
  }
  cur[j] = 0;
}

}  // namespace

SimplicialComplex::SimplicialComplex(std::size_t ground, std::vector<FacetSet> generators)
    : ground_(ground) {
  if (ground_ > 63) throw PreconditionError("complex ground set too large");
  if (generators.empty()) generators.push_back(0);
  maximal_ = keep_maximal(std::move(generators));
}

bool SimplicialComplex::contains(FacetSet face) const {
  return std::any_of(maximal_.begin(), maximal_.end(), [&](FacetSet F) { return (face & F) == face; });
}

std::vector<FacetSet> SimplicialComplex::faces() const {
  std::vector<FacetSet> out;
  for (auto F : maximal_) {
    for (FacetSet s = F;; s = (s - 1) & F) {
      out.push_back(s);
      if (s == 0) break;
    }
  }
  std::sort(out.begin(), out.end(), by_size_then_mask);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int SimplicialComplex::dimension() const {
  int d = -1;
  for (auto F : maximal_) d = std::max(d, std::popcount(F) - 1);
  return d;
}

std::vector<std::size_t> SimplicialComplex::f_vector() const {
  std::vector<std::size_t> f(static_cast<std::size_t>(dimension() + 2), 0);
  for (auto F : faces()) ++f[static_cast<std::size_t>(std::popcount(F))];
  return f;
}

SimplicialComplex SimplicialComplex::link(FacetSet face) const {
  if (!contains(face)) throw PreconditionError("link of a non-face " + format_facet_set(face));
  std::vector<FacetSet> gens;
  for (auto F : maximal_) {
    if ((face & F) == face) gens.push_back(F & ~face);
  }
  return SimplicialComplex(ground_, gens);
}

SimplicialComplex build_nerve(const DelzantPolyhedron& P) {
  return SimplicialComplex(P.num_facets(), FaceOracle(P).maximal_faces());
}

// ---------------------------------------------------------------------------

std::size_t HomologyProfile::reduced_betti(int degree) const {
  auto idx = static_cast<std::size_t>(degree + 1);
  return degree >= -1 && idx < betti.size() ? betti[idx] : 0;
}

long HomologyProfile::euler_from_faces() const {
  long e = 0;
  for (std::size_t s = 0; s < f_vector.size(); ++s) {
    long term = static_cast<long>(f_vector[s]);
    e += (s % 2 == 1) ? term : -term;  // degree s-1
  }
  return e;
}

long HomologyProfile::euler_from_betti() const {
  long e = 0;
  for (std::size_t s = 0; s < betti.size(); ++s) {
    long term = static_cast<long>(betti[s]);
    e += (s % 2 == 1) ? term : -term;
  }
  return e;
}

HomologyProfile reduced_homology(const SimplicialComplex& K, const FieldSpec& field) {
  HomologyProfile H;
  H.field = field;
  H.f_vector = K.f_vector();
  const std::size_t top = H.f_vector.size();  // sizes 0..top-1

  std::vector<std::vector<FacetSet>> by_size(top);
  for (auto F : K.faces()) by_size[static_cast<std::size_t>(std::popcount(F))].push_back(F);

  // rank[s] = rank of the boundary from size s to size s-1
  std::vector<std::size_t> rank(top + 1, 0);
  with_field(field, [&](auto F) {
    for (std::size_t s = 1; s < top; ++s) {
      std::map<FacetSet, std::size_t> index;
      for (std::size_t i = 0; i < by_size[s - 1].size(); ++i) index[by_size[s - 1][i]] = i;
      rank[s] = boundary_rank(F, by_size[s], index);
    }
    return 0;
  });
  H.betti.resize(top);
  for (std::size_t s = 0; s < top; ++s) {
    H.betti[s] = H.f_vector[s] - rank[s] - rank[s + 1];
  }
  return H;
}

CMVerdict reisner_cm_check(const SimplicialComplex& K, const FieldSpec& field) {
  CMVerdict v;
  for (auto face : K.faces()) {
    SimplicialComplex L = K.link(face);
    HomologyProfile H = reduced_homology(L, field);
    for (int d = -1; d < L.dimension(); ++d) {
      if (H.reduced_betti(d) != 0) {
        v.passed = false;
        v.witness_face = face;
        v.witness_degree = d;
        return v;
      }
    }
  }
  return v;
}

SphereBallReport sphere_or_ball_profile(const DelzantPolyhedron& P) {
  if (!check_delzant(P).passed) throw PreconditionError("polyhedron is not Delzant");
  SphereBallReport r;
  r.compact = is_compact(P);
  r.n = P.dim();
  SimplicialComplex K = build_nerve(P);
  r.rational = reduced_homology(K, FieldSpec::rationals());
  r.mod2 = reduced_homology(K, FieldSpec::prime_field(2));
  const int sphere_degree = static_cast<int>(r.n) - 1;
  r.expected = (r.compact ? "S^" : "B^") + std::to_string(sphere_degree);
  auto fits = [&](const HomologyProfile& H) {
    for (int d = -1; d <= static_cast<int>(H.betti.size()); ++d) {
      std::size_t want = (r.compact && d == sphere_degree) ? 1 : 0;
      if (H.reduced_betti(d) != want) return false;
    }
    return true;
  };
  r.matches = fits(r.rational) && fits(r.mod2);
  return r;
}

std::vector<std::uint64_t> sr_hilbert_function(const SimplicialComplex& K, std::size_t maxdeg) {
  std::vector<std::uint64_t> h(maxdeg + 1, 0);
  h[0] = 1;
  auto f = K.f_vector();
  for (std::size_t d = 1; d <= maxdeg; ++d) {
    for (std::size_t s = 1; s < f.size(); ++s) h[d] += f[s] * binomial(d - 1, s - 1);
  }
  return h;
}

std::vector<std::uint64_t> sr_hilbert_function(const DelzantPolyhedron& P, std::size_t maxdeg) {
  return sr_hilbert_function(build_nerve(P), maxdeg);
}

std::vector<std::vector<std::int64_t>> face_monomials(const SimplicialComplex& K, std::size_t d) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> cur(K.ground_size(), 0);
  collect_monomials(K, 0, d, 0, cur, out);
  return out;
}

RegularSequenceVerdict regular_sequence_check(const DelzantPolyhedron& P, const FieldSpec& field,
                                              std::size_t maxdeg) {
  if (!check_delzant(P).passed) throw PreconditionError("polyhedron is not Delzant");
  const std::size_t n = P.dim();
  const std::size_t N = P.num_facets();
  if (maxdeg < n) throw PreconditionError("maximal degree must be at least the dimension");
  SimplicialComplex K = build_nerve(P);

  RegularSequenceVerdict v;
  v.field = field;
  v.hilbert = sr_hilbert_function(K, maxdeg);
  for (std::size_t d = 0; d <= maxdeg; ++d) {
    long e = 0;
    for (std::size_t k = 0; k <= std::min(n, d); ++k) {
      long term = static_cast<long>(binomial(n, k) * v.hilbert[d - k]);
      e += (k % 2 == 0) ? term : -term;
    }
    v.expected.push_back(e);
  }

  std::vector<std::vector<std::int64_t>> prev;
  with_field(field, [&](auto F) {
    using Elem = typename decltype(F)::Elem;
    for (std::size_t d = 0; d <= maxdeg; ++d) {
      auto cur = face_monomials(K, d);
      std::map<std::vector<std::int64_t>, std::size_t> index;
      for (std::size_t c = 0; c < cur.size(); ++c) index[cur[c]] = c;
      RowReducer<decltype(F)> red(F, cur.size());
      for (const auto& u : prev) {
        for (std::size_t i = 0; i < n; ++i) {
          SparseRow<Elem> row;
          for (std::size_t j = 0; j < N; ++j) {
            if (P.normal(j)[i] == 0) continue;
            auto w = u;
            ++w[j];
            auto it = index.find(w);
            if (it == index.end()) continue;  // support left the nerve
            row.emplace_back(it->second, F.from_int(static_cast<long>(P.normal(j)[i])));
          }
          std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
          red.insert(row);
        }
      }
      v.quotient.push_back(cur.size() - red.rank());
      prev = std::move(cur);
    }
    return 0;
  });

  v.passed = true;
  for (std::size_t d = 0; d <= maxdeg; ++d) {
    v.total += v.quotient[d];
    if (static_cast<long>(v.quotient[d]) != v.expected[d]) v.passed = false;
  }
  return v;
}

}  // namespace toricqh
