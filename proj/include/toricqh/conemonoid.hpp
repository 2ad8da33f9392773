#pragma once

// The cone C spanned by (1,0) and the (lambda_j, nu_j), its height function,
// intersecting-sum decompositions, the monoids Gamma and G, and truncated
// monoid-ring arithmetic.

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "json.hpp"
#include "toricqh/exactmath.hpp"
#include "toricqh/polyhedron.hpp"

namespace toricqh {

struct ConeElement {
  Rational lambda;
  LatticeVector nu;

  friend bool operator==(const ConeElement&, const ConeElement&) = default;
};

ConeElement operator+(const ConeElement& a, const ConeElement& b);

/// theta_v(lambda, nu) = lambda + <v, nu>
Rational theta(const Vertex& v, const ConeElement& c);

/// c = s (1,0) + sum_j t_j (lambda_j, nu_j) with intersecting support.
struct Decomposition {
  Rational s;
  RatVector t;
  std::size_t vertex = 0;  // a vertex attaining the height
};

/// An element of Gamma together with its canonical decomposition.
struct GammaMonomial {
  Rational lambda;
  LatticeVector nu;
  Rational height;
  std::vector<std::int64_t> t;

  ConeElement element() const { return {lambda, nu}; }
  std::int64_t degree() const;
  FacetSet support() const;

  friend bool operator==(const GammaMonomial& a, const GammaMonomial& b) {
    return a.lambda == b.lambda && a.nu == b.nu;
  }
};

/// Total order by (height, lex nu, lambda).
struct MonomialOrder {
  bool operator()(const GammaMonomial& a, const GammaMonomial& b) const;
};

class ConeContext {
 public:
  /// Requires a vertex and exactly n facets at every vertex; throws
  /// PreconditionError otherwise.
  explicit ConeContext(const DelzantPolyhedron& P);

  const DelzantPolyhedron& polyhedron() const { return P_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  std::size_t dim() const { return P_.dim(); }
  std::size_t num_facets() const { return P_.num_facets(); }
  bool is_face(FacetSet J) const;

  /// theta >= 0 at every vertex and nu in the rational cone of the normals
  /// (exact LP).
  bool in_cone(const ConeElement& c) const;

  /// Decomposition at a height-minimizing vertex; nullopt when c is not in C.
  /// Uses no LP: membership is equivalent to h >= 0 and t >= 0 there.
  std::optional<Decomposition> try_decompose(const ConeElement& c) const;

  /// Throws PreconditionError when c is not in C.
  Decomposition intersecting_sum(const ConeElement& c) const;
  Rational height(const ConeElement& c) const;

  /// Canonical monomial; throws PreconditionError outside C and
  /// PropertyFailure when the decomposition is not integral.
  GammaMonomial monomial(const ConeElement& c) const;
  std::optional<GammaMonomial> try_monomial(const ConeElement& c) const;

  /// T^h * prod v_j^{t_j}, provided the support of t is a face.
  GammaMonomial from_exponents(const std::vector<std::int64_t>& t, const Rational& h = 0) const;

  GammaMonomial generator(std::size_t j) const;  // v_j
  GammaMonomial unit() const;
  GammaMonomial T(const Rational& h) const;

  GammaMonomial multiply(const GammaMonomial& a, const GammaMonomial& b) const;

  /// nu integral (by type) and c in C.
  bool gamma_membership(const ConeElement& c) const { return in_cone(c); }
  /// Monotone Gamma generated by (1,0) and (1,nu_j); requires offsets 1.
  bool monotone_gamma_membership(const ConeElement& c) const;

 private:
  DelzantPolyhedron P_;
  std::vector<Vertex> vertices_;
  std::vector<std::vector<RatVector>> inverse_;  // (incident normals)^T inverse
  std::vector<FacetSet> maximal_faces_;
};

struct HeightMonoid {
  std::vector<Rational> generators;  // sorted, distinct, includes theta values equal to 0
  Rational cutoff;
  std::vector<Rational> elements;  // G below the cutoff, strictly increasing, starts at 0

  bool contains(const Rational& h) const;
  std::size_t index_of(const Rational& h) const;  // throws if absent
};

/// G generated by all theta_v(lambda_j, nu_j) and `extra`, enumerated below g.
HeightMonoid build_height_monoid(const ConeContext& ctx, const std::vector<Rational>& extra,
                                 const Rational& g);

/// gamma_membership restricted to heights in G below the cutoff.
bool gamma_membership(const ConeContext& ctx, const ConeElement& c, const HeightMonoid& G);

/// Finite sum of monomials with non-zero rational coefficients.
class FilteredElement {
 public:
  using Terms = std::map<GammaMonomial, Rational, MonomialOrder>;

  FilteredElement() = default;
  FilteredElement(const GammaMonomial& m, const Rational& coeff = 1) { add(m, coeff); }

  void add(const GammaMonomial& m, const Rational& coeff);
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  /// Minimum height over the support; nullopt for zero.
  std::optional<Rational> height() const;
  Rational coefficient(const GammaMonomial& m) const;

  FilteredElement& operator+=(const FilteredElement& o);
  FilteredElement& operator-=(const FilteredElement& o);
  FilteredElement scaled(const Rational& c) const;

  friend FilteredElement operator+(FilteredElement a, const FilteredElement& b) { return a += b; }
  friend FilteredElement operator-(FilteredElement a, const FilteredElement& b) { return a -= b; }
  friend bool operator==(const FilteredElement& a, const FilteredElement& b) {
    return a.terms_ == b.terms_;
  }

 private:
  Terms terms_;
};

FilteredElement multiply(const ConeContext& ctx, const FilteredElement& x, const FilteredElement& y);

/// Drops monomials of height >= g.
FilteredElement truncate(const FilteredElement& x, const Rational& g);

/// All (k, nu) in the monotone Gamma, sorted lexicographically by nu.
std::vector<GammaMonomial> enumerate_gamma_degree(const ConeContext& ctx, std::size_t k);

/// i-th output multiplies each monomial by the i-th coordinate of its nu.
std::vector<FilteredElement> log_derivative_generators(const FilteredElement& W, std::size_t n);

nlohmann::json to_json(const FilteredElement& x);
/// Throws ParseError on malformed input, PreconditionError outside Gamma.
FilteredElement filtered_from_json(const ConeContext& ctx, const nlohmann::json& j);

}  // namespace toricqh
