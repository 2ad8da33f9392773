#pragma once

// Classical and monotone quantum presentations, quantum Stanley-Reisner
// relations, divisor-inverse certificates, B-field rescaling and the
// truncated generalised-Jacobian freeness check.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "toricqh/conemonoid.hpp"
#include "toricqh/field.hpp"
#include "toricqh/polyhedron.hpp"

namespace toricqh {

/// Integers, rationals or F_p. Linear algebra over Z runs over Q with an
/// additional Smith-form check that every graded quotient is free on the
/// chosen basis.
struct CoefficientRing {
  enum class Kind { Integers, Rationals, Prime };
  Kind kind = Kind::Integers;
  std::uint64_t p = 0;

  static CoefficientRing integers() { return {}; }
  static CoefficientRing rationals() { return {Kind::Rationals, 0}; }
  static CoefficientRing prime_field(std::uint64_t p);
  /// "z", "q" or "fp:P"
  static CoefficientRing parse(const std::string& text);

  FieldSpec field() const;
  std::string name() const;
  bool is_integers() const { return kind == Kind::Integers; }
};

using Exponents = std::vector<std::int64_t>;

/// "1", "v2", "v3^2", "v1*v2"
std::string monomial_name(const Exponents& t);

/// Coefficients of T^0, T^1, ...; trailing zeros trimmed.
using TPoly = std::vector<Rational>;
std::string format_tpoly(const TPoly& p);  // "T^2 - 3*T"
TPoly tpoly_mul(const TPoly& a, const TPoly& b);
TPoly tpoly_add(const TPoly& a, const TPoly& b);
void tpoly_trim(TPoly& p);

struct BasisElement {
  Exponents exponents;
  std::int64_t degree = 0;
  LatticeVector nu;
  std::string name;
};

/// "T*v2 + (T^2 - 1)*v3" from coordinates on a basis.
std::string format_combination(const std::vector<TPoly>& coords, const std::vector<BasisElement>& basis);

struct PresentationOptions {
  CoefficientRing ring;
  std::vector<Rational> rho;                     // empty: all ones
  std::optional<std::vector<Exponents>> basis;   // forced basis instead of greedy
  std::size_t margin = 0;                        // quantum degree bound is 2n + margin
};

struct RingPresentation {
  CoefficientRing ring;
  std::size_t n = 0;
  std::size_t N = 0;
  std::vector<Rational> rho;
  std::vector<std::vector<std::int64_t>> linear_relations;  // c_i = sum_j nu_ji Z_j
  std::vector<FacetSet> monomial_relations;                 // minimal non-faces
  std::vector<BasisElement> basis;
  std::vector<std::size_t> ranks;                           // degrees 0..n
  /// table[a][b][c]: coefficient of e_c in e_a * e_b
  std::vector<std::vector<std::vector<Rational>>> table;
};

RingPresentation classical_presentation(const DelzantPolyhedron& P, const PresentationOptions& opts = {});

struct QuantumSRRelation {
  FacetSet J = 0;
  Rational height;
  Exponents t;
  Rational coefficient = 1;  // prod_{J} rho / prod rho^t under a B-field
};

/// For each minimal non-face J: prod_{j in J} v_j = T^h prod v_j^{t_j}.
std::vector<QuantumSRRelation> quantum_sr_relations(const DelzantPolyhedron& P,
                                                    const std::vector<Rational>& rho = {});
std::string format_relation(const QuantumSRRelation& r);  // "v1*v3 = T*v2"

struct QuantumState;

struct QuantumPresentation {
  CoefficientRing ring;
  std::size_t n = 0;
  std::size_t N = 0;
  std::vector<Rational> rho;
  RatVector translation;  // b in lambda_j = lambda + <b, nu_j>
  Rational lambda;
  bool rescaled = false;
  std::vector<std::vector<std::int64_t>> linear_relations;
  std::vector<QuantumSRRelation> sr_relations;
  std::vector<BasisElement> basis;
  std::size_t degree_bound = 0;
  std::vector<std::size_t> slice_sizes;  // monomials of T-degree k
  std::vector<std::size_t> slice_ranks;  // #{i : deg e_i <= k}
  /// table[a][b][c]: T-polynomial coefficient of e_c in e_a * e_b
  std::vector<std::vector<std::vector<TPoly>>> table;

  std::shared_ptr<const QuantumState> state;
};

/// Normalizes to offsets 1 first; PreconditionError when not monotone,
/// PropertyFailure on torsion or rank mismatch.
QuantumPresentation quantum_presentation(const DelzantPolyhedron& P, const PresentationOptions& opts = {});

/// Coordinates on the basis (in the rescaled generators when rho is set).
/// Monomials are read in the normalized polyhedron (lambda = T-degree).
std::vector<TPoly> reduce_to_basis(const FilteredElement& x, const QuantumPresentation& Q);
/// Context of the normalized polyhedron used by Q.
const ConeContext& quantum_context(const QuantumPresentation& Q);

struct KSRow {
  std::string label;
  std::vector<TPoly> coordinates;
};

/// H_j -> coordinates of v_j, followed by every classical basis monomial.
std::vector<KSRow> kodaira_spencer_table(const QuantumPresentation& Q);

struct DivisorCertificate {
  std::size_t j = 0;
  Exponents m;
  Rational exponent;
  bool verified = false;
};

/// PreconditionError for non-compact input.
DivisorCertificate divisor_inverse_certificate(const DelzantPolyhedron& P, std::size_t j);

struct BFieldResult {
  std::vector<Rational> rho;
  RingPresentation classical;
  std::optional<QuantumPresentation> quantum;  // when monotone
  std::vector<QuantumSRRelation> sr_relations;
};

BFieldResult apply_bfield(const DelzantPolyhedron& P, const std::vector<Rational>& rho,
                          const CoefficientRing& ring, std::size_t margin = 0);

struct JacobianReport {
  Rational cutoff;
  HeightMonoid G;
  FieldSpec field;
  std::size_t dim_R = 0;
  std::size_t dim_S = 0;   // monomials kept after degree truncation
  std::size_t dim_SJ = 0;  // dim of the truncated quotient
  std::size_t m = 0;
  std::vector<BasisElement> basis;
  bool free = false;
  std::string witness;
  std::vector<std::size_t> degree_caps;  // per height level
  std::string note;
};

/// perturbations[j] is added to rho_j v_j; every term must have positive
/// height. `extra_heights` joins the generators of G.
JacobianReport jacobian_freeness(const DelzantPolyhedron& P,
                                 const std::vector<FilteredElement>& perturbations,
                                 const std::vector<Rational>& rho, const Rational& g,
                                 const FieldSpec& field,
                                 const std::vector<Rational>& extra_heights = {});

struct AuditCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AuditReport {
  IntMatrix change_of_basis;
  std::vector<AuditCheck> checks;
  bool passed = false;
};

/// Recomputes everything after nu_j -> A nu_j and compares. With no matrix a
/// random unimodular one is drawn from `seed`.
AuditReport basis_independence_audit(const DelzantPolyhedron& P,
                                     const std::optional<IntMatrix>& A = std::nullopt,
                                     std::uint64_t seed = 1);

/// Random unimodular n x n matrix (product of elementary moves).
IntMatrix random_unimodular(std::size_t n, std::uint64_t seed);

}  // namespace toricqh
