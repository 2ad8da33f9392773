#pragma once

// Nerve complexes, reduced simplicial homology, Reisner's criterion and
// Stanley-Reisner Hilbert functions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "toricqh/field.hpp"
#include "toricqh/polyhedron.hpp"

namespace toricqh {

/// Downward-closed family of subsets of {0..ground-1}, stored by its maximal
/// faces. The complex {empty set} has the single maximal face 0.
class SimplicialComplex {
 public:
  SimplicialComplex(std::size_t ground, std::vector<FacetSet> generators);

  std::size_t ground_size() const { return ground_; }
  const std::vector<FacetSet>& maximal_faces() const { return maximal_; }
  bool contains(FacetSet face) const;
  /// Every face including the empty one, sorted by (size, mask).
  std::vector<FacetSet> faces() const;
  /// Largest face size minus one.
  int dimension() const;
  /// Number of faces of each size 0..dim+1.
  std::vector<std::size_t> f_vector() const;

  /// { G : G disjoint from face, G | face in K }; throws if face is not in K.
  SimplicialComplex link(FacetSet face) const;

 private:
  std::size_t ground_;
  std::vector<FacetSet> maximal_;
};

/// Nerve of the facets: faces are facet subsets with non-empty intersection.
SimplicialComplex build_nerve(const DelzantPolyhedron& P);

struct HomologyProfile {
  FieldSpec field;
  /// betti[d + 1] is the rank of reduced homology in degree d, d >= -1.
  std::vector<std::size_t> betti;
  std::vector<std::size_t> f_vector;

  std::size_t reduced_betti(int degree) const;
  /// Sum (-1)^d dim C_d over faces of size d+1, including the empty face.
  long euler_from_faces() const;
  long euler_from_betti() const;
};

HomologyProfile reduced_homology(const SimplicialComplex& K, const FieldSpec& field);

struct CMVerdict {
  bool passed = true;
  std::optional<FacetSet> witness_face;  // link with low-degree homology
  int witness_degree = 0;
};

CMVerdict reisner_cm_check(const SimplicialComplex& K, const FieldSpec& field);

struct SphereBallReport {
  bool compact = false;
  std::size_t n = 0;
  HomologyProfile rational;
  HomologyProfile mod2;
  bool matches = false;
  std::string expected;  // "S^k" or "B^k"
};

SphereBallReport sphere_or_ball_profile(const DelzantPolyhedron& P);

/// Number of degree-d monomials supported on faces, d = 0..maxdeg.
std::vector<std::uint64_t> sr_hilbert_function(const SimplicialComplex& K, std::size_t maxdeg);
std::vector<std::uint64_t> sr_hilbert_function(const DelzantPolyhedron& P, std::size_t maxdeg);

/// Exponent vectors of degree d whose support is a face; lexicographic order.
std::vector<std::vector<std::int64_t>> face_monomials(const SimplicialComplex& K, std::size_t d);

struct RegularSequenceVerdict {
  bool passed = false;
  FieldSpec field;
  std::vector<std::uint64_t> hilbert;   // H_SR(d)
  std::vector<long> expected;           // coefficients of (1-t)^n H_SR(t)
  std::vector<std::uint64_t> quotient;  // dim SR_d / sum c_i SR_{d-1}
  std::uint64_t total = 0;
};

RegularSequenceVerdict regular_sequence_check(const DelzantPolyhedron& P, const FieldSpec& field,
                                              std::size_t maxdeg);

}  // namespace toricqh
