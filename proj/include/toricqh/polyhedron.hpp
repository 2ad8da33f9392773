#pragma once

// Delzant polyhedra { x : <x, nu_j> >= -lambda_j } with primitive integer
// normals and positive rational offsets. Facets are 0-based internally and
// printed 1-based.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "toricqh/exactmath.hpp"

namespace toricqh {

using LatticeVector = std::vector<std::int64_t>;
using FacetSet = std::uint64_t;  // bit j set <=> facet j

struct Facet {
  LatticeVector normal;
  Rational offset;
};

class DelzantPolyhedron {
 public:
  /// Validates dimension, primitivity, positive offsets and irredundancy
  /// (by exact LP); throws ParseError on violation. Vertex existence and the
  /// Delzant condition are queried separately.
  DelzantPolyhedron(std::size_t dim, std::vector<Facet> facets);

  std::size_t dim() const { return dim_; }
  std::size_t num_facets() const { return facets_.size(); }
  const std::vector<Facet>& facets() const { return facets_; }
  const Facet& facet(std::size_t j) const { return facets_[j]; }
  const LatticeVector& normal(std::size_t j) const { return facets_[j].normal; }
  const Rational& offset(std::size_t j) const { return facets_[j].offset; }

  /// N x n matrix whose rows are the normals.
  IntMatrix normal_matrix() const;

  nlohmann::json to_json() const;
  /// Accepts the polyhedron object itself or any object with a
  /// "polyhedron" member (so reports can be fed back in).
  static DelzantPolyhedron from_json(const nlohmann::json& j);
  static DelzantPolyhedron from_file(const std::string& path);

 private:
  std::size_t dim_;
  std::vector<Facet> facets_;
};

struct Vertex {
  RatVector point;
  std::vector<std::size_t> incident;  // sorted facet indices
  FacetSet incident_mask = 0;
};

/// Every vertex exactly once, sorted by coordinates.
std::vector<Vertex> enumerate_vertices(const DelzantPolyhedron& P);

struct DelzantViolation {
  RatVector vertex;
  std::vector<std::size_t> incident;
  Integer determinant;  // 0 when |incident| != n
  std::string message;
};

struct DelzantReport {
  bool passed = true;
  std::vector<DelzantViolation> violations;
};

DelzantReport check_delzant(const DelzantPolyhedron& P);

struct SplittingReport {
  bool has_vertex = false;
  std::size_t split_rank = 0;
  std::vector<IntVector> annihilator_basis;
};

SplittingReport check_vertex_and_splitting(const DelzantPolyhedron& P);

bool is_compact(const DelzantPolyhedron& P);

/// Exact LP feasibility of the face cut out by the facets in J.
bool facet_intersection_nonempty(const DelzantPolyhedron& P, FacetSet J);

/// Face test from vertex incidence; agrees with the LP when P has a vertex.
class FaceOracle {
 public:
  explicit FaceOracle(const DelzantPolyhedron& P);
  bool is_face(FacetSet J) const;
  const std::vector<FacetSet>& maximal_faces() const { return maximal_; }

 private:
  std::vector<FacetSet> maximal_;
};

std::vector<FacetSet> minimal_nonfaces(const DelzantPolyhedron& P);

struct MonotoneNormalization {
  RatVector b;
  Rational lambda;
  bool rescaled = false;
  DelzantPolyhedron normalized;  // offsets all equal to 1
};

std::optional<MonotoneNormalization> monotone_normalization(const DelzantPolyhedron& P);

/// Same polyhedron with every normal replaced by A * normal.
DelzantPolyhedron transform_normals(const DelzantPolyhedron& P, const IntMatrix& A);

std::vector<std::size_t> facet_list(FacetSet J);
FacetSet facet_mask(const std::vector<std::size_t>& J);
std::string format_facet_set(FacetSet J);  // "{1,3}"

}  // namespace toricqh
