#include "toricqh/polyhedron.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "toricqh/errors.hpp"
#include "toricqh/lp.hpp"

namespace toricqh {

namespace {

constexpr std::size_t kMaxFacets = 63;

Rational dot(const RatVector& x, const LatticeVector& nu) {
  Rational s = 0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu[i] != 0) s += x[i] * Rational(static_cast<long>(nu[i]));
  }
  return s;
}

// Calls fn on every k-subset of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Constraints <x,nu_j> (=|>=) -lambda_j over free x, leaving room for extras.
LinearProgram face_program(const DelzantPolyhedron& P, FacetSet equalities, std::size_t extra_vars) {
  LinearProgram lp;
  lp.num_vars = P.dim() + extra_vars;
  lp.free_var.assign(lp.num_vars, false);
  for (std::size_t i = 0; i < P.dim(); ++i) lp.free_var[i] = true;
  for (std::size_t j = 0; j < P.num_facets(); ++j) {
    RatVector row(lp.num_vars, Rational(0));
    for (std::size_t i = 0; i < P.dim(); ++i) row[i] = Rational(static_cast<long>(P.normal(j)[i]));
    Sense s = (equalities >> j) & 1 ? Sense::Equal : Sense::GreaterEq;
    lp.add(std::move(row), s, -P.offset(j));
  }
  return lp;
}

bool facet_irredundant(const DelzantPolyhedron& P, std::size_t j) {
  // maximize eps subject to x on facet j and strictly inside all others by eps
  LinearProgram lp = face_program(P, FacetSet(1) << j, 1);
  const std::size_t eps = P.dim();
  for (std::size_t k = 0; k < P.num_facets(); ++k) {
    if (k != j) lp.constraints[k].coeffs[eps] = -1;
  }
  RatVector cap(lp.num_vars, Rational(0));
  cap[eps] = 1;
  lp.add(cap, Sense::LessEq, Rational(1));
  lp.objective = cap;
  LPResult r = solve_lp(lp);
  return r.status == LPStatus::Optimal && sgn(r.value) > 0;
}

}  // namespace

std::vector<std::size_t> facet_list(FacetSet J) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; J; ++j, J >>= 1) {
    if (J & 1) out.push_back(j);
  }
  return out;
}

FacetSet facet_mask(const std::vector<std::size_t>& J) {
  FacetSet m = 0;
  for (auto j : J) m |= FacetSet(1) << j;
  return m;
}

std::string format_facet_set(FacetSet J) {
  std::string s = "{";
  bool first = true;
  for (auto j : facet_list(J)) {
    if (!first) s += ",";
    s += std::to_string(j + 1);
    first = false;
  }
  return s + "}";
}

// ---------------------------------------------------------------------------

DelzantPolyhedron::DelzantPolyhedron(std::size_t dim, std::vector<Facet> facets)
    : dim_(dim), facets_(std::move(facets)) {
  if (dim_ == 0) throw ParseError("dimension must be positive");
  if (facets_.empty()) throw ParseError("at least one facet is required");
  if (facets_.size() > kMaxFacets) throw ParseError("too many facets (limit 63)");
  for (std::size_t j = 0; j < facets_.size(); ++j) {
    const auto& f = facets_[j];
    std::string label = "facet " + std::to_string(j + 1);
    if (f.normal.size() != dim_) throw ParseError(label + ": normal has wrong length");
    std::int64_t g = 0;
    for (auto e : f.normal) g = std::gcd(g, e);
    if (g == 0) throw ParseError(label + ": zero normal");
    if (g != 1) throw ParseError(label + ": normal is not primitive (gcd " + std::to_string(g) + ")");
    if (sgn(f.offset) <= 0) throw ParseError(label + ": offset must be positive");
  }
  for (std::size_t j = 0; j < facets_.size(); ++j) {
    if (!facet_irredundant(*this, j)) {
      throw ParseError("facet " + std::to_string(j + 1) + " is redundant");
    }
  }
}

IntMatrix DelzantPolyhedron::normal_matrix() const {
  std::vector<LatticeVector> rows;
  for (const auto& f : facets_) rows.push_back(f.normal);
  return IntMatrix::from_rows(rows, dim_);
}

nlohmann::json DelzantPolyhedron::to_json() const {
  nlohmann::json facets = nlohmann::json::array();
  for (const auto& f : facets_) {
    facets.push_back({{"normal", f.normal}, {"offset", to_string(f.offset)}});
  }
  return {{"dim", dim_}, {"facets", facets}};
}

DelzantPolyhedron DelzantPolyhedron::from_json(const nlohmann::json& j) {
  if (j.is_object() && j.contains("polyhedron")) return from_json(j.at("polyhedron"));
  try {
    if (!j.is_object()) throw ParseError("polyhedron must be a JSON object");
    const auto& d = j.at("dim");
    if (!d.is_number_integer() || d.get<long long>() <= 0) throw ParseError("dim must be a positive integer");
    std::size_t dim = d.get<std::size_t>();
    const auto& fs = j.at("facets");
    if (!fs.is_array()) throw ParseError("facets must be an array");
    std::vector<Facet> facets;
    for (const auto& f : fs) {
      Facet facet;
      for (const auto& e : f.at("normal")) {
        if (!e.is_number_integer()) throw ParseError("normal entries must be integers");
        facet.normal.push_back(e.get<std::int64_t>());
      }
      const auto& off = f.at("offset");
      if (off.is_string()) {
        facet.offset = parse_rational(off.get<std::string>());
      } else if (off.is_number_integer()) {
        facet.offset = Rational(static_cast<long>(off.get<std::int64_t>()));
      } else {
        throw ParseError("offset must be an exact fraction string");
      }
      facets.push_back(std::move(facet));
    }
    return DelzantPolyhedron(dim, std::move(facets));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed polyhedron: ") + e.what());
  }
}

DelzantPolyhedron DelzantPolyhedron::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return from_json(j);
}

// ---------------------------------------------------------------------------

std::vector<Vertex> enumerate_vertices(const DelzantPolyhedron& P) {
  const std::size_t n = P.dim();
  const std::size_t N = P.num_facets();
  std::map<RatVector, Vertex> found;
  for_each_subset(N, n, [&](const std::vector<std::size_t>& J) {
    std::vector<LatticeVector> rows;
    RatVector rhs;
    for (auto j : J) {
      rows.push_back(P.normal(j));
      rhs.push_back(-P.offset(j));
    }
    IntMatrix A = IntMatrix::from_rows(rows, n);
    if (determinant(A) == 0) return;
    auto x = solve_rational(A, rhs);
    if (!x || found.count(*x)) return;
    Vertex v;
    v.point = *x;
    for (std::size_t k = 0; k < N; ++k) {
      Rational s = dot(*x, P.normal(k));
      if (s < -P.offset(k)) return;
      if (s == -P.offset(k)) v.incident.push_back(k);
    }
    v.incident_mask = facet_mask(v.incident);
    found.emplace(*x, std::move(v));
  });
  std::vector<Vertex> out;
  for (auto& [k, v] : found) out.push_back(std::move(v));
  return out;
}

DelzantReport check_delzant(const DelzantPolyhedron& P) {
  DelzantReport report;
  for (const auto& v : enumerate_vertices(P)) {
    DelzantViolation bad;
    bad.vertex = v.point;
    bad.incident = v.incident;
    if (v.incident.size() != P.dim()) {
      bad.determinant = 0;
      bad.message = std::to_string(v.incident.size()) + " facets meet at this vertex";
      report.violations.push_back(bad);
      continue;
    }
    std::vector<LatticeVector> rows;
    for (auto j : v.incident) rows.push_back(P.normal(j));
    Integer det = determinant(IntMatrix::from_rows(rows, P.dim()));
    if (abs(det) != 1) {
      bad.determinant = det;
      bad.message = "incident normals have determinant " + to_string(det);
      report.violations.push_back(bad);
    }
  }
  report.passed = report.violations.empty();
  return report;
}

SplittingReport check_vertex_and_splitting(const DelzantPolyhedron& P) {
  IntMatrix M = P.normal_matrix();
  SplittingReport r;
  r.split_rank = P.dim() - rank_over_rationals(M);
  r.has_vertex = r.split_rank == 0;
  if (!r.has_vertex) r.annihilator_basis = integer_kernel(M);
  return r;
}

bool is_compact(const DelzantPolyhedron& P) {
  if (rank_over_rationals(P.normal_matrix()) != P.dim()) return false;
  // y_j >= 1 with sum y_j nu_j = 0
  const std::size_t N = P.num_facets();
  LinearProgram lp;
  lp.num_vars = N;
  for (std::size_t i = 0; i < P.dim(); ++i) {
    RatVector row(N);
    for (std::size_t j = 0; j < N; ++j) row[j] = Rational(static_cast<long>(P.normal(j)[i]));
    lp.add(std::move(row), Sense::Equal, Rational(0));
  }
  for (std::size_t j = 0; j < N; ++j) {
    RatVector row(N, Rational(0));
    row[j] = 1;
    lp.add(std::move(row), Sense::GreaterEq, Rational(1));
  }
  return lp_feasible(lp);
}

bool facet_intersection_nonempty(const DelzantPolyhedron& P, FacetSet J) {
  return lp_feasible(face_program(P, J, 0));
}

FaceOracle::FaceOracle(const DelzantPolyhedron& P) {
  std::vector<FacetSet> faces;
  auto vertices = enumerate_vertices(P);
  if (!vertices.empty()) {
    for (const auto& v : vertices) faces.push_back(v.incident_mask);
  } else {
    const FacetSet all = (FacetSet(1) << P.num_facets()) - 1;
    for (FacetSet J = 0; J <= all; ++J) {
      if (facet_intersection_nonempty(P, J)) faces.push_back(J);
    }
  }
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  for (auto F : faces) {
    bool dominated = std::any_of(faces.begin(), faces.end(),
                                 [&](FacetSet G) { return G != F && (F & G) == F; });
    if (!dominated) maximal_.push_back(F);
  }
}

bool FaceOracle::is_face(FacetSet J) const {
  return std::any_of(maximal_.begin(), maximal_.end(), [&](FacetSet F) { return (J & F) == J; });
}

std::vector<FacetSet> minimal_nonfaces(const DelzantPolyhedron& P) {
  FaceOracle oracle(P);
  const std::size_t N = P.num_facets();
  std::vector<FacetSet> result;
  std::vector<FacetSet> layer = {0};  // faces of the current size
  for (std::size_t size = 1; size <= N && !layer.empty(); ++size) {
    std::vector<FacetSet> next;
    std::vector<FacetSet> candidates;
    for (auto F : layer) {
      std::size_t top = F == 0 ? 0 : static_cast<std::size_t>(std::bit_width(F));
      for (std::size_t j = top; j < N; ++j) candidates.push_back(F | (FacetSet(1) << j));
    }
    for (auto J : candidates) {
      bool boundary_faces = true;
      for (auto j : facet_list(J)) {
        if (!oracle.is_face(J & ~(FacetSet(1) << j))) {
          boundary_faces = false;
          break;
        }
      }
      if (!boundary_faces) continue;
      if (oracle.is_face(J)) {
        next.push_back(J);
      } else {
        result.push_back(J);
      }
    }
    layer = std::move(next);
  }
  std::sort(result.begin(), result.end(), [](FacetSet a, FacetSet b) {
    auto pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return facet_list(a) < facet_list(b);
  });
  return result;
}

std::optional<MonotoneNormalization> monotone_normalization(const DelzantPolyhedron& P) {
  const std::size_t n = P.dim();
  const std::size_t N = P.num_facets();
  RatVector b(n, Rational(0));
  Rational lambda;

  bool equal = std::all_of(P.facets().begin(), P.facets().end(),
                           [&](const Facet& f) { return f.offset == P.offset(0); });
  if (equal) {
    lambda = P.offset(0);
  } else {
    // lambda_j = lambda + <b, nu_j>, unknowns (b, lambda)
    IntMatrix A(N, n + 1);
    RatVector rhs(N);
    for (std::size_t j = 0; j < N; ++j) {
      for (std::size_t i = 0; i < n; ++i) A(j, i) = static_cast<long>(P.normal(j)[i]);
      A(j, n) = 1;
      rhs[j] = P.offset(j);
    }
    auto sol = solve_rational(A, rhs);
    if (!sol) return std::nullopt;
    if (rank_over_rationals(A) == n + 1) {
      b.assign(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(n));
      lambda = (*sol)[n];
    } else {
      // One-parameter family: fix lambda = 1.
      IntMatrix B = P.normal_matrix();
      RatVector shifted(N);
      for (std::size_t j = 0; j < N; ++j) shifted[j] = P.offset(j) - 1;
      auto bsol = solve_rational(B, shifted);
      if (!bsol) return std::nullopt;
      b = *bsol;
      lambda = 1;
    }
    if (sgn(lambda) <= 0) return std::nullopt;
  }

  std::vector<Facet> facets;
  for (const auto& f : P.facets()) facets.push_back({f.normal, Rational(1)});
  return MonotoneNormalization{b, lambda, lambda != 1, DelzantPolyhedron(n, std::move(facets))};
}

DelzantPolyhedron transform_normals(const DelzantPolyhedron& P, const IntMatrix& A) {
  std::vector<Facet> facets;
  for (const auto& f : P.facets()) {
    IntVector nu;
    for (auto e : f.normal) nu.emplace_back(static_cast<long>(e));
    IntVector image = A * nu;
    LatticeVector out;
    for (auto& z : image) out.push_back(to_int64(z));
    facets.push_back({out, f.offset});
  }
  return DelzantPolyhedron(P.dim(), std::move(facets));
}

}  // namespace toricqh
