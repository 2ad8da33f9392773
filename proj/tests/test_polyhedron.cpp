#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>

#include "support.hpp"
#include "toricqh/errors.hpp"

using namespace toricqh;
using namespace testing_support;

namespace {

RatVector rv(std::initializer_list<long> xs) {
  RatVector v;
  for (auto x : xs) v.emplace_back(x);
  return v;
}

std::vector<std::size_t> incident(std::initializer_list<std::size_t> one_based) {
  std::vector<std::size_t> v;
  for (auto j : one_based) v.push_back(j - 1);
  return v;
}

}  // namespace

TEST_CASE("vertex enumeration examples") {
  SUBCASE("O(-1)") {
    auto V = enumerate_vertices(load("o_minus_1"));
    REQUIRE(V.size() == 2);
    CHECK(V[0].point == rv({-1, 0}));
    CHECK(V[0].incident == incident({1, 2}));
    CHECK(V[1].point == rv({0, -1}));
    CHECK(V[1].incident == incident({2, 3}));
  }
  SUBCASE("CP2") {
    auto V = enumerate_vertices(load("cp2"));
    REQUIRE(V.size() == 3);
    CHECK(V[0].point == rv({-1, -1}));
    CHECK(V[1].point == rv({-1, 2}));
    CHECK(V[2].point == rv({2, -1}));
  }
  SUBCASE("half-line") {
    auto V = enumerate_vertices(load("c1"));
    REQUIRE(V.size() == 1);
    CHECK(V[0].point == rv({-1}));
  }
  SUBCASE("vertexless") { CHECK(enumerate_vertices(load("vertexless")).empty()); }
}

TEST_CASE("vertices satisfy their defining equalities") {
  for (const auto& name : corpus()) {
    auto P = load(name);
    for (const auto& v : enumerate_vertices(P)) {
      for (std::size_t j = 0; j < P.num_facets(); ++j) {
        Rational s = 0;
        for (std::size_t i = 0; i < P.dim(); ++i) s += v.point[i] * Rational(static_cast<long>(P.normal(j)[i]));
        bool on = std::find(v.incident.begin(), v.incident.end(), j) != v.incident.end();
        if (on) {
          CHECK(s == -P.offset(j));
        } else {
          CHECK(s > -P.offset(j));
        }
      }
    }
  }
}

TEST_CASE("Delzant check") {
  CHECK(check_delzant(load("o_minus_1")).passed);
  CHECK(check_delzant(load("cp3")).passed);
  auto bad = check_delzant(load("non_delzant"));
  CHECK_FALSE(bad.passed);
  REQUIRE(bad.violations.size() == 1);
  CHECK(abs(bad.violations[0].determinant) == 2);
  for (const auto& name : valid_corpus()) CHECK(check_delzant(load(name)).passed);
}

TEST_CASE("vertex and splitting") {
  auto a = check_vertex_and_splitting(load("o_minus_1"));
  CHECK(a.has_vertex);
  CHECK(a.split_rank == 0);
  auto b = check_vertex_and_splitting(load("vertexless"));
  CHECK_FALSE(b.has_vertex);
  CHECK(b.split_rank == 1);
  REQUIRE(b.annihilator_basis.size() == 1);
  CHECK(b.annihilator_basis[0] == IntVector{0, 1});
  CHECK(check_vertex_and_splitting(load("cp1")).has_vertex);
}

TEST_CASE("compactness") {
  CHECK(is_compact(load("cp1")));
  CHECK(is_compact(load("cp2")));
  CHECK(is_compact(load("hirzebruch_f2")));
  CHECK_FALSE(is_compact(load("c1")));
  CHECK_FALSE(is_compact(load("o_minus_1")));
  CHECK_FALSE(is_compact(load("c3")));
}

TEST_CASE("facet intersections") {
  auto P = load("o_minus_1");
  CHECK_FALSE(facet_intersection_nonempty(P, facet_mask({0, 2})));
  CHECK(facet_intersection_nonempty(P, facet_mask({0, 1})));
  for (std::size_t j = 0; j < 3; ++j) CHECK(facet_intersection_nonempty(P, facet_mask({j})));
}

TEST_CASE("facet intersection is monotone and minimal non-faces generate the non-faces") {
  std::mt19937_64 rng(7);
  std::vector<DelzantPolyhedron> sample;
  for (const auto& name : valid_corpus()) sample.push_back(load(name));
  for (int i = 0; i < 8; ++i) sample.push_back(random_delzant(rng, 3, 8));
  for (const auto& P : sample) {
    const std::size_t N = P.num_facets();
    std::vector<bool> nonempty(std::size_t(1) << N);
    for (FacetSet J = 1; J < (FacetSet(1) << N); ++J) nonempty[J] = facet_intersection_nonempty(P, J);
    auto minimal = minimal_nonfaces(P);
    for (FacetSet J = 1; J < (FacetSet(1) << N); ++J) {
      for (std::size_t j = 0; j < N; ++j) {
        FacetSet sub = J & ~(FacetSet(1) << j);
        if (sub && nonempty[J]) CHECK(nonempty[sub]);
      }
      bool contains_minimal = std::any_of(minimal.begin(), minimal.end(), [&](FacetSet M) { return (J & M) == M; });
      CHECK(contains_minimal == !nonempty[J]);
    }
  }
}

TEST_CASE("minimal non-faces examples") {
  CHECK(minimal_nonfaces(load("o_minus_1")) == std::vector<FacetSet>{facet_mask({0, 2})});
  CHECK(minimal_nonfaces(load("cp2")) == std::vector<FacetSet>{facet_mask({0, 1, 2})});
  CHECK(minimal_nonfaces(load("c3")).empty());
}

TEST_CASE("monotone normalization") {
  SUBCASE("O(-1) is already normalized") {
    auto m = monotone_normalization(load("o_minus_1"));
    REQUIRE(m);
    CHECK(m->b == RatVector{Rational(0), Rational(0)});
    CHECK(m->lambda == 1);
    CHECK_FALSE(m->rescaled);
  }
  SUBCASE("CP1 with offsets (1,3)") {
    auto P = make(1, {{1}, {-1}}, {rat(1), rat(3)});
    auto m = monotone_normalization(P);
    REQUIRE(m);
    CHECK(m->b == RatVector{Rational(-1)});
    CHECK(m->lambda == 2);
    CHECK(m->rescaled);
    for (const auto& f : m->normalized.facets()) CHECK(f.offset == 1);
  }
  SUBCASE("Hirzebruch F2 data is not monotone") { CHECK_FALSE(monotone_normalization(load("hirzebruch_f2"))); }
  SUBCASE("solution satisfies lambda_j = lambda + <b, nu_j>") {
    auto P = make(2, {{1, 0}, {0, 1}, {-1, -1}}, {rat(2), rat(3), rat(1)});
    auto m = monotone_normalization(P);
    REQUIRE(m);
    for (std::size_t j = 0; j < 3; ++j) {
      Rational s = m->lambda;
      for (std::size_t i = 0; i < 2; ++i) s += m->b[i] * Rational(static_cast<long>(P.normal(j)[i]));
      CHECK(s == P.offset(j));
    }
  }
}

TEST_CASE("construction rejects invalid data") {
  CHECK_THROWS_AS(make(2, {{2, 0}}), ParseError);
  CHECK_THROWS_AS(make(2, {{1, 0}}, {rat(0)}), ParseError);
  CHECK_THROWS_AS(make(2, {{1, 0}}, {rat(-1)}), ParseError);
  CHECK_THROWS_AS(make(2, {{1, 0, 0}}), ParseError);
  // x >= -1 and x >= -2: the second is redundant
  CHECK_THROWS_AS(make(1, {{1}, {1}}, {rat(1), rat(2)}), ParseError);
  CHECK_THROWS_AS(make(0, {}), ParseError);
}

TEST_CASE("json round trip") {
  for (const auto& name : corpus()) {
    auto P = load(name);
    auto Q = DelzantPolyhedron::from_json(P.to_json());
    CHECK(Q.to_json() == P.to_json());
    auto wrapped = DelzantPolyhedron::from_json(nlohmann::json{{"polyhedron", P.to_json()}, {"other", 1}});
    CHECK(wrapped.to_json() == P.to_json());
  }
  CHECK_THROWS_AS(DelzantPolyhedron::from_json(nlohmann::json::parse(R"({"dim":1})")), ParseError);
  CHECK_THROWS_AS(DelzantPolyhedron::from_json(nlohmann::json::parse(R"({"dim":1,"facets":[{"normal":[1],"offset":"x"}]})")),
                  ParseError);
  CHECK_THROWS_AS(DelzantPolyhedron::from_file("/nonexistent/file.json"), ParseError);
}

TEST_CASE("vertex count is invariant under unimodular changes and relabeling") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto P = random_delzant(rng, 3, 8);
    auto count = enumerate_vertices(P).size();
    auto Q = transform_normals(P, random_unimodular(P.dim(), rng()));
    CHECK(enumerate_vertices(Q).size() == count);
    CHECK(check_delzant(Q).passed);
    std::vector<Facet> shuffled = P.facets();
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(enumerate_vertices(DelzantPolyhedron(P.dim(), shuffled)).size() == count);
    // translation x -> x + a shifts offsets by <a, nu_j>; keep them positive
    RatVector a(P.dim(), Rational(1, 7));
    std::vector<Facet> moved = P.facets();
    bool positive = true;
    for (auto& f : moved) {
      for (std::size_t i = 0; i < P.dim(); ++i) f.offset += a[i] * Rational(static_cast<long>(f.normal[i]));
      positive = positive && sgn(f.offset) > 0;
    }
    if (positive) CHECK(enumerate_vertices(DelzantPolyhedron(P.dim(), moved)).size() == count);
  }
}

TEST_CASE("incident normals at vertices are unimodular after the Delzant check") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto P = random_delzant(rng, 3, 8);
    REQUIRE(check_delzant(P).passed);
    for (const auto& v : enumerate_vertices(P)) {
      REQUIRE(v.incident.size() == P.dim());
      IntMatrix M(P.dim(), P.dim());
      for (std::size_t r = 0; r < P.dim(); ++r)
        for (std::size_t c = 0; c < P.dim(); ++c) M(r, c) = static_cast<long>(P.normal(v.incident[r])[c]);
      CHECK(abs(determinant(M)) == 1);
    }
  }
}
