#include "toricqh/conemonoid.hpp"

#include <algorithm>
#include <set>

#include "toricqh/errors.hpp"
#include "toricqh/lp.hpp"

namespace toricqh {

namespace {

std::string describe(const ConeElement& c) {
  std::string s = "(" + to_string(c.lambda) + ",(";
  for (std::size_t i = 0; i < c.nu.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(c.nu[i]);
  }
  return s + "))";
}

Rational parse_exact(const nlohmann::json& j, const char* what) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(static_cast<long>(j.get<std::int64_t>()));
  throw ParseError(std::string(what) + " must be an exact fraction string");
}

}  // namespace

ConeElement operator+(const ConeElement& a, const ConeElement& b) {
  ConeElement c{a.lambda + b.lambda, a.nu};
  for (std::size_t i = 0; i < c.nu.size(); ++i) c.nu[i] = checked_add(c.nu[i], b.nu[i]);
  return c;
}

Rational theta(const Vertex& v, const ConeElement& c) {
  Rational s = c.lambda;
  for (std::size_t i = 0; i < c.nu.size(); ++i) {
    if (c.nu[i] != 0) s += v.point[i] * Rational(static_cast<long>(c.nu[i]));
  }
  return s;
}

std::int64_t GammaMonomial::degree() const {
  std::int64_t d = 0;
  for (auto e : t) d = checked_add(d, e);
  return d;
}

FacetSet GammaMonomial::support() const {
  FacetSet m = 0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t[j] != 0) m |= FacetSet(1) << j;
  }
  return m;
}

bool MonomialOrder::operator()(const GammaMonomial& a, const GammaMonomial& b) const {
  if (a.height != b.height) return a.height < b.height;
  if (a.nu != b.nu) return a.nu < b.nu;
  return a.lambda < b.lambda;
}

// ---------------------------------------------------------------------------

ConeContext::ConeContext(const DelzantPolyhedron& P) : P_(P), vertices_(enumerate_vertices(P)) {
  if (vertices_.empty()) throw PreconditionError("polyhedron has no vertex");
  for (const auto& v : vertices_) {
    if (v.incident.size() != P_.dim()) {
      throw PreconditionError("vertex with " + std::to_string(v.incident.size()) +
                              " incident facets (not simple)");
    }
    IntMatrix Mt(P_.dim(), P_.dim());
    for (std::size_t a = 0; a < v.incident.size(); ++a)
      for (std::size_t i = 0; i < P_.dim(); ++i) Mt(i, a) = static_cast<long>(P_.normal(v.incident[a])[i]);
    auto inv = inverse_rational(Mt);
    if (!inv) throw PreconditionError("incident normals are dependent");
    inverse_.push_back(std::move(*inv));
    maximal_faces_.push_back(v.incident_mask);
  }
}

bool ConeContext::is_face(FacetSet J) const {
  return std::any_of(maximal_faces_.begin(), maximal_faces_.end(),
                     [&](FacetSet F) { return (J & F) == J; });
}

bool ConeContext::in_cone(const ConeElement& c) const {
  for (const auto& v : vertices_) {
    if (sgn(theta(v, c)) < 0) return false;
  }
  const std::size_t N = P_.num_facets();
  LinearProgram lp;
  lp.num_vars = N;
  for (std::size_t i = 0; i < P_.dim(); ++i) {
    RatVector row(N);
    for (std::size_t j = 0; j < N; ++j) row[j] = Rational(static_cast<long>(P_.normal(j)[i]));
    lp.add(std::move(row), Sense::Equal, Rational(static_cast<long>(c.nu[i])));
  }
  return lp_feasible(lp);
}

std::optional<Decomposition> ConeContext::try_decompose(const ConeElement& c) const {
  if (c.nu.size() != P_.dim()) throw PreconditionError("cone element has wrong dimension");
  std::size_t best = 0;
  Rational h = theta(vertices_[0], c);
  for (std::size_t k = 1; k < vertices_.size(); ++k) {
    Rational th = theta(vertices_[k], c);
    if (th < h) {
      h = th;
      best = k;
    }
  }
  if (sgn(h) < 0) return std::nullopt;
  Decomposition d;
  d.s = h;
  d.vertex = best;
  d.t.assign(P_.num_facets(), Rational(0));
  const auto& inc = vertices_[best].incident;
  const auto& inv = inverse_[best];
  for (std::size_t a = 0; a < inc.size(); ++a) {
    Rational ta = 0;
    for (std::size_t i = 0; i < P_.dim(); ++i) {
      if (c.nu[i] != 0) ta += inv[a][i] * Rational(static_cast<long>(c.nu[i]));
    }
    if (sgn(ta) < 0) return std::nullopt;
    d.t[inc[a]] = ta;
  }
  return d;
}

Decomposition ConeContext::intersecting_sum(const ConeElement& c) const {
  auto d = try_decompose(c);
  if (!d) throw PreconditionError("element " + describe(c) + " is not in the cone");
  return *d;
}

Rational ConeContext::height(const ConeElement& c) const { return intersecting_sum(c).s; }

std::optional<GammaMonomial> ConeContext::try_monomial(const ConeElement& c) const {
  auto d = try_decompose(c);
  if (!d) return std::nullopt;
  GammaMonomial m;
  m.lambda = c.lambda;
  m.nu = c.nu;
  m.height = d->s;
  m.t.reserve(d->t.size());
  for (const auto& q : d->t) {
    if (!is_integer(q)) {
      throw PropertyFailure("lattice failure: element " + describe(c) +
                            " has non-integral decomposition coefficient " + to_string(q));
    }
    m.t.push_back(to_int64(q));
  }
  return m;
}

GammaMonomial ConeContext::monomial(const ConeElement& c) const {
  auto m = try_monomial(c);
  if (!m) throw PreconditionError("element " + describe(c) + " is not in the cone");
  return *m;
}

GammaMonomial ConeContext::from_exponents(const std::vector<std::int64_t>& t, const Rational& h) const {
  GammaMonomial m;
  m.height = h;
  m.t = t;
  m.lambda = h;
  m.nu.assign(P_.dim(), 0);
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t[j] == 0) continue;
    m.lambda += Rational(static_cast<long>(t[j])) * P_.offset(j);
    for (std::size_t i = 0; i < P_.dim(); ++i) {
      m.nu[i] = checked_add(m.nu[i], checked_mul(t[j], P_.normal(j)[i]));
    }
  }
  if (!is_face(m.support())) throw Error("exponent support is not a face");
  return m;
}

GammaMonomial ConeContext::generator(std::size_t j) const {
  std::vector<std::int64_t> t(P_.num_facets(), 0);
  t[j] = 1;
  return from_exponents(t);
}

GammaMonomial ConeContext::unit() const {
  return from_exponents(std::vector<std::int64_t>(P_.num_facets(), 0));
}

GammaMonomial ConeContext::T(const Rational& h) const {
  return from_exponents(std::vector<std::int64_t>(P_.num_facets(), 0), h);
}

GammaMonomial ConeContext::multiply(const GammaMonomial& a, const GammaMonomial& b) const {
  if (is_face(a.support() | b.support())) {
    std::vector<std::int64_t> t(a.t.size());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = checked_add(a.t[j], b.t[j]);
    return from_exponents(t, a.height + b.height);
  }
  return monomial(a.element() + b.element());
}

bool ConeContext::monotone_gamma_membership(const ConeElement& c) const {
  for (const auto& f : P_.facets()) {
    if (f.offset != 1) throw PreconditionError("monotone Gamma needs offsets normalized to 1");
  }
  if (!is_integer(c.lambda) || sgn(c.lambda) < 0) return false;
  return in_cone(c);
}

// ---------------------------------------------------------------------------

bool HeightMonoid::contains(const Rational& h) const {
  return std::binary_search(elements.begin(), elements.end(), h);
}

std::size_t HeightMonoid::index_of(const Rational& h) const {
  auto it = std::lower_bound(elements.begin(), elements.end(), h);
  if (it == elements.end() || *it != h) throw Error("height " + to_string(h) + " not in G below cutoff");
  return static_cast<std::size_t>(it - elements.begin());
}

HeightMonoid build_height_monoid(const ConeContext& ctx, const std::vector<Rational>& extra,
                                 const Rational& g) {
  if (sgn(g) <= 0) throw PreconditionError("cutoff must be positive");
  std::set<Rational> gens;
  for (const auto& v : ctx.vertices()) {
    for (std::size_t j = 0; j < ctx.num_facets(); ++j) {
      gens.insert(theta(v, {ctx.polyhedron().offset(j), ctx.polyhedron().normal(j)}));
    }
  }
  for (const auto& e : extra) {
    if (sgn(e) < 0) throw PreconditionError("negative height generator " + to_string(e));
    gens.insert(e);
  }
  HeightMonoid G;
  G.generators.assign(gens.begin(), gens.end());
  G.cutoff = g;
  std::set<Rational> seen = {Rational(0)};
  std::vector<Rational> frontier = {Rational(0)};
  while (!frontier.empty()) {
    std::vector<Rational> next;
    for (const auto& x : frontier) {
      for (const auto& gen : G.generators) {
        if (sgn(gen) <= 0) continue;
        Rational y = x + gen;
        if (y < g && seen.insert(y).second) next.push_back(y);
      }
    }
    frontier = std::move(next);
  }
  G.elements.assign(seen.begin(), seen.end());
  return G;
}

bool gamma_membership(const ConeContext& ctx, const ConeElement& c, const HeightMonoid& G) {
  if (!ctx.in_cone(c)) return false;
  Rational h = ctx.height(c);
  return h < G.cutoff && G.contains(h);
}

// ---------------------------------------------------------------------------

void FilteredElement::add(const GammaMonomial& m, const Rational& value) {
  Rational coeff = value;
  coeff.canonicalize();
  if (sgn(coeff) == 0) return;
  auto [it, fresh] = terms_.emplace(m, coeff);
  if (!fresh) {
    it->second += coeff;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

std::optional<Rational> FilteredElement::height() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.begin()->first.height;
}

Rational FilteredElement::coefficient(const GammaMonomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

FilteredElement& FilteredElement::operator+=(const FilteredElement& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

FilteredElement& FilteredElement::operator-=(const FilteredElement& o) {
  for (const auto& [m, c] : o.terms_) add(m, -c);
  return *this;
}

FilteredElement FilteredElement::scaled(const Rational& c) const {
  FilteredElement out;
  for (const auto& [m, a] : terms_) out.add(m, a * c);
  return out;
}

FilteredElement multiply(const ConeContext& ctx, const FilteredElement& x, const FilteredElement& y) {
  FilteredElement out;
  for (const auto& [a, ca] : x.terms())
    for (const auto& [b, cb] : y.terms()) out.add(ctx.multiply(a, b), ca * cb);
  return out;
}

FilteredElement truncate(const FilteredElement& x, const Rational& g) {
  if (sgn(g) <= 0) throw PreconditionError("cutoff must be positive");
  FilteredElement out;
  for (const auto& [m, c] : x.terms()) {
    if (m.height < g) out.add(m, c);
  }
  return out;
}

std::vector<GammaMonomial> enumerate_gamma_degree(const ConeContext& ctx, std::size_t k) {
  const auto& P = ctx.polyhedron();
  for (const auto& f : P.facets()) {
    if (f.offset != 1) throw PreconditionError("monotone enumeration needs offsets normalized to 1");
  }
  std::set<LatticeVector> layer = {LatticeVector(P.dim(), 0)};
  for (std::size_t step = 0; step < k; ++step) {
    std::set<LatticeVector> next = layer;
    for (const auto& nu : layer) {
      for (std::size_t j = 0; j < P.num_facets(); ++j) {
        LatticeVector w = nu;
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = checked_add(w[i], P.normal(j)[i]);
        next.insert(std::move(w));
      }
    }
    layer = std::move(next);
  }
  std::vector<GammaMonomial> out;
  out.reserve(layer.size());
  for (const auto& nu : layer) {
    out.push_back(ctx.monomial({Rational(static_cast<long>(k)), nu}));
  }
  return out;
}

std::vector<FilteredElement> log_derivative_generators(const FilteredElement& W, std::size_t n) {
  std::vector<FilteredElement> out(n);
  for (const auto& [m, c] : W.terms()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (m.nu[i] != 0) out[i].add(m, c * Rational(static_cast<long>(m.nu[i])));
    }
  }
  return out;
}

nlohmann::json to_json(const FilteredElement& x) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [m, c] : x.terms()) {
    arr.push_back({{"lambda", to_string(m.lambda)}, {"nu", m.nu}, {"coeff", to_string(c)}});
  }
  return arr;
}

FilteredElement filtered_from_json(const ConeContext& ctx, const nlohmann::json& j) {
  FilteredElement out;
  try {
    if (!j.is_array()) throw ParseError("filtered element must be an array of terms");
    for (const auto& term : j) {
      ConeElement c;
      c.lambda = parse_exact(term.at("lambda"), "lambda");
      for (const auto& e : term.at("nu")) {
        if (!e.is_number_integer()) throw ParseError("nu entries must be integers");
        c.nu.push_back(e.get<std::int64_t>());
      }
      if (c.nu.size() != ctx.dim()) throw ParseError("nu has wrong length");
      Rational coeff = parse_exact(term.at("coeff"), "coeff");
      auto m = ctx.try_monomial(c);
      if (!m) throw PreconditionError("monomial " + describe(c) + " lies outside Gamma");
      out.add(*m, coeff);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed filtered element: ") + e.what());
  }
  return out;
}

}  // namespace toricqh
