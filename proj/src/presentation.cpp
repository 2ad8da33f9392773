#include "toricqh/presentation.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "toricqh/errors.hpp"
#include "toricqh/lp.hpp"
#include "toricqh/sparse.hpp"
#include "toricqh/srtop.hpp"

namespace toricqh {

// ---------------------------------------------------------------------------
// Coefficient rings and formatting

CoefficientRing CoefficientRing::prime_field(std::uint64_t p) {
  FieldSpec::prime_field(p);  // validates
  return {Kind::Prime, p};
}

CoefficientRing CoefficientRing::parse(const std::string& text) {
  if (text == "z" || text == "Z") return integers();
  if (text == "q" || text == "Q") return rationals();
  if (text.rfind("fp:", 0) == 0) {
    std::string digits = text.substr(3);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit) || digits.size() > 18) {
      throw ParseError("bad prime in ring selector '" + text + "'");
    }
    try {
      return prime_field(std::stoull(digits));
    } catch (const PreconditionError& e) {
      throw ParseError(e.what());
    }
  }
  throw ParseError("unknown ring '" + text + "' (expected z, q or fp:P)");
}

FieldSpec CoefficientRing::field() const {
  return kind == Kind::Prime ? FieldSpec::prime_field(p) : FieldSpec::rationals();
}

std::string CoefficientRing::name() const {
  switch (kind) {
    case Kind::Integers: return "Z";
    case Kind::Rationals: return "Q";
    case Kind::Prime: return "F_" + std::to_string(p);
  }
  return "?";
}

std::string monomial_name(const Exponents& t) {
  std::string s;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t[j] == 0) continue;
    if (!s.empty()) s += "*";
    s += "v" + std::to_string(j + 1);
    if (t[j] > 1) s += "^" + std::to_string(t[j]);
  }
  return s.empty() ? "1" : s;
}

void tpoly_trim(TPoly& p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

TPoly tpoly_add(const TPoly& a, const TPoly& b) {
  TPoly out(std::max(a.size(), b.size()), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  tpoly_trim(out);
  return out;
}

TPoly tpoly_mul(const TPoly& a, const TPoly& b) {
  if (a.empty() || b.empty()) return {};
  TPoly out(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  tpoly_trim(out);
  return out;
}

namespace {

std::string power_of_T(const Rational& h) {
  if (h == 1) return "T";
  if (is_integer(h)) return "T^" + to_string(h);
  return "T^(" + to_string(h) + ")";
}

}  // namespace

std::string format_tpoly(const TPoly& p) {
  std::string s;
  for (std::size_t k = p.size(); k-- > 0;) {
    if (sgn(p[k]) == 0) continue;
    Rational c = p[k];
    bool neg = sgn(c) < 0;
    if (neg) c = -c;
    if (s.empty()) {
      if (neg) s += "-";
    } else {
      s += neg ? " - " : " + ";
    }
    std::string mono = k == 0 ? "" : power_of_T(Rational(static_cast<long>(k)));
    if (mono.empty()) {
      s += to_string(c);
    } else if (c == 1) {
      s += mono;
    } else {
      s += to_string(c) + "*" + mono;
    }
  }
  return s.empty() ? "0" : s;
}

std::string format_combination(const std::vector<TPoly>& coords, const std::vector<BasisElement>& basis) {
  std::string s;
  for (std::size_t c = 0; c < coords.size(); ++c) {
    if (coords[c].empty()) continue;
    std::size_t nonzero = 0;
    for (const auto& x : coords[c]) nonzero += sgn(x) != 0;
    std::string poly = format_tpoly(coords[c]);
    bool neg = poly[0] == '-' && nonzero == 1;
    if (neg) poly = poly.substr(1);
    if (nonzero > 1) poly = "(" + poly + ")";
    std::string term;
    const std::string& name = basis[c].name;
    if (name == "1") {
      term = poly;
    } else if (poly == "1") {
      term = name;
    } else {
      term = poly + "*" + name;
    }
    if (s.empty()) {
      s = neg ? "-" + term : term;
    } else {
      s += neg ? " - " + term : " + " + term;
    }
  }
  return s.empty() ? "0" : s;
}

std::string format_relation(const QuantumSRRelation& r) {
  Exponents lhs(r.t.size(), 0);
  for (auto j : facet_list(r.J)) lhs[j] = 1;
  std::string rhs;
  if (r.coefficient != 1) rhs = to_string(r.coefficient) + "*";
  if (sgn(r.height) != 0) rhs += power_of_T(r.height);
  bool trivial_t = std::all_of(r.t.begin(), r.t.end(), [](std::int64_t e) { return e == 0; });
  if (!trivial_t) {
    if (!rhs.empty()) rhs += "*";
    rhs += monomial_name(r.t);
  }
  if (rhs.empty()) rhs = "1";
  if (rhs.back() == '*') rhs.pop_back();
  return monomial_name(lhs) + " = " + rhs;
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace {

LatticeVector nu_of(const DelzantPolyhedron& P, const Exponents& t) {
  LatticeVector nu(P.dim(), 0);
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t[j] == 0) continue;
    for (std::size_t i = 0; i < nu.size(); ++i) nu[i] = checked_add(nu[i], checked_mul(t[j], P.normal(j)[i]));
  }
  return nu;
}

std::int64_t degree_of(const Exponents& t) { return std::accumulate(t.begin(), t.end(), std::int64_t{0}); }

FacetSet support_of(const Exponents& t) {
  FacetSet m = 0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t[j] != 0) m |= FacetSet(1) << j;
  }
  return m;
}

// Preference key: larger l1 norm of nu first, then lexicographically larger nu.
struct PreferenceKey {
  std::int64_t norm;
  LatticeVector nu;
  bool operator<(const PreferenceKey& o) const {
    if (norm != o.norm) return norm < o.norm;
    return nu < o.nu;
  }
};

PreferenceKey preference(const DelzantPolyhedron& P, const Exponents& t) {
  LatticeVector nu = nu_of(P, t);
  std::int64_t norm = 0;
  for (auto e : nu) norm = checked_add(norm, e < 0 ? -e : e);
  return {norm, nu};
}

std::vector<Rational> checked_rho(const DelzantPolyhedron& P, const std::vector<Rational>& rho,
                                  const CoefficientRing& ring) {
  if (rho.empty()) return std::vector<Rational>(P.num_facets(), Rational(1));
  if (rho.size() != P.num_facets()) {
    throw PreconditionError("B-field needs " + std::to_string(P.num_facets()) + " coefficients");
  }
  for (std::size_t j = 0; j < rho.size(); ++j) {
    const Rational& r = rho[j];
    std::string label = "rho_" + std::to_string(j + 1) + " = " + to_string(r);
    if (sgn(r) == 0) throw PreconditionError(label + " is not invertible");
    if (ring.is_integers() && abs(r) != 1) throw PreconditionError(label + " is not a unit of Z");
    if (ring.kind == CoefficientRing::Kind::Prime) {
      Integer p(static_cast<unsigned long>(ring.p));
      if (mpz_divisible_p(r.get_num().get_mpz_t(), p.get_mpz_t()) ||
          mpz_divisible_p(r.get_den().get_mpz_t(), p.get_mpz_t())) {
        throw PreconditionError(label + " is not invertible in " + ring.name());
      }
    }
  }
  return rho;
}

Rational rho_power(const std::vector<Rational>& rho, const Exponents& e) {
  Rational r = 1;
  for (std::size_t j = 0; j < e.size(); ++j) {
    for (std::int64_t k = 0; k < (e[j] < 0 ? -e[j] : e[j]); ++k) {
      if (e[j] > 0) {
        r *= rho[j];
      } else {
        r /= rho[j];
      }
    }
  }
  return r;
}

Exponents exp_sub(Exponents a, const Exponents& b) {
  for (std::size_t j = 0; j < a.size(); ++j) a[j] -= b[j];
  return a;
}

Exponents exp_add(Exponents a, const Exponents& b) {
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = checked_add(a[j], b[j]);
  return a;
}

std::vector<std::vector<std::int64_t>> linear_relations_of(const DelzantPolyhedron& P) {
  std::vector<std::vector<std::int64_t>> rows(P.dim(), std::vector<std::int64_t>(P.num_facets()));
  for (std::size_t i = 0; i < P.dim(); ++i)
    for (std::size_t j = 0; j < P.num_facets(); ++j) rows[i][j] = P.normal(j)[i];
  return rows;
}

BasisElement make_basis_element(const DelzantPolyhedron& P, const Exponents& t) {
  return {t, degree_of(t), nu_of(P, t), monomial_name(t)};
}

template <class F>
std::vector<std::pair<std::size_t, typename F::Elem>> sorted_row(
    std::map<std::size_t, typename F::Elem>& acc, const F& field) {
  std::vector<std::pair<std::size_t, typename F::Elem>> row;
  for (auto& [c, v] : acc) {
    if (!field.is_zero(v)) row.emplace_back(c, v);
  }
  return row;
}

template <class F>
void accumulate(std::map<std::size_t, typename F::Elem>& acc, const F& field, std::size_t col,
                const typename F::Elem& v) {
  auto [it, fresh] = acc.emplace(col, v);
  if (!fresh) it->second = field.add(it->second, v);
}

// Z-module check for one graded piece: no torsion, and the basis columns are
// a Z-basis of the quotient. rows carry integer entries.
void check_integral_freeness(const std::vector<IntSparseRow>& rows, std::size_t ncols,
                             const std::vector<bool>& is_basis, const std::string& where) {
  for (const auto& d : sparse_invariant_factors(rows, ncols)) {
    if (d != 1) throw PropertyFailure("torsion in " + where + ": invariant factor " + to_string(d));
  }
  std::vector<std::size_t> remap(ncols, static_cast<std::size_t>(-1));
  std::size_t k = 0;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (!is_basis[c]) remap[c] = k++;
  }
  std::vector<IntSparseRow> restricted;
  for (const auto& r : rows) {
    IntSparseRow out;
    for (const auto& [c, v] : r) {
      if (!is_basis[c]) out.emplace_back(remap[c], v);
    }
    restricted.push_back(std::move(out));
  }
  auto factors = sparse_invariant_factors(restricted, k);
  bool unit = factors.size() == k &&
              std::all_of(factors.begin(), factors.end(), [](const Integer& d) { return d == 1; });
  if (!unit) throw PropertyFailure("basis does not span " + where + " over Z");
}

}  // namespace

// ---------------------------------------------------------------------------
// Classical presentation

namespace {

template <class F>
struct ClassicalSlice {
  std::vector<Exponents> columns;
  std::map<Exponents, std::size_t> index;
  std::vector<std::size_t> basis_of_col;  // npos for non-basis
  std::unique_ptr<RowReducer<F>> reducer;
};

constexpr std::size_t npos = static_cast<std::size_t>(-1);

template <class F>
RingPresentation classical_impl(const DelzantPolyhedron& P, const PresentationOptions& opts,
                                const F& field) {
  if (!check_vertex_and_splitting(P).has_vertex) throw PreconditionError("polyhedron has no vertex");
  if (!check_delzant(P).passed) throw PreconditionError("polyhedron is not Delzant");
  const std::size_t n = P.dim();
  const std::size_t N = P.num_facets();
  using Elem = typename F::Elem;

  RingPresentation R;
  R.ring = opts.ring;
  R.n = n;
  R.N = N;
  R.rho = checked_rho(P, opts.rho, opts.ring);
  R.linear_relations = linear_relations_of(P);
  R.monomial_relations = minimal_nonfaces(P);
  SimplicialComplex K = build_nerve(P);

  const std::size_t maxdeg = 2 * n;
  std::vector<ClassicalSlice<F>> slices(maxdeg + 1);
  std::vector<Exponents> prev;
  for (std::size_t d = 0; d <= maxdeg; ++d) {
    auto& S = slices[d];
    auto mons = face_monomials(K, d);
    std::vector<std::pair<PreferenceKey, Exponents>> keyed;
    for (auto& t : mons) keyed.emplace_back(preference(P, t), t);
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Exponents> forced;
    if (opts.basis) {
      for (const auto& t : *opts.basis) {
        if (t.size() != N) throw PreconditionError("forced basis element has wrong length");
        if (static_cast<std::size_t>(degree_of(t)) == d) forced.push_back(t);
      }
    }
    for (auto& [key, t] : keyed) {
      if (std::find(forced.begin(), forced.end(), t) == forced.end()) S.columns.push_back(t);
    }
    for (auto& t : forced) {
      if (!K.contains(support_of(t))) throw PreconditionError("forced basis element " + monomial_name(t) + " is zero");
      S.columns.push_back(t);
    }
    for (std::size_t c = 0; c < S.columns.size(); ++c) S.index[S.columns[c]] = c;
    S.reducer = std::make_unique<RowReducer<F>>(field, S.columns.size());

    std::vector<IntSparseRow> int_rows;
    for (const auto& u : prev) {
      for (std::size_t i = 0; i < n; ++i) {
        std::map<std::size_t, Elem> acc;
        std::map<std::size_t, Integer> iacc;
        for (std::size_t j = 0; j < N; ++j) {
          if (P.normal(j)[i] == 0) continue;
          Exponents w = u;
          ++w[j];
          auto it = S.index.find(w);
          if (it == S.index.end()) continue;  // product left the nerve: zero classically
          Rational coeff = Rational(static_cast<long>(P.normal(j)[i])) * R.rho[j];
          accumulate(acc, field, it->second, field.from(coeff));
          if (opts.ring.is_integers()) iacc[it->second] += coeff.get_num();
        }
        S.reducer->insert(sorted_row(acc, field));
        if (opts.ring.is_integers()) {
          IntSparseRow r;
          for (auto& [c, v] : iacc) {
            if (v != 0) r.emplace_back(c, v);
          }
          int_rows.push_back(std::move(r));
        }
      }
    }

    S.basis_of_col.assign(S.columns.size(), npos);
    std::vector<bool> is_basis(S.columns.size(), false);
    if (opts.basis) {
      for (std::size_t c = S.columns.size() - forced.size(); c < S.columns.size(); ++c) is_basis[c] = true;
      for (std::size_t c = 0; c < S.columns.size(); ++c) {
        if (S.reducer->is_pivot(c) == is_basis[c]) {
          throw PropertyFailure("forced basis is not a basis in degree " + std::to_string(d));
        }
      }
    } else {
      for (std::size_t c = 0; c < S.columns.size(); ++c) is_basis[c] = !S.reducer->is_pivot(c);
    }
    // Basis order within a degree: most preferred first.
    std::vector<std::size_t> chosen;
    for (std::size_t c = S.columns.size(); c-- > 0;) {
      if (is_basis[c]) chosen.push_back(c);
    }
    if (opts.basis) {
      chosen.clear();
      for (const auto& t : forced) chosen.push_back(S.index.at(t));
    }
    for (auto c : chosen) {
      S.basis_of_col[c] = R.basis.size();
      R.basis.push_back(make_basis_element(P, S.columns[c]));
    }
    if (opts.ring.is_integers()) {
      check_integral_freeness(int_rows, S.columns.size(), is_basis, "degree " + std::to_string(d));
    }
    if (d <= n) {
      R.ranks.push_back(chosen.size());
    } else if (!chosen.empty()) {
      throw PropertyFailure("classical ring is non-zero in degree " + std::to_string(d));
    }
    prev = S.columns;
  }

  const std::size_t m = R.basis.size();
  R.table.assign(m, std::vector<std::vector<Rational>>(m, std::vector<Rational>(m, Rational(0))));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      Exponents prod = exp_add(R.basis[a].exponents, R.basis[b].exponents);
      if (!K.contains(support_of(prod))) continue;  // positive height: zero classically
      const auto& S = slices[static_cast<std::size_t>(degree_of(prod))];
      auto rem = S.reducer->reduce({{S.index.at(prod), field.one()}});
      for (auto& [c, v] : rem) {
        std::size_t e = S.basis_of_col[c];
        if (e == npos) throw PropertyFailure("reduction left the basis");
        Exponents shift = exp_sub(prod, R.basis[e].exponents);
        Elem scaled = field.mul(v, field.from(rho_power(R.rho, shift)));
        Rational x = field.to_rational(scaled);
        if (opts.ring.is_integers() && !is_integer(x)) {
          throw PropertyFailure("non-integral structure constant " + to_string(x));
        }
        R.table[a][b][e] = x;
      }
    }
  }
  return R;
}

}  // namespace

RingPresentation classical_presentation(const DelzantPolyhedron& P, const PresentationOptions& opts) {
  return with_field(opts.ring.field(), [&](auto F) { return classical_impl(P, opts, F); });
}

// ---------------------------------------------------------------------------
// Quantum SR relations

std::vector<QuantumSRRelation> quantum_sr_relations(const DelzantPolyhedron& P, const std::vector<Rational>& rho) {
  ConeContext ctx(P);
  std::vector<Rational> r = rho.empty() ? std::vector<Rational>(P.num_facets(), Rational(1)) : rho;
  std::vector<QuantumSRRelation> out;
  for (auto J : minimal_nonfaces(P)) {
    ConeElement c{Rational(0), LatticeVector(P.dim(), 0)};
    Exponents lhs(P.num_facets(), 0);
    for (auto j : facet_list(J)) {
      c = c + ConeElement{P.offset(j), P.normal(j)};
      lhs[j] = 1;
    }
    GammaMonomial m = ctx.monomial(c);
    if (sgn(m.height) <= 0) throw PropertyFailure("non-face " + format_facet_set(J) + " has height zero");
    QuantumSRRelation rel;
    rel.J = J;
    rel.height = m.height;
    rel.t = m.t;
    rel.coefficient = rho_power(r, lhs) / rho_power(r, m.t);
    out.push_back(std::move(rel));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quantum presentation

struct QuantumState {
  std::unique_ptr<ConeContext> ctx;
  struct Slice {
    std::map<LatticeVector, std::size_t> index;
    std::vector<std::size_t> basis_of_col;
    std::function<std::vector<std::pair<std::size_t, Rational>>(std::size_t)> reduce_unit;
  };
  std::vector<Slice> slices;
  std::vector<Rational> rho;
  std::vector<BasisElement> basis;
  std::function<Rational(const Rational&, const Rational&)> scale;  // product in the coefficient field
  std::function<Rational(const Rational&)> normalize;

  // Coordinates (in the rescaled basis) of the monomial (k, nu) times `factor`.
  std::vector<TPoly> coordinates(std::size_t k, const LatticeVector& nu, const Exponents& origin_exponents,
                                 bool have_origin, const Rational& factor) const;
};

std::vector<TPoly> QuantumState::coordinates(std::size_t k, const LatticeVector& nu, const Exponents& origin,
                                             bool have_origin, const Rational& factor) const {
  if (k >= slices.size()) {
    throw PreconditionError("T-degree " + std::to_string(k) + " exceeds the presentation bound " +
                            std::to_string(slices.size() - 1));
  }
  const auto& S = slices[k];
  auto it = S.index.find(nu);
  if (it == S.index.end()) throw PreconditionError("monomial outside the monotone Gamma");
  std::vector<TPoly> out(basis.size());
  for (auto& [c, v] : S.reduce_unit(it->second)) {
    std::size_t e = S.basis_of_col[c];
    if (e == npos) throw PropertyFailure("reduction left the basis");
    Rational f = factor;
    if (have_origin) {
      f *= rho_power(rho, exp_sub(origin, basis[e].exponents));
    } else {
      f /= rho_power(rho, basis[e].exponents);
    }
    std::size_t power = k - static_cast<std::size_t>(basis[e].degree);
    TPoly p(power + 1, Rational(0));
    p[power] = scale(v, f);
    out[e] = tpoly_add(out[e], p);
  }
  for (auto& p : out) {
    for (auto& x : p) x = normalize(x);
    tpoly_trim(p);
  }
  return out;
}

namespace {

template <class F>
QuantumPresentation quantum_impl(const DelzantPolyhedron& P, const PresentationOptions& opts, const F& field) {
  using Elem = typename F::Elem;
  auto norm = monotone_normalization(P);
  if (!norm) throw PreconditionError("polyhedron is not monotone");
  const DelzantPolyhedron& Pn = norm->normalized;
  if (!check_delzant(Pn).passed) throw PreconditionError("polyhedron is not Delzant");
  const std::size_t n = Pn.dim();
  const std::size_t N = Pn.num_facets();

  QuantumPresentation Q;
  Q.ring = opts.ring;
  Q.n = n;
  Q.N = N;
  Q.rho = checked_rho(Pn, opts.rho, opts.ring);
  Q.translation = norm->b;
  Q.lambda = norm->lambda;
  Q.rescaled = norm->rescaled;
  Q.linear_relations = linear_relations_of(Pn);
  Q.sr_relations = quantum_sr_relations(Pn, Q.rho);

  PresentationOptions copts = opts;
  copts.rho = Q.rho;
  Q.basis = classical_presentation(Pn, copts).basis;
  Q.degree_bound = 2 * n + opts.margin;

  auto state = std::make_shared<QuantumState>();
  state->ctx = std::make_unique<ConeContext>(Pn);
  state->rho = Q.rho;
  state->basis = Q.basis;
  state->scale = [field](const Rational& x, const Rational& f) {
    return field.to_rational(field.mul(field.from(x), field.from(f)));
  };
  state->normalize = [field](const Rational& x) { return field.to_rational(field.from(x)); };

  std::vector<LatticeVector> prev;
  for (std::size_t k = 0; k <= Q.degree_bound; ++k) {
    auto mons = enumerate_gamma_degree(*state->ctx, k);
    QuantumState::Slice S;
    std::vector<std::size_t> basis_here;
    std::vector<LatticeVector> columns;
    for (std::size_t i = 0; i < Q.basis.size(); ++i) {
      if (static_cast<std::size_t>(Q.basis[i].degree) <= k) basis_here.push_back(i);
    }
    std::map<LatticeVector, std::size_t> basis_nu;
    for (auto i : basis_here) basis_nu[Q.basis[i].nu] = i;
    for (const auto& m : mons) {
      if (!basis_nu.count(m.nu)) columns.push_back(m.nu);
    }
    const std::size_t nonbasis = columns.size();
    for (auto i : basis_here) columns.push_back(Q.basis[i].nu);
    if (columns.size() != mons.size()) throw PropertyFailure("basis monomial missing from degree slice");
    for (std::size_t c = 0; c < columns.size(); ++c) S.index[columns[c]] = c;
    S.basis_of_col.assign(columns.size(), npos);
    for (std::size_t a = 0; a < basis_here.size(); ++a) S.basis_of_col[nonbasis + a] = basis_here[a];

    auto reducer = std::make_shared<RowReducer<F>>(field, columns.size());
    std::vector<IntSparseRow> int_rows;
    for (const auto& u : prev) {
      for (std::size_t i = 0; i < n; ++i) {
        std::map<std::size_t, Elem> acc;
        std::map<std::size_t, Integer> iacc;
        for (std::size_t j = 0; j < N; ++j) {
          if (Pn.normal(j)[i] == 0) continue;
          LatticeVector w = u;
          for (std::size_t a = 0; a < n; ++a) w[a] = checked_add(w[a], Pn.normal(j)[a]);
          std::size_t col = S.index.at(w);
          Rational coeff = Rational(static_cast<long>(Pn.normal(j)[i])) * Q.rho[j];
          accumulate(acc, field, col, field.from(coeff));
          if (opts.ring.is_integers()) iacc[col] += coeff.get_num();
        }
        reducer->insert(sorted_row(acc, field));
        if (opts.ring.is_integers()) {
          IntSparseRow r;
          for (auto& [c, v] : iacc) {
            if (v != 0) r.emplace_back(c, v);
          }
          int_rows.push_back(std::move(r));
        }
      }
    }
    std::vector<bool> is_basis(columns.size(), false);
    for (std::size_t c = nonbasis; c < columns.size(); ++c) is_basis[c] = true;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (reducer->is_pivot(c) == is_basis[c]) {
        throw PropertyFailure("T-degree " + std::to_string(k) + ": quotient rank " +
                              std::to_string(columns.size() - reducer->rank()) + " but expected basis of size " +
                              std::to_string(basis_here.size()));
      }
    }
    if (opts.ring.is_integers()) {
      check_integral_freeness(int_rows, columns.size(), is_basis, "T-degree " + std::to_string(k));
    }
    S.reduce_unit = [reducer, field](std::size_t col) {
      std::vector<std::pair<std::size_t, Rational>> out;
      for (auto& [c, v] : reducer->reduce({{col, field.one()}})) out.emplace_back(c, field.to_rational(v));
      return out;
    };
    Q.slice_sizes.push_back(columns.size());
    Q.slice_ranks.push_back(basis_here.size());
    state->slices.push_back(std::move(S));
    prev.clear();
    for (const auto& m : mons) prev.push_back(m.nu);
  }

  const std::size_t m = Q.basis.size();
  Q.table.assign(m, std::vector<std::vector<TPoly>>(m, std::vector<TPoly>(m)));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const auto& ea = Q.basis[a];
      const auto& eb = Q.basis[b];
      LatticeVector nu = ea.nu;
      for (std::size_t i = 0; i < n; ++i) nu[i] = checked_add(nu[i], eb.nu[i]);
      Q.table[a][b] = state->coordinates(static_cast<std::size_t>(ea.degree + eb.degree), nu,
                                         exp_add(ea.exponents, eb.exponents), true, Rational(1));
      if (opts.ring.is_integers()) {
        for (const auto& p : Q.table[a][b])
          for (const auto& x : p) {
            if (!is_integer(x)) throw PropertyFailure("non-integral structure constant " + to_string(x));
          }
      }
    }
  }
  Q.state = state;
  return Q;
}

}  // namespace

QuantumPresentation quantum_presentation(const DelzantPolyhedron& P, const PresentationOptions& opts) {
  return with_field(opts.ring.field(), [&](auto F) { return quantum_impl(P, opts, F); });
}

const ConeContext& quantum_context(const QuantumPresentation& Q) { return *Q.state->ctx; }

std::vector<TPoly> reduce_to_basis(const FilteredElement& x, const QuantumPresentation& Q) {
  std::vector<TPoly> out(Q.basis.size());
  for (const auto& [mono, coeff] : x.terms()) {
    if (!is_integer(mono.lambda) || sgn(mono.lambda) < 0) {
      throw PreconditionError("monomial with non-integral T-degree " + to_string(mono.lambda));
    }
    auto k = static_cast<std::size_t>(to_int64(mono.lambda));
    auto part = Q.state->coordinates(k, mono.nu, {}, false, coeff);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = tpoly_add(out[c], part[c]);
  }
  for (auto& p : out) {
    for (auto& v : p) v = Q.state->normalize(v);
    tpoly_trim(p);
  }
  return out;
}

std::vector<KSRow> kodaira_spencer_table(const QuantumPresentation& Q) {
  std::vector<KSRow> rows;
  const auto& ctx = quantum_context(Q);
  for (std::size_t j = 0; j < Q.N; ++j) {
    Exponents e(Q.N, 0);
    e[j] = 1;
    auto coords = Q.state->coordinates(1, ctx.polyhedron().normal(j), e, true, Rational(1));
    rows.push_back({"H" + std::to_string(j + 1), std::move(coords)});
  }
  for (const auto& b : Q.basis) {
    std::string label;
    for (std::size_t j = 0; j < Q.N; ++j) {
      for (std::int64_t k = 0; k < b.exponents[j]; ++k) label += (label.empty() ? "H" : "*H") + std::to_string(j + 1);
    }
    if (label.empty()) label = "1";
    rows.push_back({label, Q.state->coordinates(static_cast<std::size_t>(b.degree), b.nu, b.exponents, true,
                                                Rational(1))});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Divisor-inverse certificates

namespace {

bool verify_certificate(const ConeContext& ctx, DivisorCertificate& cert) {
  const auto& P = ctx.polyhedron();
  ConeElement c{Rational(0), LatticeVector(P.dim(), 0)};
  Rational exponent = 0;
  for (std::size_t k = 0; k < P.num_facets(); ++k) {
    if (cert.m[k] < 0) return false;
    for (std::int64_t r = 0; r < cert.m[k]; ++r) c = c + ConeElement{P.offset(k), P.normal(k)};
    exponent += Rational(static_cast<long>(cert.m[k])) * P.offset(k);
  }
  if (cert.m[cert.j] < 1) return false;
  GammaMonomial mono = ctx.monomial(c);
  bool pure_T = std::all_of(mono.t.begin(), mono.t.end(), [](std::int64_t e) { return e == 0; });
  cert.exponent = exponent;
  cert.verified = pure_T && mono.height == exponent && mono.lambda == exponent;
  return cert.verified;
}

// Visits every vector of length N with entries summing to `total`.
template <class Fn>
bool for_each_composition(std::size_t N, std::int64_t total, Exponents& cur, std::size_t pos, Fn&& fn) {
  if (pos + 1 == N) {
    cur[pos] = total;
    return fn(cur);
  }
  for (std::int64_t e = total; e >= 0; --e) {
    cur[pos] = e;
    if (for_each_composition(N, total - e, cur, pos + 1, fn)) return true;
  }
  cur[pos] = 0;
  return false;
}

}  // namespace

DivisorCertificate divisor_inverse_certificate(const DelzantPolyhedron& P, std::size_t j) {
  if (j >= P.num_facets()) throw PreconditionError("facet index out of range");
  if (!is_compact(P)) {
    throw PreconditionError("non-compact polyhedron: v" + std::to_string(j + 1) + " has no inverse certificate");
  }
  ConeContext ctx(P);
  const std::size_t N = P.num_facets();
  const std::size_t n = P.dim();
  DivisorCertificate cert;
  cert.j = j;

  const std::int64_t max_total = 4 * static_cast<std::int64_t>(N) + 4;
  std::size_t budget = 2'000'000;
  for (std::int64_t total = 1; total <= max_total && budget > 0; ++total) {
    Exponents cur(N, 0);
    bool found = for_each_composition(N, total - 1, cur, 0, [&](const Exponents& rest) {
      if (budget-- == 0) return true;
      Exponents m = rest;
      m[j] += 1;
      for (std::size_t i = 0; i < n; ++i) {
        std::int64_t s = 0;
        for (std::size_t k = 0; k < N; ++k) s = checked_add(s, checked_mul(m[k], P.normal(k)[i]));
        if (s != 0) return false;
      }
      cert.m = m;
      return true;
    });
    if (found && !cert.m.empty()) break;
  }
  if (cert.m.empty()) {
    // Scale a rational positive relation to integers.
    LinearProgram lp;
    lp.num_vars = N;
    for (std::size_t i = 0; i < n; ++i) {
      RatVector row(N);
      for (std::size_t k = 0; k < N; ++k) row[k] = Rational(static_cast<long>(P.normal(k)[i]));
      lp.add(std::move(row), Sense::Equal, Rational(0));
    }
    for (std::size_t k = 0; k < N; ++k) {
      RatVector row(N, Rational(0));
      row[k] = 1;
      lp.add(std::move(row), Sense::GreaterEq, Rational(1));
    }
    LPResult r = solve_lp(lp);
    if (r.status == LPStatus::Infeasible) throw PropertyFailure("compact polyhedron without positive relation");
    Integer l = 1;
    for (const auto& y : r.x) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), y.get_den().get_mpz_t());
    for (const auto& y : r.x) cert.m.push_back(to_int64(Rational(y * l)));
  }
  if (!verify_certificate(ctx, cert)) {
    throw PropertyFailure("inverse certificate for v" + std::to_string(j + 1) + " failed verification");
  }
  return cert;
}

// ---------------------------------------------------------------------------
// B-field

BFieldResult apply_bfield(const DelzantPolyhedron& P, const std::vector<Rational>& rho,
                          const CoefficientRing& ring, std::size_t margin) {
  BFieldResult out;
  out.rho = checked_rho(P, rho, ring);
  PresentationOptions opts;
  opts.ring = ring;
  opts.rho = out.rho;
  opts.margin = margin;
  out.classical = classical_presentation(P, opts);
  out.sr_relations = quantum_sr_relations(P, out.rho);
  if (monotone_normalization(P)) out.quantum = quantum_presentation(P, opts);
  return out;
}

// ---------------------------------------------------------------------------
// Generalised Jacobian freeness at a finite cutoff

namespace {

struct LevelKey {
  std::size_t level;
  Exponents t;
  bool operator<(const LevelKey& o) const { return level != o.level ? level < o.level : t < o.t; }
};

struct Term {
  LevelKey key;
  Rational coeff;
};

template <class F>
JacobianReport jacobian_impl(const DelzantPolyhedron& P, const std::vector<FilteredElement>& perturbations,
                             const std::vector<Rational>& rho_in, const Rational& g, const FieldSpec& fspec,
                             const std::vector<Rational>& extra, const F& field) {
  using Elem = typename F::Elem;
  if (sgn(g) <= 0) throw PreconditionError("cutoff must be positive");
  if (!check_delzant(P).passed) throw PreconditionError("polyhedron is not Delzant");
  const std::size_t n = P.dim();
  const std::size_t N = P.num_facets();
  if (!perturbations.empty() && perturbations.size() != N) {
    throw PreconditionError("need one perturbation per facet");
  }
  CoefficientRing ring = fspec.is_rational() ? CoefficientRing::rationals() : CoefficientRing::prime_field(fspec.prime);
  std::vector<Rational> rho = checked_rho(P, rho_in, ring);

  ConeContext ctx(P);
  std::vector<Rational> heights = extra;
  std::vector<std::vector<std::pair<GammaMonomial, Rational>>> pert(N);
  for (std::size_t j = 0; j < perturbations.size(); ++j) {
    for (const auto& [m, c] : perturbations[j].terms()) {
      if (sgn(m.height) <= 0) {
        throw PreconditionError("perturbation of v" + std::to_string(j + 1) + " has a term of height " +
                                to_string(m.height));
      }
      heights.push_back(m.height);
      pert[j].emplace_back(m, c);
    }
  }

  JacobianReport R;
  R.cutoff = g;
  R.field = fspec;
  R.G = build_height_monoid(ctx, heights, g);
  R.dim_R = R.G.elements.size();
  PresentationOptions copts;
  copts.ring = ring;
  copts.rho = rho;
  R.basis = classical_presentation(P, copts).basis;
  R.m = R.basis.size();
  const std::size_t L = R.G.elements.size();
  SimplicialComplex K = build_nerve(P);

  // Terms of u * w_i for each i, with their heights.
  std::map<Exponents, std::vector<std::vector<std::pair<Rational, Term>>>> cache;
  auto row_terms = [&](const Exponents& u) -> const std::vector<std::vector<std::pair<Rational, Term>>>& {
    auto it = cache.find(u);
    if (it != cache.end()) return it->second;
    std::vector<std::vector<std::pair<Rational, Term>>> per_i(n);
    GammaMonomial base = ctx.from_exponents(u);
    for (std::size_t j = 0; j < N; ++j) {
      std::vector<std::pair<GammaMonomial, Rational>> pieces;
      pieces.emplace_back(ctx.multiply(base, ctx.generator(j)), rho[j]);
      for (const auto& [m, c] : pert[j]) pieces.emplace_back(ctx.multiply(base, m), c);
      for (const auto& [mono, c] : pieces) {
        for (std::size_t i = 0; i < n; ++i) {
          if (P.normal(j)[i] == 0) continue;
          per_i[i].push_back({mono.height, Term{{0, mono.t}, c * Rational(static_cast<long>(P.normal(j)[i]))}});
        }
      }
    }
    return cache.emplace(u, std::move(per_i)).first->second;
  };

  // Pass 1: degree caps per level.
  std::vector<std::size_t> cap(L, n + 1);
  std::vector<std::vector<Exponents>> by_degree;
  auto monomials_of_degree = [&](std::size_t d) -> const std::vector<Exponents>& {
    while (by_degree.size() <= d) by_degree.push_back(face_monomials(K, by_degree.size()));
    return by_degree[d];
  };
  for (std::size_t level = 0; level < L; ++level) {
    const Rational& gamma = R.G.elements[level];
    for (std::size_t d = 0; d < cap[level]; ++d) {
      for (const auto& u : monomials_of_degree(d)) {
        for (const auto& terms : row_terms(u)) {
          for (const auto& [h, term] : terms) {
            Rational total = gamma + h;
            if (total >= g) continue;
            std::size_t lv = R.G.index_of(total);
            auto deg = static_cast<std::size_t>(degree_of(term.key.t));
            if (lv > level) cap[lv] = std::max(cap[lv], deg);
          }
        }
      }
    }
  }
  R.degree_caps = cap;

  // Columns: non-basis monomials by level, then every T^gamma e_i.
  std::map<LevelKey, std::size_t> column;
  std::vector<LevelKey> keys;
  std::map<Exponents, std::size_t> basis_index;
  for (std::size_t i = 0; i < R.basis.size(); ++i) basis_index[R.basis[i].exponents] = i;
  for (std::size_t level = 0; level < L; ++level) {
    for (std::size_t d = 0; d <= cap[level]; ++d) {
      for (const auto& u : monomials_of_degree(d)) {
        if (basis_index.count(u)) continue;
        column[{level, u}] = keys.size();
        keys.push_back({level, u});
      }
    }
  }
  const std::size_t first_basis = keys.size();
  for (std::size_t level = 0; level < L; ++level) {
    for (const auto& b : R.basis) {
      column[{level, b.exponents}] = keys.size();
      keys.push_back({level, b.exponents});
    }
  }

  // Pass 2: relations y * w_i truncated at g.
  std::vector<SparseRow<Rational>> rows;
  for (std::size_t level = 0; level < L; ++level) {
    const Rational& gamma = R.G.elements[level];
    for (std::size_t d = 0; d < cap[level]; ++d) {
      for (const auto& u : monomials_of_degree(d)) {
        for (const auto& terms : row_terms(u)) {
          std::map<std::size_t, Rational> acc;
          for (const auto& [h, term] : terms) {
            Rational total = gamma + h;
            if (total >= g) continue;
            LevelKey key{R.G.index_of(total), term.key.t};
            auto it = column.find(key);
            if (it == column.end()) throw Error("relation term outside the truncated column set");
            acc[it->second] += term.coeff;
          }
          SparseRow<Rational> row;
          for (auto& [c, v] : acc) {
            if (sgn(v) != 0) row.emplace_back(c, v);
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }

  R.dim_S = keys.size();
  R.free = true;
  if (fspec.is_rational() && certify_quotient_basis(rows, keys.size(), first_basis)) {
    R.dim_SJ = keys.size() - first_basis;
  } else {
    RowReducer<F> red(field, keys.size());
    for (const auto& row : rows) {
      SparseRow<Elem> r;
      for (const auto& [c, v] : row) {
        Elem x = field.from(v);
        if (!field.is_zero(x)) r.emplace_back(c, x);
      }
      red.insert(r);
    }
    R.dim_SJ = keys.size() - red.rank();
    for (std::size_t c = 0; c < keys.size() && R.free; ++c) {
      bool basis = c >= first_basis;
      if (red.is_pivot(c) == basis) {
        R.free = false;
        std::ostringstream w;
        w << (basis ? "basis element T^" : "monomial T^") << to_string(R.G.elements[keys[c].level]) << "*"
          << monomial_name(keys[c].t) << (basis ? " is dependent modulo J" : " is not spanned by the basis");
        R.witness = w.str();
      }
    }
  }
  if (R.free && R.dim_SJ != R.m * R.dim_R) {
    R.free = false;
    R.witness = "dimension mismatch";
  }
  R.note =
      "S is truncated at height " + to_string(g) +
      " and at the listed monomial degree per height level; the closure of J is represented by this truncation";
  return R;
}

}  // namespace

JacobianReport jacobian_freeness(const DelzantPolyhedron& P, const std::vector<FilteredElement>& perturbations,
                                 const std::vector<Rational>& rho, const Rational& g, const FieldSpec& field,
                                 const std::vector<Rational>& extra_heights) {
  return with_field(field, [&](auto F) { return jacobian_impl(P, perturbations, rho, g, field, extra_heights, F); });
}

// ---------------------------------------------------------------------------
// Basis-independence audit

IntMatrix random_unimodular(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  IntMatrix A = IntMatrix::identity(n);
  if (n < 2) {
    if (rng() & 1) A.negate_row(0);
    return A;
  }
  for (std::size_t step = 0; step < 3 * n; ++step) {
    std::size_t i = rng() % n;
    std::size_t j = rng() % (n - 1);
    if (j >= i) ++j;
    long f = static_cast<long>(rng() % 5) - 2;
    if (f == 0) f = 1;
    A.add_row_multiple(i, j, Integer(f));
    if (rng() % 4 == 0) A.swap_rows(i, j);
  }
  return A;
}

AuditReport basis_independence_audit(const DelzantPolyhedron& P, const std::optional<IntMatrix>& A_in,
                                     std::uint64_t seed) {
  AuditReport rep;
  rep.change_of_basis = A_in ? *A_in : random_unimodular(P.dim(), seed);
  if (!is_unimodular(rep.change_of_basis) || rep.change_of_basis.rows() != P.dim()) {
    throw PreconditionError("change of basis must be unimodular of size n");
  }
  auto add = [&](std::string name, bool ok, std::string detail = {}) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  DelzantPolyhedron P2 = transform_normals(P, rep.change_of_basis);

  RingPresentation c1 = classical_presentation(P);
  RingPresentation c2 = classical_presentation(P2);
  add("classical ranks preserved", c1.ranks == c2.ranks);
  PresentationOptions forced;
  std::vector<Exponents> basis;
  for (const auto& b : c1.basis) basis.push_back(b.exponents);
  forced.basis = basis;
  RingPresentation c2f = classical_presentation(P2, forced);
  add("classical table preserved", c1.table == c2f.table);

  const std::size_t vertices = enumerate_vertices(P).size();
  std::size_t total = std::accumulate(c1.ranks.begin(), c1.ranks.end(), std::size_t{0});
  add("total rank equals vertex count", total == vertices,
      std::to_string(total) + " vs " + std::to_string(vertices));
  std::size_t deg1 = c1.ranks.size() > 1 ? c1.ranks[1] : 0;
  add("degree-1 rank equals N - n", deg1 == P.num_facets() - P.dim());

  auto rs = regular_sequence_check(P, FieldSpec::rationals(), P.dim() + 2);
  bool rs_match = rs.passed;
  for (std::size_t d = 0; d < rs.quotient.size(); ++d) {
    std::size_t want = d < c1.ranks.size() ? c1.ranks[d] : 0;
    rs_match = rs_match && rs.quotient[d] == want;
  }
  add("regular-sequence quotient matches classical ranks", rs_match);

  if (monotone_normalization(P)) {
    QuantumPresentation q1 = quantum_presentation(P, forced);
    QuantumPresentation q2 = quantum_presentation(P2, forced);
    add("quantum ranks preserved", q1.slice_ranks == q2.slice_ranks);
    add("quantum table preserved", q1.table == q2.table);
    bool t0 = true;
    for (std::size_t a = 0; a < q1.basis.size(); ++a)
      for (std::size_t b = 0; b < q1.basis.size(); ++b)
        for (std::size_t c = 0; c < q1.basis.size(); ++c) {
          Rational at0 = q1.table[a][b][c].empty() ? Rational(0) : q1.table[a][b][c][0];
          t0 = t0 && at0 == c1.table[a][b][c];
        }
    add("quantum table at T=0 equals classical table", t0);
    auto norm = monotone_normalization(P);
    for (int gi = 1; gi <= 3; ++gi) {
      Rational g(gi);
      auto J = jacobian_freeness(norm->normalized, {}, {}, g, FieldSpec::rationals(), {Rational(1)});
      std::size_t expected = q1.basis.size() * static_cast<std::size_t>(gi);
      add("jacobian at g=" + std::to_string(gi) + " matches truncated quantum dimension",
          J.free && J.dim_SJ == expected,
          std::to_string(J.dim_SJ) + " vs " + std::to_string(expected));
    }
  }
  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(), [](const AuditCheck& c) { return c.passed; });
  return rep;
}

}  // namespace toricqh
