#include "toricqh/report.hpp"

#include <fstream>
#include <sstream>

#include "toricqh/errors.hpp"
#include "toricqh/presentation.hpp"
#include "toricqh/srtop.hpp"

namespace toricqh {

using nlohmann::json;

namespace {

json rat(const Rational& x) { return to_string(x); }

json rat_vector(const RatVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(rat(x));
  return a;
}

json tpoly(const TPoly& p) {
  json a = json::array();
  for (const auto& x : p) a.push_back(rat(x));
  return a;
}

json facet_set(FacetSet J) {
  json a = json::array();
  for (auto j : facet_list(J)) a.push_back(j + 1);
  return a;
}

std::string product_name(const FacetSet J) {
  std::string s;
  for (auto j : facet_list(J)) s += (s.empty() ? "v" : "*v") + std::to_string(j + 1);
  return s.empty() ? "1" : s;
}

std::string linear_relation_text(const std::vector<std::int64_t>& row) {
  std::string s;
  for (std::size_t j = 0; j < row.size(); ++j) {
    std::int64_t c = row[j];
    if (c == 0) continue;
    std::string mag = (c == 1 || c == -1) ? "" : std::to_string(c < 0 ? -c : c) + "*";
    if (s.empty()) {
      s += c < 0 ? "-" : "";
    } else {
      s += c < 0 ? " - " : " + ";
    }
    s += mag + "v" + std::to_string(j + 1);
  }
  return (s.empty() ? "0" : s) + " = 0";
}

json basis_json(const std::vector<BasisElement>& basis) {
  json a = json::array();
  for (const auto& b : basis) {
    a.push_back({{"name", b.name},
                 {"exponents", b.exponents},
                 {"degree", b.degree},
                 {"cohomological_degree", 2 * b.degree},
                 {"nu", b.nu}});
  }
  return a;
}

json linear_relations_json(const std::vector<std::vector<std::int64_t>>& rows) {
  json a = json::array();
  for (const auto& r : rows) a.push_back({{"coefficients", r}, {"text", linear_relation_text(r)}});
  return a;
}

json sr_relations_json(const std::vector<QuantumSRRelation>& rels) {
  json a = json::array();
  for (const auto& r : rels) {
    a.push_back({{"nonface", facet_set(r.J)},
                 {"height", rat(r.height)},
                 {"exponents", r.t},
                 {"coefficient", rat(r.coefficient)},
                 {"text", format_relation(r)}});
  }
  return a;
}

template <class Entry, class Fmt>
json products_text(const std::vector<BasisElement>& basis, const Entry& entry, Fmt&& fmt) {
  json a = json::array();
  for (std::size_t x = 0; x < basis.size(); ++x) {
    for (std::size_t y = x; y < basis.size(); ++y) {
      if (basis[x].degree == 0 || basis[y].degree == 0) continue;
      Exponents e = basis[x].exponents;
      for (std::size_t j = 0; j < e.size(); ++j) e[j] += basis[y].exponents[j];
      a.push_back(monomial_name(e) + " = " + fmt(entry[x][y]));
    }
  }
  return a;
}

std::vector<FilteredElement> load_perturbations(const std::string& path, const ConeContext& ctx) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open perturbation file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("perturbation file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("perturbations") || !j["perturbations"].is_array()) {
    throw ParseError("perturbation file needs a \"perturbations\" array");
  }
  std::vector<FilteredElement> out;
  for (const auto& terms : j["perturbations"]) out.push_back(filtered_from_json(ctx, terms));
  return out;
}

CoefficientRing ring_of(const RunConfig& c) { return CoefficientRing::parse(c.ring); }

json validate_report(const DelzantPolyhedron& P) {
  json r;
  auto dz = check_delzant(P);
  json viol = json::array();
  for (const auto& v : dz.violations) {
    json inc = json::array();
    for (auto j : v.incident) inc.push_back(j + 1);
    viol.push_back({{"vertex", rat_vector(v.vertex)},
                    {"incident", inc},
                    {"determinant", to_string(v.determinant)},
                    {"message", v.message}});
  }
  r["delzant"] = {{"passed", dz.passed}, {"violations", viol}};
  auto sp = check_vertex_and_splitting(P);
  r["has_vertex"] = sp.has_vertex;
  r["split_rank"] = sp.split_rank;
  r["compact"] = is_compact(P);
  json verts = json::array();
  for (const auto& v : enumerate_vertices(P)) {
    json inc = json::array();
    for (auto j : v.incident) inc.push_back(j + 1);
    verts.push_back({{"point", rat_vector(v.point)}, {"incident", inc}});
  }
  r["vertices"] = verts;
  auto mono = monotone_normalization(P);
  if (mono) {
    r["monotone"] = {{"monotone", true},
                     {"translation", rat_vector(mono->b)},
                     {"lambda", rat(mono->lambda)},
                     {"rescaled", mono->rescaled}};
  } else {
    r["monotone"] = {{"monotone", false}};
  }
  return r;
}

json classical_report(const DelzantPolyhedron& P, const RunConfig& c) {
  PresentationOptions opts;
  opts.ring = ring_of(c);
  opts.rho = parse_csv_rationals(c.bfield);
  auto R = classical_presentation(P, opts);
  json r;
  r["ring"] = R.ring.name();
  json gens = json::array();
  for (std::size_t j = 0; j < R.N; ++j) gens.push_back("v" + std::to_string(j + 1));
  r["generators"] = gens;
  r["rho"] = rat_vector(R.rho);
  r["linear_relations"] = linear_relations_json(R.linear_relations);
  json mons = json::array();
  for (auto J : R.monomial_relations) mons.push_back({{"nonface", facet_set(J)}, {"text", product_name(J) + " = 0"}});
  r["monomial_relations"] = mons;
  r["basis"] = basis_json(R.basis);
  r["ranks"] = R.ranks;
  json table = json::array();
  for (const auto& row : R.table) {
    json jr = json::array();
    for (const auto& cell : row) jr.push_back(rat_vector(cell));
    table.push_back(jr);
  }
  r["structure_constants"] = table;
  r["products"] = products_text(R.basis, R.table, [&](const std::vector<Rational>& v) {
    std::vector<TPoly> coords;
    for (const auto& x : v) coords.push_back(sgn(x) == 0 ? TPoly{} : TPoly{x});
    return format_combination(coords, R.basis);
  });
  return r;
}

json quantum_report(const DelzantPolyhedron& P, const RunConfig& c) {
  PresentationOptions opts;
  opts.ring = ring_of(c);
  opts.rho = parse_csv_rationals(c.bfield);
  opts.margin = c.margin;
  auto Q = quantum_presentation(P, opts);
  json r;
  r["ring"] = Q.ring.name();
  r["normalization"] = {{"translation", rat_vector(Q.translation)}, {"lambda", rat(Q.lambda)}, {"rescaled", Q.rescaled}};
  json gens = json::array();
  for (std::size_t j = 0; j < Q.N; ++j) gens.push_back("v" + std::to_string(j + 1));
  r["generators"] = gens;
  r["rho"] = rat_vector(Q.rho);
  r["linear_relations"] = linear_relations_json(Q.linear_relations);
  r["sr_relations"] = sr_relations_json(Q.sr_relations);
  r["basis"] = basis_json(Q.basis);
  r["degree_bound"] = Q.degree_bound;
  r["slice_sizes"] = Q.slice_sizes;
  r["slice_ranks"] = Q.slice_ranks;
  json table = json::array();
  for (const auto& row : Q.table) {
    json jr = json::array();
    for (const auto& cell : row) {
      json jc = json::array();
      for (const auto& p : cell) jc.push_back(tpoly(p));
      jr.push_back(jc);
    }
    table.push_back(jr);
  }
  r["structure_constants"] = table;
  r["products"] = products_text(Q.basis, Q.table,
                                [&](const std::vector<TPoly>& v) { return format_combination(v, Q.basis); });
  json ks = json::array();
  for (const auto& row : kodaira_spencer_table(Q)) {
    json coords = json::array();
    for (const auto& p : row.coordinates) coords.push_back(tpoly(p));
    ks.push_back({{"class", row.label}, {"coordinates", coords}, {"text", format_combination(row.coordinates, Q.basis)}});
  }
  r["ks_table"] = ks;
  return r;
}

json homology_json(const HomologyProfile& H) {
  return {{"field", H.field.name()}, {"reduced_betti", H.betti}, {"f_vector", H.f_vector}};
}

json cm_report(const DelzantPolyhedron& P, bool& failed) {
  if (!check_delzant(P).passed) throw PreconditionError("polyhedron is not Delzant");
  SimplicialComplex K = build_nerve(P);
  json r;
  json maxf = json::array();
  for (auto F : K.maximal_faces()) maxf.push_back(facet_set(F));
  r["nerve"] = {{"maximal_faces", maxf}, {"dimension", K.dimension()}, {"f_vector", K.f_vector()}};
  json cm = json::array();
  for (auto field : {FieldSpec::rationals(), FieldSpec::prime_field(2)}) {
    auto v = reisner_cm_check(K, field);
    json e = {{"field", field.name()}, {"passed", v.passed}};
    if (v.witness_face) {
      e["witness_face"] = facet_set(*v.witness_face);
      e["witness_degree"] = v.witness_degree;
    }
    failed = failed || !v.passed;
    cm.push_back(e);
  }
  r["cohen_macaulay"] = cm;
  auto sb = sphere_or_ball_profile(P);
  r["profile"] = {{"compact", sb.compact},
                  {"expected", sb.expected},
                  {"matches", sb.matches},
                  {"rational", homology_json(sb.rational)},
                  {"mod2", homology_json(sb.mod2)}};
  failed = failed || !sb.matches;
  json rs = json::array();
  for (auto field : {FieldSpec::rationals(), FieldSpec::prime_field(2)}) {
    auto v = regular_sequence_check(P, field, P.dim() + 2);
    rs.push_back({{"field", field.name()},
                  {"passed", v.passed},
                  {"hilbert", v.hilbert},
                  {"expected", v.expected},
                  {"quotient", v.quotient}});
    failed = failed || !v.passed;
  }
  r["regular_sequence"] = rs;
  return r;
}

json jacobian_report(const DelzantPolyhedron& P, const RunConfig& c, bool& failed) {
  if (!c.cutoff) throw ParseError("jacobian needs --cutoff");
  Rational g = parse_rational(*c.cutoff);
  CoefficientRing ring = ring_of(c);
  FieldSpec field = ring.kind == CoefficientRing::Kind::Prime ? FieldSpec::prime_field(ring.p) : FieldSpec::rationals();
  std::vector<FilteredElement> pert;
  if (!c.perturb.empty()) {
    ConeContext ctx(P);
    pert = load_perturbations(c.perturb, ctx);
  }
  auto J = jacobian_freeness(P, pert, parse_csv_rationals(c.bfield), g, field);
  json r;
  r["cutoff"] = rat(J.cutoff);
  r["field"] = J.field.name();
  json gen = json::array();
  for (const auto& x : J.G.generators) gen.push_back(rat(x));
  json elem = json::array();
  for (const auto& x : J.G.elements) elem.push_back(rat(x));
  r["height_monoid"] = {{"generators", gen}, {"elements", elem}};
  r["dim_R"] = J.dim_R;
  r["m"] = J.m;
  r["dim_S"] = J.dim_S;
  r["dim_S_mod_J"] = J.dim_SJ;
  r["basis"] = basis_json(J.basis);
  r["free"] = J.free;
  if (!J.free) r["witness"] = J.witness;
  r["degree_caps"] = J.degree_caps;
  r["note"] = J.note;
  failed = !J.free;
  return r;
}

json invert_report(const DelzantPolyhedron& P) {
  json certs = json::array();
  for (std::size_t j = 0; j < P.num_facets(); ++j) {
    auto cert = divisor_inverse_certificate(P, j);
    Exponents rest = cert.m;
    rest[j] -= 1;
    std::string lhs = "v" + std::to_string(j + 1);
    std::string other = monomial_name(rest);
    if (other != "1") lhs += " * " + other;
    certs.push_back({{"facet", j + 1},
                     {"m", cert.m},
                     {"exponent", rat(cert.exponent)},
                     {"verified", cert.verified},
                     {"identity", lhs + " = T^" + to_string(cert.exponent)}});
  }
  return {{"certificates", certs}};
}

json audit_report(const DelzantPolyhedron& P, bool& failed) {
  auto rep = basis_independence_audit(P);
  json A = json::array();
  for (std::size_t i = 0; i < rep.change_of_basis.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < rep.change_of_basis.cols(); ++k) row.push_back(to_string(rep.change_of_basis(i, k)));
    A.push_back(row);
  }
  json checks = json::array();
  for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  failed = !rep.passed;
  return {{"change_of_basis", A}, {"checks", checks}, {"passed", rep.passed}};
}

void text_lines(std::ostringstream& out, const std::string& title, const json& arr, const char* key = nullptr) {
  out << title << ":\n";
  for (const auto& e : arr) out << "  " << (key ? e[key].get<std::string>() : e.get<std::string>()) << "\n";
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"validate", "classical", "quantum", "cm",
                                                 "jacobian", "invert",    "audit"};
  return names;
}

std::vector<Rational> parse_csv_rationals(const std::string& csv) {
  std::vector<Rational> out;
  if (csv.empty()) return out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    out.push_back(parse_rational(b == std::string::npos ? "" : item.substr(b, e - b + 1)));
  }
  return out;
}

nlohmann::json build_report(const RunConfig& config) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), config.command) == names.end()) {
    throw ParseError("unknown command '" + config.command + "'");
  }
  DelzantPolyhedron P = DelzantPolyhedron::from_file(config.input);
  bool failed = false;
  json body;
  const std::string& cmd = config.command;
  if (cmd == "validate") {
    body = validate_report(P);
  } else if (cmd == "classical") {
    body = classical_report(P, config);
  } else if (cmd == "quantum") {
    body = quantum_report(P, config);
  } else if (cmd == "cm") {
    body = cm_report(P, failed);
  } else if (cmd == "jacobian") {
    body = jacobian_report(P, config, failed);
  } else if (cmd == "invert") {
    body = invert_report(P);
  } else {
    body = audit_report(P, failed);
  }
  json r;
  r["command"] = cmd;
  r["polyhedron"] = P.to_json();
  r["result"] = body;
  r["status"] = failed ? "property-failure" : "ok";
  return r;
}

std::string render_text(const nlohmann::json& report) {
  std::ostringstream out;
  const json& r = report["result"];
  const std::string cmd = report["command"];
  const json& P = report["polyhedron"];
  out << "command: " << cmd << "\n";
  out << "polyhedron: dim " << P["dim"].get<int>() << ", " << P["facets"].size() << " facets\n";
  if (cmd == "validate") {
    out << "delzant: " << (r["delzant"]["passed"].get<bool>() ? "yes" : "no") << "\n";
    for (const auto& v : r["delzant"]["violations"]) out << "  " << v["message"].get<std::string>() << "\n";
    out << "has vertex: " << (r["has_vertex"].get<bool>() ? "yes" : "no") << "\n";
    out << "split rank: " << r["split_rank"].get<std::size_t>() << "\n";
    out << "compact: " << (r["compact"].get<bool>() ? "yes" : "no") << "\n";
    out << "vertices: " << r["vertices"].size() << "\n";
    out << "monotone: " << (r["monotone"]["monotone"].get<bool>() ? "yes" : "no") << "\n";
  } else if (cmd == "classical" || cmd == "quantum") {
    out << "ring: " << r["ring"].get<std::string>() << "\n";
    text_lines(out, "linear relations", r["linear_relations"], "text");
    if (cmd == "classical") {
      text_lines(out, "monomial relations", r["monomial_relations"], "text");
    } else {
      text_lines(out, "quantum SR relations", r["sr_relations"], "text");
    }
    out << "basis:";
    for (const auto& b : r["basis"]) out << " " << b["name"].get<std::string>();
    out << (cmd == "classical" ? "\nranks:" : "\nslice ranks:");
    if (cmd == "classical") {
      for (const auto& x : r["ranks"]) out << " " << x.get<std::size_t>();
    } else {
      for (const auto& x : r["slice_ranks"]) out << " " << x.get<std::size_t>();
    }
    out << "\n";
    text_lines(out, "products", r["products"]);
    if (cmd == "quantum") {
      out << "ks table:\n";
      for (const auto& row : r["ks_table"]) {
        out << "  " << row["class"].get<std::string>() << " -> " << row["text"].get<std::string>() << "\n";
      }
    }
  } else if (cmd == "cm") {
    for (const auto& v : r["cohen_macaulay"]) {
      out << "cohen-macaulay over " << v["field"].get<std::string>() << ": " << (v["passed"].get<bool>() ? "pass" : "FAIL")
          << "\n";
    }
    out << "profile: expected " << r["profile"]["expected"].get<std::string>() << ", "
        << (r["profile"]["matches"].get<bool>() ? "matches" : "MISMATCH") << "\n";
    for (const auto& v : r["regular_sequence"]) {
      out << "regular sequence over " << v["field"].get<std::string>() << ": "
          << (v["passed"].get<bool>() ? "pass" : "FAIL") << "\n";
    }
  } else if (cmd == "jacobian") {
    out << "cutoff: " << r["cutoff"].get<std::string>() << " over " << r["field"].get<std::string>() << "\n";
    out << "dim R: " << r["dim_R"].get<std::size_t>() << ", m: " << r["m"].get<std::size_t>()
        << ", dim S/J: " << r["dim_S_mod_J"].get<std::size_t>() << "\n";
    out << "free: " << (r["free"].get<bool>() ? "yes" : "no") << "\n";
    if (r.contains("witness")) out << "witness: " << r["witness"].get<std::string>() << "\n";
    out << "note: " << r["note"].get<std::string>() << "\n";
  } else if (cmd == "invert") {
    text_lines(out, "certificates", r["certificates"], "identity");
  } else if (cmd == "audit") {
    for (const auto& c : r["checks"]) {
      out << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>();
      if (!c["detail"].get<std::string>().empty()) out << " (" << c["detail"].get<std::string>() << ")";
      out << "\n";
    }
  }
  out << "status: " << report["status"].get<std::string>() << "\n";
  return out.str();
}

RunResult run(const RunConfig& config) {
  RunResult res;
  try {
    json report = build_report(config);
    res.output = config.format == OutputFormat::Json ? report.dump(2) + "\n" : render_text(report);
    if (report["status"] != "ok") res.exit_code = kExitProperty;
  } catch (const ParseError& e) {
    res.exit_code = kExitParse;
    res.error = std::string("parse error: ") + e.what();
  } catch (const PreconditionError& e) {
    res.exit_code = kExitPrecondition;
    res.error = std::string("precondition violated: ") + e.what();
  } catch (const PropertyFailure& e) {
    res.exit_code = kExitProperty;
    res.error = std::string("property failure: ") + e.what();
  } catch (const std::exception& e) {
    res.exit_code = 1;
    res.error = std::string("internal error: ") + e.what();
  }
  return res;
}

}  // namespace toricqh
