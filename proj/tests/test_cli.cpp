#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "toricqh/report.hpp"

using namespace toricqh;
using namespace testing_support;
using nlohmann::json;

namespace {

RunConfig cfg(const std::string& command, const std::string& name, OutputFormat format = OutputFormat::Json) {
  RunConfig c;
  c.command = command;
  c.input = data_path(name);
  c.format = format;
  return c;
}

std::string write_temp(const std::string& stem, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("toricqh_test_" + stem + ".json");
  std::ofstream(path) << text;
  return path.string();
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("command list") {
  CHECK(command_names() ==
        std::vector<std::string>{"validate", "classical", "quantum", "cm", "jacobian", "invert", "audit"});
}

TEST_CASE("quantum O(-1) as text") {
  auto r = run(cfg("quantum", "o_minus_1", OutputFormat::Text));
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.output, "v2^2 = T*v2"));
  CHECK(contains(r.output, "v1*v3 = T*v2"));
  CHECK(r.error.empty());
}

TEST_CASE("quantum O(-1) as JSON") {
  auto r = run(cfg("quantum", "o_minus_1"));
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.output);
  CHECK(j["status"] == "ok");
  CHECK(j["command"] == "quantum");
  const auto& res = j["result"];
  CHECK(res["basis"].size() == 2);
  REQUIRE(res["sr_relations"].size() == 1);
  CHECK(res["sr_relations"][0]["text"] == "v1*v3 = T*v2");
  std::vector<std::string> lin;
  for (const auto& l : res["linear_relations"]) lin.push_back(l["text"]);
  CHECK(lin == std::vector<std::string>{"v1 + v2 = 0", "v2 + v3 = 0"});
}

TEST_CASE("every command succeeds on the valid corpus") {
  for (const auto& name : valid_corpus()) {
    for (const auto& cmd : {"validate", "classical", "cm", "audit"}) {
      CAPTURE(name);
      CAPTURE(cmd);
      auto r = run(cfg(cmd, name));
      CHECK(r.exit_code == 0);
      auto t = run(cfg(cmd, name, OutputFormat::Text));
      CHECK(t.exit_code == 0);
      CHECK(contains(t.output, "status: ok"));
    }
    auto c = cfg("jacobian", name);
    c.cutoff = "2";
    c.ring = "q";
    CHECK(run(c).exit_code == 0);
  }
}

TEST_CASE("exit codes") {
  CHECK(run(cfg("validate", "cp2")).exit_code == 0);
  CHECK(run(cfg("cm", "cp2")).exit_code == 0);
  SUBCASE("parse errors") {
    CHECK(run(cfg("validate", "no_such_file")).exit_code == kExitParse);
    CHECK(run(cfg("frobnicate", "cp2")).exit_code == kExitParse);
    auto c = cfg("classical", "cp2");
    c.ring = "r";
    CHECK(run(c).exit_code == kExitParse);
    c.ring = "fp:8";
    CHECK(run(c).exit_code == kExitParse);
    CHECK(run(cfg("jacobian", "cp2")).exit_code == kExitParse);
    auto b = cfg("quantum", "o_minus_1");
    b.bfield = "1,x,1";
    CHECK(run(b).exit_code == kExitParse);
    auto gcd = cfg("validate", "cp2");
    gcd.input = write_temp("gcd2", R"({"dim":2,"facets":[{"normal":[2,0],"offset":"1"}]})");
    auto r = run(gcd);
    CHECK(r.exit_code == kExitParse);
    CHECK_FALSE(r.error.empty());
    CHECK(r.output.empty());
    auto malformed = cfg("validate", "cp2");
    malformed.input = write_temp("malformed", "{not json");
    CHECK(run(malformed).exit_code == kExitParse);
  }
  SUBCASE("precondition errors") {
    CHECK(run(cfg("quantum", "hirzebruch_f2")).exit_code == kExitPrecondition);
    CHECK(run(cfg("classical", "non_delzant")).exit_code == kExitPrecondition);
    CHECK(run(cfg("classical", "vertexless")).exit_code == kExitPrecondition);
    CHECK(run(cfg("invert", "c2")).exit_code == kExitPrecondition);
    auto b = cfg("quantum", "o_minus_1");
    b.bfield = "2,1,1";
    CHECK(run(b).exit_code == kExitPrecondition);
    b.bfield = "1,1";
    CHECK(run(b).exit_code == kExitPrecondition);
  }
  SUBCASE("validate reports non-Delzant input without failing") {
    auto r = run(cfg("validate", "non_delzant"));
    CHECK(r.exit_code == 0);
    auto j = json::parse(r.output);
    CHECK(j["result"]["delzant"]["passed"] == false);
  }
}

TEST_CASE("B-field over Q") {
  auto c = cfg("quantum", "o_minus_1", OutputFormat::Text);
  c.ring = "q";
  c.bfield = "2,1,1";
  auto r = run(c);
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.output, "v1*v3 = 2*T*v2"));
}

TEST_CASE("perturbation files") {
  auto c = cfg("jacobian", "o_minus_1");
  c.cutoff = "2";
  c.perturb = write_temp("pert", R"({"perturbations":[[],[{"lambda":"5/2","nu":[2,2],"coeff":"1"}],[]]})");
  auto r = run(c);
  CHECK_MESSAGE(r.exit_code == 0, r.error);
  if (r.exit_code == 0) CHECK(json::parse(r.output)["result"]["free"] == true);
  c.perturb = write_temp("pert_bad", R"({"perturbations":[[],[]]})");
  CHECK(run(c).exit_code == kExitPrecondition);
  c.perturb = write_temp("pert_shape", R"({"nothing":1})");
  CHECK(run(c).exit_code == kExitParse);
}

TEST_CASE("reports re-ingest to identical output") {
  for (const auto& name : valid_corpus()) {
    for (const auto& cmd : {"validate", "classical"}) {
      auto first = run(cfg(cmd, name));
      REQUIRE(first.exit_code == 0);
      auto again = cfg(cmd, name);
      again.input = write_temp("reingest", first.output);
      auto second = run(again);
      REQUIRE(second.exit_code == 0);
      CHECK(second.output == first.output);
    }
  }
}

TEST_CASE("output is deterministic") {
  for (const auto& cmd : {"quantum", "audit", "invert"}) {
    auto a = run(cfg(cmd, "cp2"));
    auto b = run(cfg(cmd, "cp2"));
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
  }
}

TEST_CASE("quantum and jacobian agree on the rank") {
  for (const auto& name : {"cp1", "cp2", "cp1xcp1", "o_minus_1", "hirzebruch_f1", "c2"}) {
    auto q = json::parse(run(cfg("quantum", name)).output);
    auto c = cfg("jacobian", name);
    c.cutoff = "3";
    auto j = json::parse(run(c).output);
    CHECK(j["result"]["free"] == true);
    CHECK(j["result"]["m"] == q["result"]["basis"].size());
    CHECK(j["result"]["dim_S_mod_J"] == j["result"]["m"].get<std::size_t>() * j["result"]["dim_R"].get<std::size_t>());
  }
}

TEST_CASE("csv rationals") {
  auto v = parse_csv_rationals(" 2, -1 ,1/3");
  REQUIRE(v.size() == 3);
  CHECK(v[0] == 2);
  CHECK(v[1] == -1);
  CHECK(v[2] == make_rational(1, 3));
  CHECK(parse_csv_rationals("").empty());
}
