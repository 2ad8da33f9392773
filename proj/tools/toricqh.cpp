#include <iostream>

#include "CLI11.hpp"
#include "toricqh/report.hpp"

int main(int argc, char** argv) {
  toricqh::RunConfig config;
  std::string format = "json";
  std::string margin = "0";
  CLI::App app{"Presentations of toric quantum cohomology from Delzant polyhedra"};
  app.add_option("--input", config.input, "Polyhedron JSON file")->required();
  app.add_option("--command", config.command, "validate|classical|quantum|cm|jacobian|invert|audit")->required();
  app.add_option("--ring", config.ring, "z, q or fp:P");
  app.add_option("--cutoff", config.cutoff, "Height cutoff g (p/q)");
  app.add_option("--margin", margin, "Extra quantum degrees beyond 2n");
  app.add_option("--bfield", config.bfield, "Comma separated rho_1..rho_N");
  app.add_option("--perturb", config.perturb, "Perturbation JSON file");
  app.add_option("--format", format, "json or text");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return toricqh::kExitParse;
  }
  if (format == "json") {
    config.format = toricqh::OutputFormat::Json;
  } else if (format == "text") {
    config.format = toricqh::OutputFormat::Text;
  } else {
    std::cerr << "parse error: unknown format '" << format << "'\n";
    return toricqh::kExitParse;
  }
  try {
    std::size_t used = 0;
    long m = std::stol(margin, &used);
    if (used != margin.size() || m < 0 || m > 64) throw std::invalid_argument(margin);
    config.margin = static_cast<std::size_t>(m);
  } catch (const std::exception&) {
    std::cerr << "parse error: bad margin '" << margin << "'\n";
    return toricqh::kExitParse;
  }
  auto result = toricqh::run(config);
  std::cout << result.output;
  if (!result.error.empty()) std::cerr << result.error << "\n";
  return result.exit_code;
}
