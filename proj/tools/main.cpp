#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "workspace.hpp"

using namespace fanlib::cli;

namespace {

enum Exit { Ok = 0, Usage = 1, Parse = 2, Domain = 3 };

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fanlib: fine monoids and fans"};
  app.require_subcommand(1);
  bool as_json = false;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  app.add_flag("--json", as_json, "machine-readable output");
  app.add_option("--seed", seed, "seed for randomized operations")->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads for queries")->check(CLI::Range(1u, 256u));

  std::string file, fan_name;
  auto* check = app.add_subcommand("check", "parse and validate a workspace");
  auto* query = app.add_subcommand("query", "run every query of a workspace");
  auto* dot = app.add_subcommand("dot", "Graphviz drawing of a fan");
  auto* exp = app.add_subcommand("export-json", "dump the bindings as JSON");
  auto* fmt = app.add_subcommand("format", "print the workspace in canonical form");
  for (auto* s : {check, query, dot, exp, fmt}) s->add_option("file", file, "workspace file")->required();
  dot->add_option("fan", fan_name, "fan binding")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? Ok : Usage;
  }
  (void)seed;  // no command consumes randomness yet

  Workspace w;
  try {
    w = parse_document(slurp(file));
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Usage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return Parse;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return Domain;
  }

  if (*check) {
    if (as_json)
      std::cout << Json{{"bindings", w.order.size()}, {"queries", w.queries.size()}}.dump(2) << "\n";
    else
      std::cout << "ok: " << w.order.size() << " bindings, " << w.queries.size() << " queries\n";
    return Ok;
  }
  if (*fmt) {
    std::cout << serialize(w);
    return Ok;
  }
  if (*exp) {
    std::cout << export_json(w).dump(2) << "\n";
    return Ok;
  }
  if (*dot) {
    auto it = w.values.find(fan_name);
    if (it == w.values.end() || !std::holds_alternative<fanlib::Fan>(it->second)) {
      std::cerr << "error: no fan named '" << fan_name << "'\n";
      return Usage;
    }
    std::cout << emit_dot(std::get<fanlib::Fan>(it->second));
    return Ok;
  }

  std::vector<Json> reports = run_all(w, jobs);
  bool failed = false;
  for (const auto& r : reports) failed = failed || r.contains("error");
  if (as_json) {
    Json a = Json::array();
    for (auto& r : reports) a.push_back(r);
    std::cout << a.dump(2) << "\n";
  } else {
    std::cout << render_reports(reports);
  }
  return failed ? Domain : Ok;
}
