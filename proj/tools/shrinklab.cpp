#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "shrinklab/error.hpp"
#include "shrinklab/scenario.hpp"

namespace {

  struct Common {
    std::string                  scenario;
    std::string                  out;
    std::optional<std::uint64_t> seed;
    bool                         reproducible = false;
  };

  void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--scenario", c.scenario, "scenario file (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "write the report here instead of stdout");
    cmd->add_option("--seed", c.seed, "override the scenario seed");
    cmd->add_flag("--reproducible", c.reproducible, "omit timings so reports are byte-identical");
  }

  std::string slurp(std::string const& path) {
    std::ifstream      in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  int emit(shrinklab::CommandOutput const& r, Common const& c) {
    if (c.out.empty()) {
      std::cout << r.text;
    } else {
      std::ofstream f(c.out, std::ios::binary);
      f << r.text;
      if (!f) {
        std::cerr << "error: cannot write " << c.out << "\n";
        return 2;
      }
    }
    if (!r.ok) {
      std::cerr << "verification failed\n";
    }
    return r.ok ? 0 : 1;
  }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shrinklab: filtrations of free operator groups, Tate cohomology and shrinking"};
  app.require_subcommand(1);

  Common      common;
  int         letters = 0, max_weight = 0;
  std::string group, suite;

  auto* witt = app.add_subcommand("witt", "necklace numbers W_D(1..max)");
  add_common(witt, common);
  witt->add_option("--letters", letters, "D");
  witt->add_option("--max-weight", max_weight);

  auto* truncate = app.add_subcommand("truncate", "dump a truncated free operator group and its layers");
  add_common(truncate, common);

  auto* cohomology = app.add_subcommand("cohomology", "Tate dimensions in degrees -2..2");
  add_common(cohomology, common);

  auto* shrink = app.add_subcommand("shrink", "tensor solver, annihilation or two-stage certificate");
  add_common(shrink, common);

  auto* ore = app.add_subcommand("ore", "Ore tower of a solvable group");
  add_common(ore, common);
  ore->add_option("--group", group, "corpus name");

  auto* verify = app.add_subcommand("verify", "run property suites");
  add_common(verify, common);
  verify->add_option("--suite", suite, "suite name or 'all'");

  CLI11_PARSE(app, argc, argv);

  auto*             sub     = app.get_subcommands().front();
  std::string const command = sub->get_name();
  try {
    if (common.scenario.empty()) {
      if (command == "witt" && letters > 0 && max_weight > 0) {
        return emit({shrinklab::cmd_witt(letters, max_weight) + "\n", true}, common);
      }
      if (command == "ore" && !group.empty()) {
        return emit({shrinklab::cmd_ore(group) + "\n", true}, common);
      }
      if (command == "verify" && !suite.empty()) {
        return emit(shrinklab::cmd_verify(suite, common.seed.value_or(1), common.reproducible), common);
      }
      std::cerr << "error: " << command << " needs --scenario\n";
      return 2;
    }
    shrinklab::RunOptions const options{common.seed, common.reproducible};
    return emit(shrinklab::run_scenario(command, slurp(common.scenario), options), common);
  } catch (shrinklab::Error const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
