#pragma once

// Scenario files and the commands behind the shrinklab tool. Scenarios are
// JSON objects with a strict schema (docs/scenarios.md); every command
// returns its report text and whether all of its verifications passed.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "shrinklab/module.hpp"

namespace shrinklab {

  //! Module expressions over a fixed group and prime:
  //!   trivial | trivial(d) | regular | aug | dual(X) | tensor(X,Y) | sum(X,Y)
  //!   | ind(H) | twist(X,[v1,...]) | layer(d,(i,j)) and X^n for n copies.
  //! ind(H) takes the first subgroup (by order, then elements) that the
  //! corpus describes as H; twist values are on the group's generators.
  //! Throws ParseError.
  FpGModule parse_module(std::string_view text, GroupPtr group, Residue p);

  struct CommandOutput {
    std::string text;
    bool        ok = true;
  };

  struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides the scenario's seed
    bool                         reproducible = false;
  };

  //! "W_D(1) ... W_D(max_weight)".
  std::string cmd_witt(int letters, int max_weight);
  //! "V4 ⋊ S3 ; C3 ⋊ C2 ; C2" style listing of the Ore tower.
  std::string cmd_ore(std::string const& group);
  CommandOutput cmd_verify(std::string const& suite, std::uint64_t seed, bool reproducible);

  //! Runs a scenario document; `command` must match its "command" key.
  //! Throws ParseError on schema violations.
  CommandOutput run_scenario(std::string const& command, std::string_view json_text, RunOptions const& options);

}  // namespace shrinklab
