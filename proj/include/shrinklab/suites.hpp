#pragma once

// Property suites behind `shrinklab verify` and the acceptance run. Each suite
// checks one mathematical statement on a deterministic sample drawn from a
// single seed, so two runs with the same seed produce identical reports.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace shrinklab {

  struct SuiteOptions {
    std::uint64_t seed = 1;
  };

  struct SuiteResult {
    std::string                          name;
    std::string                          statement;
    std::uint64_t                        checks   = 0;
    std::uint64_t                        failures = 0;
    std::map<std::string, std::uint64_t> counters;
    std::vector<std::string>             failed_cases;  // the first few

    bool passed() const noexcept {
      return failures == 0 && checks > 0;
    }
  };

  //! In run order; "all" runs every one of them.
  std::vector<std::string> const& suite_names();
  std::string                     suite_statement(std::string const& name);

  //! Throws NotFound for an unknown name.
  SuiteResult              run_suite(std::string const& name, SuiteOptions const& options = {});
  std::vector<SuiteResult> run_suites(std::string const& name, SuiteOptions const& options = {});

  //! JSON report; stable key order and no timings.
  std::string format_report(std::vector<SuiteResult> const& results, SuiteOptions const& options);

}  // namespace shrinklab
