#include <catch_amalgamated.hpp>

#include "shrinklab/cohom.hpp"
#include "shrinklab/corpus.hpp"
#include "shrinklab/error.hpp"
#include "shrinklab/scenario.hpp"
#include "shrinklab/suites.hpp"

using namespace shrinklab;

namespace {
  GroupPtr grp(char const* name) {
    return share(load_group(name));
  }

  ErrorKind kind_of(std::function<void()> const& f) {
    try {
      f();
    } catch (Error const& e) {
      return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::InvalidArgument;
  }

  ErrorKind scenario_error(std::string const& command, std::string const& text) {
    return kind_of([&] { run_scenario(command, text, {}); });
  }

  bool contains(std::string const& text, std::string const& what) {
    return text.find(what) != std::string::npos;
  }
}  // namespace

TEST_CASE("witt table", "[cli]") {
  CHECK(cmd_witt(2, 3) == "2 1 2");
  CHECK(cmd_witt(1, 3) == "1 0 0");
  CHECK(cmd_witt(4, 2) == "4 6");
  std::string const scenario = R"j({"command":"witt","letters":2,"max_weight":3})j";
  CHECK(run_scenario("witt", scenario, {}).text == "2 1 2\n");
}

TEST_CASE("Ore listing", "[cli]") {
  CHECK(cmd_ore("S4") == "V4 ⋊ S3 ; C3 ⋊ C2 ; C2");
  CHECK(cmd_ore("S3") == "C3 ⋊ C2 ; C2");
  CHECK(cmd_ore("C6") == "C6");
}

TEST_CASE("module expressions", "[cli]") {
  auto const s3 = grp("S3");
  CHECK(parse_module("trivial", s3, 2).dim() == 1);
  CHECK(parse_module("trivial(3)", s3, 2).dim() == 3);
  CHECK(parse_module("regular^2", s3, 2).dim() == 12);
  CHECK(parse_module("aug", s3, 3).dim() == 5);
  CHECK(parse_module("tensor(aug, dual(aug))", s3, 3).dim() == 25);
  CHECK(parse_module("sum(trivial, regular)^2", s3, 2).dim() == 14);
  CHECK(parse_module("ind(C2)", s3, 2).dim() == 3);
  CHECK(parse_module("ind(C3)", s3, 2).dim() == 2);
  CHECK(parse_module("twist(trivial, [1, 2])", s3, 3).rho(2) == parse_module("trivial", s3, 3).rho(2).scaled(2));
  CHECK(parse_module("layer(1, (2,2))", grp("C2"), 2).dim() == 1);

  CHECK(kind_of([&] { parse_module("trivial(", s3, 2); }) == ErrorKind::ParseError);
  CHECK(kind_of([&] { parse_module("free", s3, 2); }) == ErrorKind::ParseError);
  CHECK(kind_of([&] { parse_module("regular regular", s3, 2); }) == ErrorKind::ParseError);
  CHECK(kind_of([&] { parse_module("ind(C5)", s3, 2); }) == ErrorKind::ParseError);
}

TEST_CASE("scenario schema is strict", "[cli]") {
  std::string const unknown_key = R"j({"command":"truncate","group":"C2","p":2,"d":1,"nu_plus_1":"(2,2)","x":1})j";
  std::string const missing_p   = R"j({"command":"truncate","group":"C2","d":1,"nu_plus_1":"(2,2)"})j";
  std::string const missing_k   = R"j({"command":"shrink","mode":"annihilate","group":"C2","p":2,"n":1,"nu":"(2,2)",
                                     "coefficients":"trivial","level":3,"targets":"random(1,1)"})j";
  std::string const witt        = R"j({"command":"witt","letters":2,"max_weight":3})j";
  std::string const composite_p = R"j({"command":"cohomology","group":"C2","p":4,"module":"trivial"})j";
  std::string const short_target = R"j({"command":"shrink","mode":"tensor","group":"C2","p":2,"m":"regular",
                                      "n":"trivial","s":1,"r":3,"targets":[[0,0]]})j";
  CHECK(scenario_error("truncate", unknown_key) == ErrorKind::ParseError);
  CHECK(scenario_error("truncate", missing_p) == ErrorKind::ParseError);
  CHECK(scenario_error("shrink", missing_k) == ErrorKind::ParseError);
  CHECK(scenario_error("ore", witt) == ErrorKind::ParseError);
  CHECK(scenario_error("witt", "not json") == ErrorKind::ParseError);
  CHECK(scenario_error("cohomology", composite_p) == ErrorKind::ParseError);
  CHECK(scenario_error("shrink", short_target) == ErrorKind::ParseError);
}

TEST_CASE("truncation scenarios", "[cli]") {
  std::string const c2 = R"j({"command":"truncate","group":"C2","p":2,"d":1,"nu_plus_1":"(2,2)"})j";
  auto const        a  = run_scenario("truncate", c2, {});
  CHECK(contains(a.text, "order 16\n"));
  CHECK(contains(a.text, "  (1,1) 2\n  (2,1) 2\n"));

  std::string const c1 = R"j({"command":"truncate","group":"C1","p":2,"d":2,"nu_plus_1":"(2,1)"})j";
  auto const        b  = run_scenario("truncate", c1, {});
  CHECK(contains(b.text, "order 4\n"));
  CHECK(contains(b.text, "layers\n  (1,1) 2\n"));

  std::string const c2_p3 = R"j({"command":"truncate","group":"C2","p":3,"d":1,"nu_plus_1":"(3,1)"})j";
  CHECK(contains(run_scenario("truncate", c2_p3, {}).text, "  (1,1) 2\n  (2,1) 2\n  (2,2) 1\n"));

  std::string const perm =
      R"j({"command":"truncate","group":{"degree":2,"generators":["(0 1)"]},"p":2,"d":1,"nu_plus_1":"(2,2)"})j";
  CHECK(contains(run_scenario("truncate", perm, {}).text, "order 16\n"));
}

TEST_CASE("cohomology scenarios", "[cli]") {
  std::string const trivial = R"j({"command":"cohomology","group":"C2","p":2,"module":"trivial"})j";
  std::string const regular = R"j({"command":"cohomology","group":"C2","p":2,"module":"regular"})j";
  std::string const layer   = R"j({"command":"cohomology","group":"S3","p":2,"module":"layer(1,(2,2))"})j";
  auto const        a       = run_scenario("cohomology", trivial, {});
  CHECK(contains(a.text, "dims 1 1 1 1 1\n"));
  CHECK(a.ok);
  CHECK(contains(run_scenario("cohomology", regular, {}).text, "dims 0 0 0 0 0\n"));
  auto const c = run_scenario("cohomology", layer, {});
  CHECK(c.ok);
  CHECK_FALSE(contains(c.text, "MISMATCH"));
}

TEST_CASE("shrink scenarios", "[cli]") {
  std::string const zero_targets = R"j({"command":"shrink","mode":"tensor","group":"C2","p":2,"m":"regular",
                                       "n":"trivial","s":1,"r":3,"targets":[[0,0,0,0,0,0]]})j";
  auto const        zero         = run_scenario("shrink", zero_targets, {});
  CHECK(zero.ok);
  CHECK(contains(zero.text, "strategy trivial\n"));
  CHECK(contains(zero.text, "verified true\n"));

  std::string const random_targets = R"j({"command":"shrink","mode":"tensor","group":"C1","p":3,"m":"trivial",
                                         "n":"trivial","s":2,"r":5,"targets":"random(4,2)","seed":9})j";
  auto const        rnd            = run_scenario("shrink", random_targets, {});
  CHECK(rnd.ok);
  CHECK(rnd.text == run_scenario("shrink", random_targets, {}).text);

  std::string const annihilate = R"j({"command":"shrink","mode":"annihilate","group":"C2","p":2,"n":1,"nu":"(2,2)",
                                     "k":-1,"coefficients":"trivial","level":"required","targets":"random(2,1)"})j";
  auto const        ann        = run_scenario("shrink", annihilate, {});
  CHECK(ann.ok);
  CHECK(contains(ann.text, "route blocks"));
}

TEST_CASE("verify reports", "[cli]") {
  auto const a = cmd_verify("witt", 3, true);
  auto const b = cmd_verify("witt", 3, true);
  CHECK(a.ok);
  CHECK(a.text == b.text);
  CHECK(contains(a.text, "\"statement\""));
  CHECK_FALSE(contains(a.text, "elapsed"));
  CHECK(contains(cmd_verify("witt", 3, false).text, "elapsed_seconds"));
  CHECK(kind_of([] { run_suite("no-such-suite"); }) == ErrorKind::NotFound);
  CHECK(suite_names().size() == 14);
}
