#include <catch_amalgamated.hpp>

#include <algorithm>

#include "shrinklab/corpus.hpp"
#include "shrinklab/error.hpp"
#include "shrinklab/group.hpp"

using namespace shrinklab;

namespace {
  FiniteGroup perm_group(std::size_t degree, std::vector<std::string> const& cycles) {
    std::vector<Permutation> perms;
    for (auto const& c : cycles) {
      perms.push_back(parse_cycles(c, degree));
    }
    return from_permutations(degree, perms);
  }

  // Independent oracle: x is a non-generator iff removing it from any
  // generating set containing it leaves a generating set. For tiny groups we
  // test this against all subgroups H: x in Phi(G) iff <H, x> = G implies H = G.
  std::vector<Element> nongenerators(FiniteGroup const& g) {
    auto                 subs = all_subgroups(g);
    std::vector<Element> out;
    for (Element x = 0; x < g.order(); ++x) {
      bool ok = true;
      for (auto const& h : subs) {
        if (h.order() == g.order()) {
          continue;
        }
        std::vector<Element> gens = h.elements();
        gens.push_back(x);
        if (g.closure(gens).size() == g.order()) {
          ok = false;
          break;
        }
      }
      if (ok) {
        out.push_back(x);
      }
    }
    return out;
  }
}  // namespace

TEST_CASE("permutation closure", "[fgroup]") {
  REQUIRE(perm_group(3, {"(0 1 2)", "(0 1)"}).order() == 6);
  REQUIRE(perm_group(1, {}).order() == 1);
  auto c4 = perm_group(4, {"(0 1 2 3)"});
  REQUIRE(c4.order() == 4);
  REQUIRE(c4.is_abelian());
  REQUIRE_THROWS_AS(perm_group(3, {"(0 1 1)"}), Error);
  try {
    from_permutations(10, {parse_cycles("(0 1 2 3 4 5 6 7 8 9)", 10), parse_cycles("(0 1)", 10)}, 10000);
    FAIL("S10 exceeds the closure cap");
  } catch (Error const& e) {
    REQUIRE(e.kind() == ErrorKind::ClosureExceedsCap);
  }
  REQUIRE(format_cycles(parse_cycles("(0 2)(1 3)", 4)) == "(0 2)(1 3)");
}

TEST_CASE("filter index successor", "[fgroup]") {
  REQUIRE(FilterIndex{2, 1}.succ() == FilterIndex{2, 2});
  REQUIRE(FilterIndex{2, 2}.succ() == FilterIndex{3, 1});
  REQUIRE(FilterIndex{1, 1}.succ() == FilterIndex{2, 1});
  REQUIRE(FilterIndex{2, 2} < FilterIndex{3, 1});
  REQUIRE(parse_filter_index("(3, 2)") == FilterIndex{3, 2});
  REQUIRE_THROWS_AS(parse_filter_index("(1,2)"), Error);
}

TEST_CASE("corpus loads and signatures are distinct", "[fgroup]") {
  auto const& corpus = builtin_corpus();
  REQUIRE(corpus.size() >= 50);
  std::vector<std::vector<std::size_t>> sigs;
  std::size_t                           small = 0;
  for (auto const& e : corpus) {
    auto g = e.build();
    if (g.order() <= 16) {
      ++small;
    }
    sigs.push_back(signature(g));
  }
  REQUIRE(small == 42);  // all groups of order at most 16 up to isomorphism
  auto sorted = sigs;
  std::sort(sorted.begin(), sorted.end());
  REQUIRE(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  REQUIRE(load_group("V4").order() == 4);
  REQUIRE(describe(load_group("C2xC2")) == "V4");
  REQUIRE_THROWS_AS(load_group("nope"), Error);
}

TEST_CASE("derived series and solvability", "[fgroup]") {
  auto s3 = load_group("S3");
  auto ds = derived_series(s3);
  REQUIRE(ds.size() == 3);
  REQUIRE(ds[1].order() == 3);
  REQUIRE(is_solvable(s3));
  REQUIRE(derived_series(load_group("C4")).size() == 2);
  auto a5 = load_group("A5");
  REQUIRE(derived_series(a5).size() == 1);
  REQUIRE_FALSE(is_solvable(a5));
  REQUIRE_THROWS_AS(ore_tower(a5), Error);
}

TEST_CASE("Frattini subgroup", "[fgroup]") {
  REQUIRE(frattini(load_group("S3")).is_trivial());
  auto c4 = perm_group(4, {"(0 1 2 3)"});
  auto f  = frattini(c4);
  REQUIRE(f.order() == 2);
  REQUIRE(f.elements() == std::vector<Element>{0, c4.pow(1, 2)});
  auto q8 = load_group("Q8");
  REQUIRE(frattini(q8) == center(q8));
  REQUIRE(frattini(q8).order() == 2);

  for (auto const& e : builtin_corpus()) {
    auto g = e.build();
    if (g.order() > 24) {
      continue;
    }
    INFO(e.name);
    REQUIRE(frattini(g).elements() == nongenerators(g));
    if (auto p = prime_of_pgroup(g.order())) {
      auto w = Subgroup::whole(g);
      REQUIRE(frattini(g) == join(g, power_subgroup(g, w, *p), commutator_subgroup(g, w, w)));
    }
  }
}

TEST_CASE("subgroup lattices include non-cyclic joins", "[fgroup]") {
  // A4: 1, three C2, four C3, V4, A4; S4 has 30 subgroups
  auto a4 = load_group("A4");
  REQUIRE(all_subgroups(a4).size() == 10);
  REQUIRE(all_subgroups(load_group("S4")).size() == 30);
  REQUIRE(all_subgroups(load_group("C2xC2xC2")).size() == 16);
  REQUIRE(fitting(a4).order() == 4);
}

TEST_CASE("Fitting subgroup", "[fgroup]") {
  REQUIRE(fitting(load_group("S3")).order() == 3);
  auto s4 = load_group("S4");
  auto f  = fitting(s4);
  REQUIRE(f.order() == 4);
  REQUIRE(is_normal(s4, f));
  REQUIRE(describe(as_group(s4, f).group) == "V4");
  auto d4 = load_group("D4");
  REQUIRE(fitting(d4).order() == 8);
}

TEST_CASE("proper supplements", "[fgroup]") {
  auto s3 = load_group("S3");
  REQUIRE(proper_supplement(s3, fitting(s3)).order() == 2);
  auto s4 = load_group("S4");
  auto u  = proper_supplement(s4, fitting(s4));
  REQUIRE(u.order() == 6);
  REQUIRE(describe(as_group(s4, u).group) == "S3");
  auto c2 = load_group("C2");
  REQUIRE(proper_supplement(c2, Subgroup::whole(c2)).is_trivial());

  auto c4 = load_group("C4");
  try {
    proper_supplement(c4, frattini(c4));
    FAIL("expected ContainedInFrattini");
  } catch (Error const& e) {
    REQUIRE(e.kind() == ErrorKind::ContainedInFrattini);
  }
  // a non-normal subgroup of order 2 in S3
  for (auto const& h : all_subgroups(s3)) {
    if (h.order() == 2) {
      try {
        proper_supplement(s3, h);
        FAIL("expected NotNormal");
      } catch (Error const& e) {
        REQUIRE(e.kind() == ErrorKind::NotNormal);
      }
      break;
    }
  }
}

TEST_CASE("Ore tower", "[fgroup]") {
  auto tower = ore_tower(load_group("S4"));
  REQUIRE(tower.size() == 3);
  std::vector<std::pair<std::string, std::string>> expected
      = {{"V4", "S3"}, {"C3", "C2"}, {"C2", "C1"}};
  for (std::size_t k = 0; k < 3; ++k) {
    auto const& s = tower[k];
    REQUIRE(describe(as_group(s.group, s.kernel).group) == expected[k].first);
    REQUIRE(describe(as_group(s.group, s.actor).group) == expected[k].second);
  }
  REQUIRE(ore_reconstruction(tower).size() == 24);

  auto c6 = ore_tower(load_group("C6"));
  REQUIRE(c6.size() == 1);
  REQUIRE(c6[0].kernel.order() == 6);
  REQUIRE(c6[0].actor.is_trivial());

  auto s3 = ore_tower(load_group("S3"));
  REQUIRE(s3.size() == 2);
  REQUIRE(s3[0].kernel.order() == 3);
  REQUIRE(s3[0].actor.order() == 2);
}

TEST_CASE("p-group filtrations", "[fgroup]") {
  auto c4 = load_group("C4");
  auto f  = pgroup_filtration(c4, 2);
  REQUIRE(f.size() == 3);
  REQUIRE(f.at({1, 1}).order() == 4);
  REQUIRE(f.at({2, 1}).order() == 2);
  REQUIRE(f.at({2, 2}).is_trivial());

  auto v4 = pgroup_filtration(load_group("V4"), 2);
  REQUIRE(v4.size() == 2);
  REQUIRE(v4.at({2, 1}).is_trivial());

  auto d4 = load_group("D4");
  auto fd = pgroup_filtration(d4, 2);
  REQUIRE(fd.rbegin()->first == FilterIndex{3, 1});
  REQUIRE(fd.at({2, 2}).order() == 2);
  REQUIRE(fd.at({3, 1}).is_trivial());

  REQUIRE_THROWS_AS(pgroup_filtration(load_group("S3"), 2), Error);

  // monotone, elementary abelian layers, P^(i,1) = P^i
  for (auto const& e : builtin_corpus()) {
    auto g = e.build();
    auto p = prime_of_pgroup(g.order());
    if (!p) {
      continue;
    }
    INFO(e.name);
    auto filt = pgroup_filtration(g, *p);
    auto pc   = p_central_series(g, *p);
    for (auto it = filt.begin(); std::next(it) != filt.end(); ++it) {
      auto const& big   = it->second;
      auto const& small = std::next(it)->second;
      REQUIRE(small.is_subset_of(big));
      for (auto x : big.elements()) {
        REQUIRE(small.contains(g.pow(x, *p)));
        for (auto y : big.elements()) {
          REQUIRE(small.contains(g.commutator(x, y)));
        }
      }
      if (it->first.j == 1) {
        REQUIRE(it->second == pc[it->first.i - 1]);
      }
    }
  }
}

TEST_CASE("operator rank", "[fgroup]") {
  auto v4 = load_group("V4");
  auto c2 = load_group("C2");
  // the generator of C2 swaps the two factors
  Permutation swap(4), ident(4);
  for (Element x = 0; x < 4; ++x) {
    ident[x] = x;
  }
  // elements: 0 = 1, 1 = a, 2 = b, 3 = ab (BFS order from gens (0 1), (2 3))
  swap = {0, 2, 1, 3};
  REQUIRE(operator_rank(v4, 2, c2, {ident, swap}).rank == 1);
  REQUIRE(operator_rank(v4, 2, FiniteGroup(), {ident}).rank == 2);
  auto     d4 = load_group("D4");
  Permutation id8(8);
  for (Element x = 0; x < 8; ++x) {
    id8[x] = x;
  }
  auto r = operator_rank(d4, 2, FiniteGroup(), {id8});
  REQUIRE(r.rank == 2);
  REQUIRE(r.depth == FilterIndex{3, 1});
}

TEST_CASE("Frattini is proper in Fitting for solvable corpus groups", "[fgroup]") {
  for (auto const& e : builtin_corpus()) {
    auto g = e.build();
    if (g.order() > 48 || g.order() == 1 || !is_solvable(g)) {
      continue;
    }
    INFO(e.name);
    auto phi = frattini(g);
    auto fit = fitting(g);
    REQUIRE(phi.is_subset_of(fit));
    REQUIRE(phi.order() < fit.order());
  }
}
