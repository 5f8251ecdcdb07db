#include <catch_amalgamated.hpp>

#include <random>

#include "shrinklab/corpus.hpp"
#include "shrinklab/error.hpp"
#include "shrinklab/module.hpp"

using namespace shrinklab;

namespace {
  GroupPtr grp(char const* name) {
    return share(load_group(name));
  }

  // brute-force search for an invertible equivariant matrix (tiny dims only)
  bool isomorphic_by_search(FpGModule const& a, FpGModule const& b) {
    if (a.dim() != b.dim()) {
      return false;
    }
    std::size_t const n     = a.dim() * a.dim();
    std::size_t       total = 1;
    for (std::size_t i = 0; i < n; ++i) {
      total *= a.p();
    }
    for (std::size_t code = 0; code < total; ++code) {
      FpMatrix    m(a.p(), a.dim(), a.dim());
      std::size_t c = code;
      for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
          m(i, j) = Residue(c % a.p());
          c /= a.p();
        }
      }
      if (rank(m) == a.dim() && is_equivariant(a, b, m)) {
        return true;
      }
    }
    return false;
  }

  FpGModule random_module(GroupPtr g, Residue p, std::size_t dim, std::mt19937_64& rng) {
    // a random quotient-free construction: conjugate a permutation-like module
    // by a random invertible matrix, after summing small pieces
    FpGModule m = trivial_module(g, p, 1);
    switch (rng() % 3) {
      case 0: m = regular_module(g, p); break;
      case 1: m = augmentation_ideal(g, p); break;
      default: break;
    }
    while (m.dim() < dim) {
      m = direct_sum(m, rng() % 2 ? trivial_module(g, p, 1) : augmentation_ideal(g, p));
    }
    FpMatrix c;
    do {
      c = FpMatrix(p, m.dim(), m.dim());
      for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = 0; j < m.dim(); ++j) {
          c(i, j) = Residue(rng() % p);
        }
      }
    } while (rank(c) != m.dim());
    auto                  ci = inverse(c);
    std::vector<FpMatrix> rho;
    for (Element x = 0; x < g->order(); ++x) {
      rho.push_back(c * m.rho(x) * ci);
    }
    return FpGModule::from_all(g, p, std::move(rho));
  }
}  // namespace

TEST_CASE("regular module", "[gmod]") {
  auto c2 = grp("C2");
  auto r  = regular_module(c2, 2);
  REQUIRE(r.dim() == 2);
  REQUIRE(r.rho(1) == FpMatrix::from_rows(2, 2, {{0, 1}, {1, 0}}));
  auto s3 = grp("S3");
  auto r3 = regular_module(s3, 3);
  REQUIRE(r3.dim() == 6);
  REQUIRE(r3.is_homomorphism());
  for (Element g = 0; g < 6; ++g) {
    auto const& m = r3.rho(g);
    for (std::size_t i = 0; i < 6; ++i) {
      int ones = 0;
      for (std::size_t j = 0; j < 6; ++j) {
        ones += m(i, j) == 1;
        REQUIRE(m(i, j) <= 1);
      }
      REQUIRE(ones == 1);
    }
  }
  auto inv = invariants(r3);
  REQUIRE(inv.size() == 1);
  REQUIRE(inv[0] == FpVector(6, inv[0][0]));
}

TEST_CASE("augmentation ideal", "[gmod]") {
  auto a2 = augmentation_ideal(grp("C2"), 2);
  REQUIRE(a2.dim() == 1);
  REQUIRE(a2.is_trivial_action());

  auto c3 = grp("C3");
  auto a3 = augmentation_ideal(c3, 3);
  REQUIRE(a3.dim() == 2);
  REQUIRE(a3.is_homomorphism());
  Element s = c3->generators()[0];
  // basis {s - 1, s^2 - 1}: s(s-1) = (s^2-1) - (s-1), s(s^2-1) = -(s-1)
  REQUIRE(a3.rho(s) == FpMatrix::from_rows(3, 2, {{2, 2}, {1, 0}}));
  // same class as [[0,-1],[1,-1]] (the basis {s-1, s(s-1)})
  auto b = FpMatrix::from_columns(3, 2, {{1, 0}, {2, 1}});
  REQUIRE(inverse(b) * a3.rho(s) * b == FpMatrix::from_rows(3, 2, {{0, 2}, {1, 2}}));

  auto a23 = augmentation_ideal(grp("C2"), 3);
  REQUIRE(a23.rho(1) == FpMatrix::from_rows(3, 1, {{2}}));
  REQUIRE(invariants(a23).empty());
}

TEST_CASE("tensor, dual, sum, twist", "[gmod]") {
  auto c2 = grp("C2");
  auto r  = regular_module(c2, 2);
  REQUIRE(isomorphic_by_search(dual_module(r), r));
  REQUIRE(!equivariant_hom_basis(dual_module(r), r).empty());

  auto t = trivial_module(c2, 2, 1);
  auto t5 = tensor_power(t, 5);
  REQUIRE(t5.dim() == 1);
  REQUIRE(t5.is_trivial_action());

  auto c23  = grp("C2");
  auto chi  = character_from_generators(*c23, 3, {2});
  auto tw   = twist(trivial_module(c23, 3, 1), chi);
  REQUIRE(tw.rho(1)(0, 0) == 2);
  REQUIRE_THROWS_AS(character_from_generators(*grp("C3"), 3, {2}), Error);

  std::mt19937_64 rng(5);
  for (auto name : {"C2", "C3", "S3", "C4", "V4"}) {
    auto g = grp(name);
    for (Residue p : {2u, 3u}) {
      auto m = random_module(g, p, 1 + rng() % 3, rng);
      auto n = random_module(g, p, 1 + rng() % 3, rng);
      INFO(name << " p=" << p);
      auto mn = tensor_module(m, n);
      REQUIRE(mn.dim() == m.dim() * n.dim());
      REQUIRE(mn.is_homomorphism());
      REQUIRE(dual_module(m).is_homomorphism());
      REQUIRE(direct_sum(m, n).is_homomorphism());
      // double dual has literally the same matrices
      auto dd = dual_module(dual_module(m));
      for (Element x = 0; x < g->order(); ++x) {
        REQUIRE(dd.rho(x) == m.rho(x));
      }
      // functoriality: tensor and sum of equivariant maps stay equivariant
      auto hm = equivariant_hom_basis(m, m);
      auto hn = equivariant_hom_basis(n, n);
      for (auto const& a : hm) {
        for (auto const& b : hn) {
          ModuleHom(mn, mn, a.kron(b));
          ModuleHom(dual_module(m), dual_module(m), a.transpose());
        }
      }
      auto wrong = FpMatrix(p, m.dim(), m.dim());
      wrong(0, 0) = 1;
      if (!is_equivariant(m, m, wrong)) {
        REQUIRE_THROWS_AS(ModuleHom(m, m, wrong), Error);
      }
    }
  }
  REQUIRE_THROWS_AS(tensor_module(regular_module(grp("C2"), 2), regular_module(grp("C3"), 2)),
                    Error);
}

TEST_CASE("shift coefficients", "[gmod]") {
  auto c2 = grp("C2");
  auto m  = regular_module(c2, 2);
  auto s  = shift_coefficients(m, -1);
  REQUIRE(isomorphic_by_search(s, m));
  REQUIRE(shift_coefficients(trivial_module(c2, 2, 1), 2).dim() == 1);
  auto c3 = grp("C3");
  REQUIRE(shift_coefficients(trivial_module(c3, 3, 2), 0).dim() == 4);
  REQUIRE(shift_coefficients(trivial_module(c3, 3, 1), -3).dim() == 4);
  REQUIRE_THROWS_AS(shift_coefficients(m, 5), Error);
}

TEST_CASE("coinvariants, invariants, norm", "[gmod]") {
  auto c2 = grp("C2");
  auto r  = regular_module(c2, 2);
  auto co = coinvariants(r);
  REQUIRE(co.dim == 1);
  REQUIRE(invariants(r).size() == 1);
  REQUIRE(rank(norm_map(r)) == 1);

  auto t  = trivial_module(c2, 3, 3);
  auto ct = coinvariants(t);
  REQUIRE(ct.dim == 3);
  REQUIRE(ct.projection == FpMatrix::identity(3, 3));

  REQUIRE(invariants(augmentation_ideal(c2, 3)).empty());

  // free summands: invariants = coinvariants = number of copies
  for (auto name : {"C3", "S3", "D4"}) {
    auto g = grp(name);
    for (std::size_t copies : {1u, 2u, 3u}) {
      auto free = direct_sum(regular_module(g, 2), copies);
      REQUIRE(invariants(free).size() == copies);
      REQUIRE(coinvariants(free).dim == copies);
    }
  }

  // the projection kills exactly the span of (g - 1)v
  std::mt19937_64 rng(9);
  for (auto name : {"S3", "C4", "A4"}) {
    auto g = grp(name);
    auto m = random_module(g, 3, 4, rng);
    auto c = coinvariants(m);
    for (Element x = 0; x < g->order(); ++x) {
      REQUIRE((c.projection * (m.rho(x) - FpMatrix::identity(3, m.dim()))).is_zero());
    }
    REQUIRE(rank(c.projection) == c.dim);
  }
}

TEST_CASE("induced and restricted modules", "[gmod]") {
  auto s3   = grp("S3");
  auto subs = all_subgroups(*s3);
  for (auto const& h : subs) {
    auto ind = induced_trivial(s3, h, 2);
    REQUIRE(ind.dim() * h.order() == 6);
    REQUIRE(ind.is_homomorphism());
    REQUIRE(invariants(ind).size() == 1);
    auto res = restrict_module(regular_module(s3, 2), h);
    REQUIRE(res.group().order() == h.order());
    REQUIRE(res.is_homomorphism());
  }
  auto reps = coset_representatives(*s3, subs[1]);
  REQUIRE(reps.front() == 0);
  REQUIRE(std::is_sorted(reps.begin(), reps.end()));
}

TEST_CASE("module caps and validation", "[gmod]") {
  auto c2 = grp("C2");
  REQUIRE_THROWS_AS(trivial_module(c2, 2, 5000), Error);
  auto bad = FpMatrix::from_rows(3, 1, {{2}});  // order 2 on a generator of C3
  REQUIRE_THROWS_AS(FpGModule::from_generators(grp("C3"), 3, 1, {bad}), Error);
  auto ok = FpGModule::from_generators(c2, 3, 1, {bad});
  REQUIRE(ok.rho(1)(0, 0) == 2);
}
