#include <catch_amalgamated.hpp>

#include <random>

#include "shrinklab/error.hpp"
#include "shrinklab/fp.hpp"

using namespace shrinklab;

namespace {
  FpMatrix random_matrix(Residue p, std::size_t r, std::size_t c, std::mt19937_64& rng) {
    FpMatrix m(p, r, c);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        m(i, j) = Residue(rng() % p);
      }
    }
    return m;
  }
}  // namespace

TEST_CASE("scalar arithmetic", "[fp]") {
  REQUIRE(fp::inv(3, 7) == 5);
  REQUIRE(fp::pow(2, 10, 1000003) == 1024);
  REQUIRE(fp::reduce(-1, 5) == 4);
  REQUIRE(fp::is_prime(2));
  REQUIRE(fp::is_prime(97));
  REQUIRE_FALSE(fp::is_prime(91));
}

TEST_CASE("rank and kernel of small matrices", "[fp]") {
  auto id = FpMatrix::identity(2, 3);
  REQUIRE(rank(id) == 3);
  REQUIRE(kernel(id).empty());

  FpMatrix zero(3, 2, 5);
  REQUIRE(rank(zero) == 0);
  REQUIRE(kernel(zero).size() == 5);

  auto ones = FpMatrix::from_rows(2, 2, {{1, 1}, {1, 1}});
  REQUIRE(rank(ones) == 1);
  auto k = kernel(ones);
  REQUIRE(k.size() == 1);
  REQUIRE(k[0] == FpVector{1, 1});
}

TEST_CASE("kernel, solve and inverses on random matrices", "[fp]") {
  std::mt19937_64 rng(17);
  for (Residue p : {2u, 3u, 5u, 7u}) {
    for (int trial = 0; trial < 40; ++trial) {
      std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
      auto        m = random_matrix(p, r, c, rng);
      auto        k = kernel(m);
      REQUIRE(rank(m) + k.size() == c);
      for (auto const& v : k) {
        REQUIRE(fp::is_zero(m.apply(v)));
      }
      FpVector x(c);
      for (auto& e : x) {
        e = Residue(rng() % p);
      }
      auto b   = m.apply(x);
      auto sol = solve(m, b);
      REQUIRE(sol.has_value());
      REQUIRE(m.apply(*sol) == b);

      auto sq = random_matrix(p, r, r, rng);
      if (rank(sq) == r) {
        REQUIRE(sq * inverse(sq) == FpMatrix::identity(p, r));
      } else {
        REQUIRE_THROWS_AS(inverse(sq), Error);
      }
      if (rank(m) == c) {
        REQUIRE(left_inverse(m) * m == FpMatrix::identity(p, c));
      }
      if (rank(m) == r) {
        REQUIRE(m * right_inverse(m) == FpMatrix::identity(p, r));
      }
      REQUIRE(column_basis(m).size() == rank(m));
    }
  }
}

TEST_CASE("solve detects inconsistent systems", "[fp]") {
  auto m = FpMatrix::from_rows(3, 2, {{1, 2}, {2, 1}});  // rank 1 over F_3
  REQUIRE_FALSE(solve(m, {1, 0}).has_value());
  REQUIRE(solve(m, {1, 2}).has_value());
}

TEST_CASE("kronecker product is bilinear in the row-major basis", "[fp]") {
  auto a = FpMatrix::from_rows(5, 2, {{1, 2}, {3, 4}});
  auto b = FpMatrix::from_rows(5, 2, {{0, 1}, {1, 0}});
  auto k = a.kron(b);
  REQUIRE(k.rows() == 4);
  REQUIRE(k(0, 1) == 1);
  REQUIRE(k(1, 0) == 1);
  REQUIRE(k(2, 3) == 4);
  REQUIRE(k(3, 2) == 4);
  REQUIRE(k(2, 1) == 3);
  REQUIRE(k(0, 3) == 2);
}
