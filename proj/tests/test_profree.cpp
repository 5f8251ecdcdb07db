#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>

#include "shrinklab/corpus.hpp"
#include "shrinklab/error.hpp"
#include "shrinklab/profree.hpp"

using namespace shrinklab;

namespace {
  GroupPtr grp(char const* name) {
    return share(load_group(name));
  }

  // aperiodic words that are strictly smallest among their rotations
  std::int64_t brute_lyndon_count(int d, int w) {
    std::int64_t     count = 0;
    std::vector<int> word(std::size_t(w), 0);
    while (true) {
      bool ok = true;
      for (int r = 1; r < w && ok; ++r) {
        std::vector<int> rot(word.begin() + r, word.end());
        rot.insert(rot.end(), word.begin(), word.begin() + r);
        ok = word < rot;
      }
      count += ok;
      int pos = w - 1;
      while (pos >= 0 && word[std::size_t(pos)] == d - 1) {
        word[std::size_t(pos--)] = 0;
      }
      if (pos < 0) {
        break;
      }
      ++word[std::size_t(pos)];
    }
    return count;
  }

  Word random_word(TruncatedFreeGroup const& t, std::mt19937_64& rng) {
    std::vector<std::int64_t> e(t.rank());
    for (std::size_t k = 0; k < e.size(); ++k) {
      e[k] = std::int64_t(rng() % std::uint64_t(t.modulus(t.hall()[k].weight)));
    }
    return t.reduce(e);
  }

  // random element of the coordinate-divisibility set of mu
  Word random_member(TruncatedFreeGroup const& t, FilterIndex mu, std::mt19937_64& rng) {
    std::vector<std::int64_t> e(t.rank());
    for (std::size_t k = 0; k < e.size(); ++k) {
      e[k] = t.modulus(mu, t.hall()[k].weight) * std::int64_t(rng() % 64);
    }
    return t.reduce(e);
  }

  using WordSet = std::set<std::vector<std::int64_t>>;

  // subgroup generated by the candidates; with `normal`, also closed under
  // conjugation by the letters
  WordSet closure(TruncatedFreeGroup const& t, std::vector<Word> candidates, bool normal) {
    WordSet           seen{t.identity().exponents()};
    std::vector<Word> elems{t.identity()};
    std::vector<Word> accepted;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      Word const g = candidates[c];
      if (seen.count(g.exponents())) {
        continue;
      }
      accepted.push_back(g);
      if (normal) {
        for (int a = 0; a < t.letters(); ++a) {
          auto l = t.letter_word(a);
          candidates.push_back(t.multiply(t.multiply(t.inverse(l), g), l));
        }
      }
      for (std::size_t at = 0; at < elems.size(); ++at) {
        for (auto const& a : accepted) {
          auto next = t.multiply(elems[at], a);
          if (seen.insert(next.exponents()).second) {
            elems.push_back(next);
          }
        }
      }
    }
    return seen;
  }

  std::vector<Word> as_words(TruncatedFreeGroup const& t, WordSet const& s) {
    std::vector<Word> out;
    for (auto const& e : s) {
      out.emplace_back(&t, e);
    }
    return out;
  }

  WordSet all_words(TruncatedFreeGroup const& t) {
    std::vector<Word> gens;
    for (int a = 0; a < t.letters(); ++a) {
      gens.push_back(t.letter_word(a));
    }
    return closure(t, gens, false);
  }

  // p-central series P^k and lower central series P_k computed from their
  // definitions inside the finite truncation
  struct Series {
    std::vector<WordSet> upper;  // upper[k] = P^k
    std::vector<WordSet> lower;  // lower[k] = P_k
  };

  Series central_series(TruncatedFreeGroup const& t, int depth) {
    Series s;
    s.upper.resize(std::size_t(depth) + 2);
    s.lower.resize(std::size_t(depth) + 2);
    s.upper[1] = s.lower[1] = all_words(t);
    std::vector<Word> letters;
    for (int a = 0; a < t.letters(); ++a) {
      letters.push_back(t.letter_word(a));
    }
    for (int k = 1; k <= depth; ++k) {
      std::vector<Word> gens;
      for (auto const& x : as_words(t, s.upper[std::size_t(k)])) {
        gens.push_back(t.power(x, t.p()));
        for (auto const& l : letters) {
          gens.push_back(t.commutator(x, l));
        }
      }
      s.upper[std::size_t(k) + 1] = closure(t, gens, true);
      gens.clear();
      for (auto const& x : as_words(t, s.lower[std::size_t(k)])) {
        for (auto const& l : letters) {
          gens.push_back(t.commutator(x, l));
        }
      }
      s.lower[std::size_t(k) + 1] = closure(t, gens, true);
    }
    return s;
  }

  // (P^i cap P_j) P^(i+1)
  WordSet refined(TruncatedFreeGroup const& t, Series const& s, FilterIndex mu) {
    std::vector<Word> gens;
    for (auto const& e : s.upper[std::size_t(mu.i)]) {
      if (s.lower[std::size_t(mu.j)].count(e)) {
        gens.emplace_back(&t, e);
      }
    }
    for (auto const& e : s.upper[std::size_t(mu.i) + 1]) {
      gens.emplace_back(&t, e);
    }
    return closure(t, gens, false);
  }

  std::size_t log_p(std::size_t n, Residue p) {
    std::size_t e = 0;
    while (n > 1) {
      REQUIRE(n % p == 0);
      n /= p;
      ++e;
    }
    return e;
  }
}  // namespace

TEST_CASE("witt dimensions and the Hall basis", "[profree]") {
  REQUIRE(witt_dim(2, 1) == 2);
  REQUIRE(witt_dim(2, 2) == 1);
  REQUIRE(witt_dim(2, 3) == 2);
  REQUIRE(witt_dim(4, 2) == 6);
  REQUIRE(witt_dim(1, 1) == 1);
  for (int w = 2; w <= 6; ++w) {
    REQUIRE(witt_dim(1, w) == 0);
  }
  for (int d = 1; d <= 4; ++d) {
    HallBasis h(d, 4);
    for (int w = 1; w <= 4; ++w) {
      REQUIRE(witt_dim(d, w) == brute_lyndon_count(d, w));
      REQUIRE(std::int64_t(h.count(w)) == witt_dim(d, w));
    }
    for (std::size_t k = 0; k < h.size(); ++k) {
      REQUIRE(h.hall_condition(k));
      REQUIRE(h.index_of(h[k].word) == int(k));
    }
  }
  HallBasis h2(2, 3);
  REQUIRE(h2.format(2) == "[x0,x1]");
  REQUIRE(h2.format(3) == "[x0,[x0,x1]]");
  REQUIRE(h2.format(4) == "[[x0,x1],x1]");
}

TEST_CASE("small truncations", "[profree]") {
  auto trivial = grp("C1");
  auto c2      = grp("C2");

  auto t1 = build_truncation(2, 2, trivial, {2, 1});
  REQUIRE(t1->log_order() == 2);
  REQUIRE(t1->rank() == 2);
  REQUIRE(t1->modulus(1) == 2);
  REQUIRE(t1->power(t1->letter_word(0), 2).is_identity());

  auto t2 = build_truncation(2, 1, c2, {2, 2});
  REQUIRE(t2->log_order() == 4);
  REQUIRE(t2->modulus(1) == 4);
  REQUIRE(t2->modulus(2) == 1);
  auto x = t2->generator(1, 0);
  auto y = t2->generator(1, 1);
  REQUIRE(t2->multiply(x, y) == t2->multiply(y, x));
  REQUIRE(!t2->power(x, 2).is_identity());
  REQUIRE(t2->power(x, 4).is_identity());
  REQUIRE(t2->g_act(1, x) == y);
  REQUIRE(t2->g_act(1, y) == x);

  auto t3 = build_truncation(3, 1, trivial, {3, 1});
  REQUIRE(t3->log_order() == 2);
  REQUIRE(t3->rank() == 1);
  auto g = t3->letter_word(0);
  REQUIRE(!t3->power(g, 3).is_identity());
  REQUIRE(t3->power(g, 9).is_identity());

  auto t4 = build_truncation(2, 1, c2, {3, 1});
  auto c  = t4->commutator(t4->generator(1, 0), t4->generator(1, 1));
  REQUIRE(c == t4->basic(2));
  REQUIRE(t4->commutator(t4->generator(1, 1), t4->generator(1, 0)) == t4->inverse(t4->basic(2)));
  REQUIRE(t4->g_act(1, t4->generator(1, 0)) == t4->generator(1, 1));

  auto t5 = build_truncation(3, 2, grp("C3"), {2, 1});
  REQUIRE(t5->letters() == 6);
  REQUIRE(t5->letter(2, 1) == 4);
  REQUIRE(t5->g_act(2, t5->generator(2, 2)) == t5->generator(2, t5->group().mul(2, 2)));

  REQUIRE_THROWS_AS(build_truncation(2, 1, trivial, {5, 1}), Error);
  REQUIRE_THROWS_AS(build_truncation(2, 9, trivial, {2, 1}), Error);
  REQUIRE_THROWS_AS(t1->multiply(t1->identity(), t2->identity()), Error);

  auto dump = t2->dump();
  REQUIRE(dump.find("order 2^4") != std::string::npos);
  REQUIRE(dump.find("weight 2: m=1 count=1 dropped") != std::string::npos);
}

TEST_CASE("group laws of the normal form arithmetic", "[profree]") {
  std::mt19937_64 rng(11);
  struct Case {
    Residue     p;
    std::size_t d;
    char const* g;
    FilterIndex top;
  };
  for (auto [p, d, name, top] : {Case{2, 2, "C1", {3, 1}},
                                 Case{2, 1, "C2", {3, 3}},
                                 Case{3, 1, "C2", {3, 2}},
                                 Case{2, 1, "C3", {4, 1}},
                                 Case{3, 2, "C1", {4, 2}},
                                 Case{2, 1, "V4", {4, 4}}}) {
    auto t = build_truncation(p, d, grp(name), top);
    INFO(t->dump());
    for (int n = 0; n < 60; ++n) {
      auto u = random_word(*t, rng);
      auto v = random_word(*t, rng);
      auto w = random_word(*t, rng);
      REQUIRE(t->multiply(t->multiply(u, v), w) == t->multiply(u, t->multiply(v, w)));
      REQUIRE(t->multiply(u, t->inverse(u)).is_identity());
      REQUIRE(t->multiply(t->inverse(u), u).is_identity());
      REQUIRE(t->commutator(u, v) ==
              t->multiply(t->multiply(t->inverse(u), t->inverse(v)), t->multiply(u, v)));
      REQUIRE(t->power(u, 5) == t->multiply(t->power(u, 2), t->power(u, 3)));
      REQUIRE(t->power(u, -3) == t->inverse(t->power(u, 3)));
      // normal forms round-trip through the series
      REQUIRE(t->reduce(t->coordinates(t->to_series(u))) == u);
      Element g = Element(rng() % t->group().order());
      Element h = Element(rng() % t->group().order());
      REQUIRE(t->g_act(g, t->multiply(u, v)) == t->multiply(t->g_act(g, u), t->g_act(g, v)));
      REQUIRE(t->g_act(t->group().mul(g, h), u) == t->g_act(g, t->g_act(h, u)));
    }
    // every generator has order m_1
    for (int a = 0; a < t->letters(); ++a) {
      auto x = t->letter_word(a);
      REQUIRE(t->power(x, t->modulus(1)).is_identity());
      REQUIRE(!t->power(x, t->modulus(1) / t->p()).is_identity());
    }
  }
}

TEST_CASE("class two product formula", "[profree]") {
  // x^a [x,y]^b (x^a' [x,y]^b') in the free class-2 group:
  // a + a', b_ij + b'_ij - a_j a'_i for i < j
  auto            t = build_truncation(3, 3, grp("C1"), {3, 1});
  std::mt19937_64 rng(4);
  auto const&     h = t->hall();
  for (int n = 0; n < 200; ++n) {
    auto u = random_word(*t, rng);
    auto v = random_word(*t, rng);
    std::vector<std::int64_t> e(t->rank());
    for (std::size_t k = 0; k < t->rank(); ++k) {
      e[k] = u.exponents()[k] + v.exponents()[k];
    }
    for (std::size_t k = h.begin_of(2); k < h.end_of(2); ++k) {
      int i = h[k].word[0];
      int j = h[k].word[1];
      e[k] -= u.exponents()[std::size_t(j)] * v.exponents()[std::size_t(i)];
    }
    REQUIRE(t->multiply(u, v) == t->reduce(e));
  }
}

TEST_CASE("divisibility criterion against the defined filtration", "[profree]") {
  struct Case {
    Residue     p;
    std::size_t d;
    char const* g;
    FilterIndex top;
  };
  for (auto [p, d, name, top] : {Case{2, 2, "C1", {3, 1}},
                                 Case{2, 2, "C1", {3, 2}},
                                 Case{2, 1, "C2", {3, 3}},
                                 Case{2, 2, "C1", {4, 1}},
                                 Case{3, 2, "C1", {3, 1}},
                                 Case{2, 3, "C1", {3, 1}},
                                 Case{3, 1, "C2", {3, 2}}}) {
    auto t = build_truncation(p, d, grp(name), top);
    INFO(t->dump());
    auto all = all_words(*t);
    REQUIRE(all.size() == std::size_t(std::pow(double(p), double(t->log_order())) + 0.5));
    auto s = central_series(*t, top.i);
    for (FilterIndex mu{1, 1}; mu <= top; mu = mu.succ()) {
      INFO("mu = " << to_string(mu));
      auto    expected = refined(*t, s, mu);
      WordSet criterion;
      for (auto const& e : all) {
        if (t->filtration_member(Word(t.get(), e), mu)) {
          criterion.insert(e);
        }
      }
      REQUIRE(criterion == expected);
      if (mu.succ() <= top) {
        // the layer is elementary abelian of Witt dimension
        auto next = refined(*t, s, mu.succ());
        REQUIRE(log_p(expected.size() / next.size(), p) ==
                std::size_t(witt_dim(t->letters(), mu.j)));
      }
    }
    REQUIRE(refined(*t, s, top).size() == 1);
  }
}

TEST_CASE("filtration membership examples", "[profree]") {
  auto t = build_truncation(2, 2, grp("C1"), {3, 1});
  REQUIRE(t->filtration_member(t->identity(), {1, 1}));
  REQUIRE(t->filtration_member(t->identity(), {3, 1}));
  REQUIRE(t->filtration_member(t->basic(2), {2, 2}));
  REQUIRE(!t->filtration_member(t->basic(2), {3, 1}));
  REQUIRE_THROWS_AS(t->filtration_member(t->identity(), {3, 2}), Error);

  for (Residue p : {2u, 3u}) {
    auto t2 = build_truncation(p, 1, grp("C1"), {2, 2});
    REQUIRE(t2->filtration_member(t2->power(t2->letter_word(0), p), {2, 1}));
    REQUIRE(!t2->filtration_member(t2->letter_word(0), {2, 1}));
  }
}

TEST_CASE("layer modules and the tensor surjection", "[profree]") {
  struct Case {
    Residue     p;
    std::size_t d;
    char const* g;
    FilterIndex top;
  };
  for (auto [p, d, name, top] : {Case{2, 2, "C1", {4, 1}},
                                 Case{3, 1, "C2", {3, 1}},
                                 Case{2, 1, "C3", {4, 1}},
                                 Case{2, 1, "V4", {3, 2}},
                                 Case{3, 1, "C4", {3, 3}}}) {
    auto t = build_truncation(p, d, grp(name), top);
    for (FilterIndex nu{1, 1}; nu.succ() <= top; nu = nu.succ()) {
      INFO(name << " p=" << p << " nu=" << to_string(nu));
      auto layer = layer_module(*t, nu);
      REQUIRE(std::int64_t(layer.dim()) == witt_dim(t->letters(), nu.j));
      auto psi = psi_nu_matrix(*t, nu);
      REQUIRE(rank(psi.matrix()) == layer.dim());
      if (nu.j == 1) {
        REQUIRE(psi.matrix() == FpMatrix::identity(p, layer.dim()));
      }
    }
  }

  // 𝓕/𝓕^2 is free of rank d, and the layer (2,1) matches it through x -> x^p
  auto t  = build_truncation(3, 1, grp("S3"), {3, 1});
  auto v  = layer_module(*t, {1, 1});
  auto v2 = layer_module(*t, {2, 1});
  auto r  = regular_module(t->group_ptr(), 3);
  REQUIRE(v.dim() == 6);
  for (Element g = 0; g < 6; ++g) {
    REQUIRE(v.rho(g) == r.rho(g));
    REQUIRE(v2.rho(g) == r.rho(g));
  }

  auto t2 = build_truncation(2, 1, grp("C2"), {3, 1});
  auto e  = layer_module(*t2, {2, 2});
  REQUIRE(e.dim() == 1);
  REQUIRE(e.is_trivial_action());
  auto psi = psi_nu_matrix(*t2, {2, 2});
  REQUIRE(psi.matrix() == FpMatrix::from_rows(2, 4, {{0, 1, 1, 0}}));
  auto t3   = build_truncation(3, 2, grp("C1"), {3, 1});
  auto psi3 = psi_nu_matrix(*t3, {2, 2});
  REQUIRE(psi3.matrix() == FpMatrix::from_rows(3, 4, {{0, 1, 2, 0}}));

  REQUIRE_THROWS_AS(layer_module(*t2, {3, 1}), Error);
}

TEST_CASE("lifting module surjections", "[profree]") {
  auto c2 = grp("C2");
  for (Residue p : {2u, 3u}) {
    auto tn = build_truncation(p, 1, c2, {3, 1});
    auto tm = build_truncation(p, 2, c2, {3, 1});

    auto id = lift_operator_hom(FpMatrix::identity(p, 2), tn, tn);
    for (FilterIndex nu{1, 1}; nu.succ() <= tn->nu_plus_1(); nu = nu.succ()) {
      auto m = id.layer_map(nu);
      REQUIRE(m == FpMatrix::identity(p, m.rows()));
    }

    // x_i + x_{n+i} -> x_i
    FpMatrix block(p, 2, 4);
    block(0, 0) = block(0, 2) = block(1, 1) = block(1, 3) = 1;
    auto hom = lift_operator_hom(block, tm, tn);
    REQUIRE(hom.apply(tm->generator(2, 1)) == tn->generator(1, 1));
    auto u = tm->commutator(tm->generator(1, 0), tm->generator(2, 1));
    REQUIRE(hom.apply(u) == tn->commutator(tn->generator(1, 0), tn->generator(1, 1)));

    auto vm    = layer_module(*tm, {1, 1});
    auto vn    = layer_module(*tn, {1, 1});
    auto basis = equivariant_hom_basis(vm, vn);
    std::mt19937_64 rng(p);
    int             done = 0;
    while (done < 20) {
      FpMatrix psi(p, 2, 4);
      for (auto const& b : basis) {
        psi = psi + b.scaled(Residue(rng() % p));
      }
      if (rank(psi) < 2) {
        continue;
      }
      auto h = lift_operator_hom(psi, tm, tn);
      // the lift is a homomorphism on random words
      for (int n = 0; n < 5; ++n) {
        auto a = random_word(*tm, rng);
        auto b = random_word(*tm, rng);
        REQUIRE(h.apply(tm->multiply(a, b)) == tn->multiply(h.apply(a), h.apply(b)));
        Element g = Element(rng() % 2);
        REQUIRE(h.apply(tm->g_act(g, a)) == tn->g_act(g, h.apply(a)));
      }
      ++done;
    }

    FpMatrix zero(p, 2, 4);
    REQUIRE_THROWS_AS(lift_operator_hom(zero, tm, tn), Error);
    FpMatrix skew(p, 2, 4);
    skew(0, 0) = skew(1, 2) = 1;
    REQUIRE_THROWS_AS(lift_operator_hom(skew, tm, tn), Error);
  }
}

TEST_CASE("power congruences on sampled members", "[profree]") {
  std::mt19937_64 rng(21);
  for (Residue p : {2u, 3u}) {
    auto t   = build_truncation(p, 2, grp("C1"), {4, 1});
    int  hit = 0;
    for (int n = 0; n < 150; ++n) {
      int  i = 1 + int(rng() % 2);
      int  j = 1 + int(rng() % 2);
      int  r = int(rng() % 3);
      auto x = random_member(*t, {i, 1}, rng);
      auto y = random_member(*t, {j, 1}, rng);
      std::int64_t unit = 1 + std::int64_t(rng() % 7);
      if (unit % p == 0) {
        ++unit;
      }
      std::int64_t a = unit;
      for (int k = 0; k < r; ++k) {
        a *= p;
      }
      std::int64_t const c2 = a * (a - 1) / 2;
      FilterIndex const  mu{i + j + std::max(1, r), 1};
      // u == v modulo F^(mu) means v^-1 u is a member
      auto congruent = [&](Word const& u, Word const& v, FilterIndex at) {
        return t->filtration_member(t->multiply(t->inverse(v), u), at);
      };
      INFO("p=" << p << " i=" << i << " j=" << j << " r=" << r << " a=" << a);
      if (mu <= t->nu_plus_1()) {
        auto rhs = t->multiply(t->multiply(t->power(x, a), t->power(y, a)),
                               t->power(t->commutator(y, x), c2));
        REQUIRE(congruent(t->power(t->multiply(x, y), a), rhs, mu));
        ++hit;
      }
      FilterIndex const nu{i + j + 1 + std::max(1, r), 1};
      if (nu <= t->nu_plus_1()) {
        auto xy = t->commutator(x, y);
        REQUIRE(congruent(t->commutator(t->power(x, a), y),
                          t->multiply(t->power(xy, a), t->power(t->commutator(xy, x), c2)),
                          nu));
        REQUIRE(congruent(t->commutator(x, t->power(y, a)),
                          t->multiply(t->power(xy, a), t->power(t->commutator(xy, y), c2)),
                          nu));
        ++hit;
      }
    }
    REQUIRE(hit > 50);
  }
}
