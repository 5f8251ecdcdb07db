#include "shrinklab/group.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "shrinklab/error.hpp"
#include "shrinklab/fp.hpp"

namespace shrinklab {

  ////////////////////////////////////////////////////////////////////////
  // FiniteGroup
  ////////////////////////////////////////////////////////////////////////

  FiniteGroup::FiniteGroup()
      : _order(1), _table{0}, _inv{0}, _gens{}, _name("C1") {}

  FiniteGroup::FiniteGroup(std::size_t          order,
                           std::vector<Element> table,
                           std::vector<Element> generators,
                           std::string          name)
      : _order(order),
        _table(std::move(table)),
        _inv(order, 0),
        _gens(std::move(generators)),
        _name(std::move(name)) {
    SHRINKLAB_REQUIRE(_order >= 1 && _table.size() == _order * _order,
                      InvalidArgument,
                      "multiplication table has wrong size");
    for (auto x : _table) {
      SHRINKLAB_REQUIRE(x < _order, InvalidArgument, "table entry out of range");
    }
    for (Element a = 0; a < _order; ++a) {
      SHRINKLAB_REQUIRE(mul(0, a) == a && mul(a, 0) == a,
                        InvalidArgument,
                        "element 0 is not the identity");
      bool found = false;
      for (Element b = 0; b < _order; ++b) {
        if (mul(a, b) == 0) {
          SHRINKLAB_REQUIRE(mul(b, a) == 0, InvalidArgument, "inverse law");
          _inv[a] = b;
          found   = true;
          break;
        }
      }
      SHRINKLAB_REQUIRE(found, InvalidArgument, "element without inverse");
    }
    auto check = [this](Element a, Element b, Element c) {
      SHRINKLAB_REQUIRE(mul(mul(a, b), c) == mul(a, mul(b, c)),
                        InvalidArgument,
                        "multiplication is not associative");
    };
    if (_order <= 256) {
      for (Element a = 0; a < _order; ++a) {
        for (Element b = 0; b < _order; ++b) {
          for (Element c = 0; c < _order; ++c) {
            check(a, b, c);
          }
        }
      }
    } else {
      std::mt19937_64                        rng(0x5eed);
      std::uniform_int_distribution<Element> pick(0, Element(_order - 1));
      for (int t = 0; t < 200000; ++t) {
        check(pick(rng), pick(rng), pick(rng));
      }
    }
    for (auto g : _gens) {
      SHRINKLAB_REQUIRE(g < _order, InvalidArgument, "generator out of range");
    }
    SHRINKLAB_REQUIRE(closure(_gens).size() == _order,
                      InvalidArgument,
                      "generators do not generate the group");
  }

  Element FiniteGroup::pow(Element a, std::int64_t n) const noexcept {
    if (n < 0) {
      a = inv(a);
      n = -n;
    }
    Element result = 0;
    Element base   = a;
    while (n > 0) {
      if (n & 1) {
        result = mul(result, base);
      }
      base = mul(base, base);
      n >>= 1;
    }
    return result;
  }

  Element FiniteGroup::commutator(Element a, Element b) const noexcept {
    return mul(mul(inv(a), inv(b)), mul(a, b));
  }

  Element FiniteGroup::conjugate(Element g, Element h) const noexcept {
    return mul(mul(g, h), inv(g));
  }

  std::size_t FiniteGroup::element_order(Element a) const noexcept {
    std::size_t k = 1;
    for (Element x = a; x != 0; x = mul(x, a)) {
      ++k;
    }
    return k;
  }

  bool FiniteGroup::is_abelian() const noexcept {
    for (auto a : _gens) {
      for (auto b : _gens) {
        if (mul(a, b) != mul(b, a)) {
          return false;
        }
      }
    }
    return true;
  }

  std::vector<Element> FiniteGroup::closure(std::span<Element const> gens) const {
    std::vector<bool>    seen(_order, false);
    std::vector<Element> out{0};
    seen[0] = true;
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (auto g : gens) {
        Element y = mul(out[i], g);
        if (!seen[y]) {
          seen[y] = true;
          out.push_back(y);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Permutations
  ////////////////////////////////////////////////////////////////////////

  namespace {
    Permutation compose(Permutation const& a, Permutation const& b) {
      Permutation out(b.size());
      for (std::size_t i = 0; i < b.size(); ++i) {
        out[i] = a[b[i]];
      }
      return out;
    }
  }  // namespace

  FiniteGroup from_permutations(std::size_t                     degree,
                                std::vector<Permutation> const& perms,
                                std::size_t                     cap) {
    for (auto const& p : perms) {
      SHRINKLAB_REQUIRE(p.size() == degree, NotBijective, "wrong degree");
      std::vector<bool> hit(degree, false);
      for (auto x : p) {
        SHRINKLAB_REQUIRE(x < degree && !hit[x], NotBijective, "not a bijection");
        hit[x] = true;
      }
    }
    Permutation ident(degree);
    std::iota(ident.begin(), ident.end(), 0);
    std::map<Permutation, Element> index{{ident, 0}};
    std::vector<Permutation>       elems{ident};
    for (std::size_t i = 0; i < elems.size(); ++i) {
      for (auto const& g : perms) {
        auto y = compose(elems[i], g);
        if (index.emplace(y, Element(elems.size())).second) {
          elems.push_back(std::move(y));
          SHRINKLAB_REQUIRE(elems.size() <= cap,
                            ClosureExceedsCap,
                            "group order exceeds " + std::to_string(cap));
        }
      }
    }
    std::size_t const    n = elems.size();
    std::vector<Element> table(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        table[a * n + b] = index.at(compose(elems[a], elems[b]));
      }
    }
    std::vector<Element> gens;
    for (auto const& g : perms) {
      gens.push_back(index.at(g));
    }
    return FiniteGroup(n, std::move(table), std::move(gens));
  }

  Permutation parse_cycles(std::string_view text, std::size_t degree) {
    Permutation perm(degree);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<bool> used(degree, false);
    std::size_t       pos = 0;
    auto              skip = [&] {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == ',')) {
        ++pos;
      }
    };
    skip();
    while (pos < text.size()) {
      SHRINKLAB_REQUIRE(text[pos] == '(', ParseError, "expected '(' in cycle");
      ++pos;
      std::vector<std::uint32_t> cycle;
      for (;;) {
        skip();
        SHRINKLAB_REQUIRE(pos < text.size(), ParseError, "unterminated cycle");
        if (text[pos] == ')') {
          ++pos;
          break;
        }
        std::uint32_t v   = 0;
        auto          res = std::from_chars(text.data() + pos, text.data() + text.size(), v);
        SHRINKLAB_REQUIRE(res.ec == std::errc(), ParseError, "bad point in cycle");
        pos = res.ptr - text.data();
        SHRINKLAB_REQUIRE(v < degree, NotBijective, "point exceeds degree");
        SHRINKLAB_REQUIRE(!used[v], NotBijective, "point repeated in cycles");
        used[v] = true;
        cycle.push_back(v);
      }
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        perm[cycle[i]] = cycle[(i + 1) % cycle.size()];
      }
      skip();
    }
    return perm;
  }

  std::string format_cycles(Permutation const& perm) {
    std::string       out;
    std::vector<bool> seen(perm.size(), false);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if (seen[i] || perm[i] == i) {
        continue;
      }
      out += "(";
      std::size_t j = i;
      bool        first = true;
      do {
        if (!first) {
          out += " ";
        }
        first   = false;
        seen[j] = true;
        out += std::to_string(j);
        j = perm[j];
      } while (j != i);
      out += ")";
    }
    return out.empty() ? "()" : out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Subgroups
  ////////////////////////////////////////////////////////////////////////

  Subgroup::Subgroup(FiniteGroup const& g, std::vector<Element> elements)
      : _elements(std::move(elements)), _mask(g.order(), false) {
    std::sort(_elements.begin(), _elements.end());
    _elements.erase(std::unique(_elements.begin(), _elements.end()),
                    _elements.end());
    for (auto e : _elements) {
      SHRINKLAB_REQUIRE(e < g.order(), InvalidArgument, "element out of range");
      _mask[e] = true;
    }
    SHRINKLAB_REQUIRE(contains(0), InvalidArgument, "subgroup lacks identity");
    for (auto a : _elements) {
      SHRINKLAB_REQUIRE(contains(g.inv(a)), InvalidArgument, "not closed under inverse");
      for (auto b : _elements) {
        SHRINKLAB_REQUIRE(contains(g.mul(a, b)), InvalidArgument, "not closed under product");
      }
    }
  }

  Subgroup Subgroup::trivial(FiniteGroup const& g) {
    return Subgroup(g, {0});
  }

  Subgroup Subgroup::whole(FiniteGroup const& g) {
    std::vector<Element> all(g.order());
    std::iota(all.begin(), all.end(), 0);
    return Subgroup(g, std::move(all));
  }

  bool Subgroup::is_subset_of(Subgroup const& that) const noexcept {
    for (auto e : _elements) {
      if (!that.contains(e)) {
        return false;
      }
    }
    return true;
  }

  std::strong_ordering Subgroup::operator<=>(Subgroup const& that) const noexcept {
    if (auto c = _elements.size() <=> that._elements.size(); c != 0) {
      return c;
    }
    return _elements <=> that._elements;
  }

  SubgroupGroup as_group(FiniteGroup const& g, Subgroup const& h) {
    auto const&          el = h.elements();  // sorted, el[0] == identity
    std::size_t const    n  = el.size();
    std::vector<Element> local(g.order(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      local[el[i]] = Element(i);
    }
    std::vector<Element> table(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        table[a * n + b] = local[g.mul(el[a], el[b])];
      }
    }
    // a small generating set: greedy over elements
    std::vector<Element> gens;
    std::vector<Element> span{0};
    for (std::size_t i = 1; i < n && span.size() < n; ++i) {
      if (!std::binary_search(span.begin(), span.end(), el[i])) {
        gens.push_back(el[i]);
        span = g.closure(gens);
      }
    }
    std::vector<Element> local_gens;
    for (auto x : gens) {
      local_gens.push_back(local[x]);
    }
    return {FiniteGroup(n, std::move(table), std::move(local_gens)), el};
  }

  Subgroup generated_subgroup(FiniteGroup const& g, std::span<Element const> gens) {
    return Subgroup(g, g.closure(gens));
  }

  Subgroup intersection(FiniteGroup const& g, Subgroup const& a, Subgroup const& b) {
    std::vector<Element> out;
    for (auto e : a.elements()) {
      if (b.contains(e)) {
        out.push_back(e);
      }
    }
    return Subgroup(g, std::move(out));
  }

  Subgroup join(FiniteGroup const& g, Subgroup const& a, Subgroup const& b) {
    std::vector<Element> gens(a.elements());
    gens.insert(gens.end(), b.elements().begin(), b.elements().end());
    return generated_subgroup(g, gens);
  }

  Subgroup commutator_subgroup(FiniteGroup const& g, Subgroup const& a, Subgroup const& b) {
    std::set<Element> gens;
    for (auto x : a.elements()) {
      for (auto y : b.elements()) {
        gens.insert(g.commutator(x, y));
      }
    }
    std::vector<Element> v(gens.begin(), gens.end());
    return generated_subgroup(g, v);
  }

  Subgroup power_subgroup(FiniteGroup const& g, Subgroup const& a, std::uint32_t p) {
    std::set<Element> gens;
    for (auto x : a.elements()) {
      gens.insert(g.pow(x, p));
    }
    std::vector<Element> v(gens.begin(), gens.end());
    return generated_subgroup(g, v);
  }

  std::size_t product_size(FiniteGroup const& g, Subgroup const& a, Subgroup const& b) {
    return a.order() * b.order() / intersection(g, a, b).order();
  }

  bool is_normal(FiniteGroup const& g, Subgroup const& h) {
    for (auto x : g.generators()) {
      for (auto e : h.elements()) {
        if (!h.contains(g.conjugate(x, e))) {
          return false;
        }
      }
    }
    return true;
  }

  Subgroup center(FiniteGroup const& g) {
    std::vector<Element> out;
    for (Element a = 0; a < g.order(); ++a) {
      bool central = true;
      for (auto x : g.generators()) {
        if (g.mul(a, x) != g.mul(x, a)) {
          central = false;
          break;
        }
      }
      if (central) {
        out.push_back(a);
      }
    }
    return Subgroup(g, std::move(out));
  }

  std::vector<Subgroup> derived_series(FiniteGroup const& g) {
    std::vector<Subgroup> series{Subgroup::whole(g)};
    for (;;) {
      auto next = commutator_subgroup(g, series.back(), series.back());
      if (next == series.back()) {
        return series;
      }
      series.push_back(std::move(next));
    }
  }

  bool is_solvable(FiniteGroup const& g) {
    return derived_series(g).back().is_trivial();
  }

  std::vector<Subgroup> lower_central_series(FiniteGroup const& g) {
    auto const            whole = Subgroup::whole(g);
    std::vector<Subgroup> series{whole};
    for (;;) {
      auto next = commutator_subgroup(g, series.back(), whole);
      if (next == series.back()) {
        return series;
      }
      series.push_back(std::move(next));
    }
  }

  bool is_nilpotent(FiniteGroup const& g) {
    return lower_central_series(g).back().is_trivial();
  }

  std::optional<std::uint32_t> prime_of_pgroup(std::size_t order) {
    if (order < 2) {
      return std::nullopt;
    }
    std::uint32_t p = 2;
    while (order % p != 0) {
      ++p;
    }
    while (order % p == 0) {
      order /= p;
    }
    if (order != 1) {
      return std::nullopt;
    }
    return p;
  }

  namespace {
    void require_cap(FiniteGroup const& g, std::size_t cap) {
      SHRINKLAB_REQUIRE(g.order() <= cap,
                        OrderExceedsCap,
                        "group of order " + std::to_string(g.order())
                            + " exceeds the subgroup-enumeration cap "
                            + std::to_string(cap));
    }

    std::vector<std::uint32_t> prime_divisors(std::size_t n) {
      std::vector<std::uint32_t> out;
      for (std::uint32_t p = 2; p <= n; ++p) {
        if (n % p == 0) {
          out.push_back(p);
          while (n % p == 0) {
            n /= p;
          }
        }
      }
      return out;
    }
  }  // namespace

  std::vector<Subgroup> all_subgroups(FiniteGroup const& g, std::size_t cap) {
    require_cap(g, cap);
    std::set<std::vector<Element>>       seen;
    std::vector<std::vector<Element>>    queue;
    auto add = [&](std::vector<Element> els) {
      if (seen.insert(els).second) {
        queue.push_back(std::move(els));
      }
    };
    for (Element x = 0; x < g.order(); ++x) {
      Element gen[] = {x};
      add(g.closure(gen));
    }
    for (std::size_t i = 0; i < queue.size(); ++i) {
      std::vector<bool> in(g.order(), false);
      for (auto e : queue[i]) {
        in[e] = true;
      }
      for (Element x = 0; x < g.order(); ++x) {
        if (in[x]) {
          continue;
        }
        std::vector<Element> gens = queue[i];
        gens.push_back(x);
        // every element of the coset xH gives the same join
        for (auto h : queue[i]) {
          in[g.mul(x, h)] = true;
        }
        add(g.closure(gens));
      }
    }
    std::vector<Subgroup> out;
    out.reserve(queue.size());
    for (auto& els : queue) {
      out.emplace_back(g, std::move(els));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<Subgroup> maximal_subgroups(FiniteGroup const& g, std::size_t cap) {
    auto const            subs = all_subgroups(g, cap);
    std::vector<Subgroup> out;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i].order() == g.order()) {
        continue;
      }
      bool maximal = true;
      for (std::size_t j = 0; j < subs.size() && maximal; ++j) {
        if (subs[j].order() > subs[i].order() && subs[j].order() < g.order()
            && subs[i].is_subset_of(subs[j])) {
          maximal = false;
        }
      }
      if (maximal) {
        out.push_back(subs[i]);
      }
    }
    return out;
  }

  Subgroup frattini(FiniteGroup const& g, std::size_t cap) {
    auto     maxes  = maximal_subgroups(g, cap);
    Subgroup result = Subgroup::whole(g);
    for (auto const& m : maxes) {
      result = intersection(g, result, m);
    }
    return result;
  }

  Subgroup fitting(FiniteGroup const& g, std::size_t cap) {
    auto const subs   = all_subgroups(g, cap);
    Subgroup   result = Subgroup::trivial(g);
    for (auto p : prime_divisors(g.order())) {
      std::size_t sylow = 1;
      std::size_t n     = g.order();
      while (n % p == 0) {
        sylow *= p;
        n /= p;
      }
      // O_p(G): intersection of all Sylow p-subgroups
      Subgroup op = Subgroup::whole(g);
      for (auto const& s : subs) {
        if (s.order() == sylow) {
          op = intersection(g, op, s);
        }
      }
      result = join(g, result, op);
    }
    return result;
  }

  Subgroup proper_supplement(FiniteGroup const& g, Subgroup const& n, std::size_t cap) {
    SHRINKLAB_REQUIRE(is_normal(g, n), NotNormal, "N is not normal in G");
    auto const phi = frattini(g, cap);
    SHRINKLAB_REQUIRE(!n.is_subset_of(phi),
                      ContainedInFrattini,
                      "N is contained in the Frattini subgroup");
    // all_subgroups is sorted by (order, elements): the first hit is minimal
    for (auto const& u : all_subgroups(g, cap)) {
      if (u.order() < g.order() && product_size(g, n, u) == g.order()) {
        return u;
      }
    }
    SHRINKLAB_THROW(InternalVerifyFail, "no proper supplement found");
  }

  std::vector<OreStep> ore_tower(FiniteGroup const& g, std::size_t cap) {
    SHRINKLAB_REQUIRE(is_solvable(g), NotSolvable, "group is not solvable");
    require_cap(g, cap);
    std::vector<OreStep> tower;
    FiniteGroup          current = g;
    std::vector<Element> into_root(g.order());
    std::iota(into_root.begin(), into_root.end(), 0);
    while (current.order() > 1) {
      OreStep step{current, Subgroup::whole(current), Subgroup::trivial(current), into_root};
      if (!is_nilpotent(current)) {
        step.kernel = fitting(current, cap);
        step.actor  = proper_supplement(current, step.kernel, cap);
      }
      // (h,u) -> h u from F x| U (U acting by conjugation) onto G_k
      auto const& f = step.kernel.elements();
      auto const& u = step.actor.elements();
      std::vector<bool> hit(current.order(), false);
      for (auto h1 : f) {
        for (auto u1 : u) {
          hit[current.mul(h1, u1)] = true;
          for (auto h2 : f) {
            for (auto u2 : u) {
              Element h = current.mul(h1, current.conjugate(u1, h2));
              SHRINKLAB_REQUIRE(step.kernel.contains(h),
                                InternalVerifyFail,
                                "conjugation leaves the Fitting subgroup");
              Element lhs = current.mul(h, current.mul(u1, u2));
              Element rhs = current.mul(current.mul(h1, u1), current.mul(h2, u2));
              SHRINKLAB_REQUIRE(lhs == rhs,
                                InternalVerifyFail,
                                "Ore step map is not a homomorphism");
            }
          }
        }
      }
      SHRINKLAB_REQUIRE(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }),
                        InternalVerifyFail,
                        "Ore step map is not surjective");
      auto next = as_group(current, step.actor);
      tower.push_back(std::move(step));
      std::vector<Element> next_root(next.embedding.size());
      for (std::size_t i = 0; i < next.embedding.size(); ++i) {
        next_root[i] = into_root[next.embedding[i]];
      }
      into_root = std::move(next_root);
      current   = std::move(next.group);
    }
    return tower;
  }

  std::vector<Element> ore_reconstruction(std::vector<OreStep> const& tower) {
    if (tower.empty()) {
      return {0};
    }
    FiniteGroup const& root = tower.front().group;
    std::set<Element>  image{0};
    for (auto it = tower.rbegin(); it != tower.rend(); ++it) {
      std::set<Element> next;
      for (auto h : it->kernel.elements()) {
        for (auto u : image) {
          next.insert(root.mul(it->into_root[h], u));
        }
      }
      image = std::move(next);
    }
    return {image.begin(), image.end()};
  }

  ////////////////////////////////////////////////////////////////////////
  // Filtrations
  ////////////////////////////////////////////////////////////////////////

  std::string to_string(FilterIndex nu) {
    return "(" + std::to_string(nu.i) + "," + std::to_string(nu.j) + ")";
  }

  FilterIndex parse_filter_index(std::string_view text) {
    FilterIndex nu;
    std::string s;
    for (char c : text) {
      if (c != ' ') {
        s += c;
      }
    }
    SHRINKLAB_REQUIRE(s.size() >= 5 && s.front() == '(' && s.back() == ')',
                      ParseError,
                      "filter index must look like (i,j)");
    auto comma = s.find(',');
    SHRINKLAB_REQUIRE(comma != std::string::npos, ParseError, "missing comma in (i,j)");
    try {
      nu.i = std::stoi(s.substr(1, comma - 1));
      nu.j = std::stoi(s.substr(comma + 1, s.size() - comma - 2));
    } catch (std::exception const&) {
      SHRINKLAB_THROW(ParseError, "bad integer in filter index " + s);
    }
    SHRINKLAB_REQUIRE(nu.valid(), ParseError, "filter index needs i >= j >= 1");
    return nu;
  }

  std::vector<Subgroup> p_central_series(FiniteGroup const& g, std::uint32_t p) {
    auto const            whole = Subgroup::whole(g);
    std::vector<Subgroup> series{whole};
    while (!series.back().is_trivial()) {
      auto const& last = series.back();
      auto next = join(g, power_subgroup(g, last, p), commutator_subgroup(g, last, whole));
      SHRINKLAB_REQUIRE(next != last, NotPGroup, "p-central series stalls");
      series.push_back(std::move(next));
    }
    return series;
  }

  std::map<FilterIndex, Subgroup> pgroup_filtration(FiniteGroup const& pgroup,
                                                    std::uint32_t      p,
                                                    std::size_t        cap) {
    require_cap(pgroup, cap);
    if (pgroup.order() > 1) {
      auto q = prime_of_pgroup(pgroup.order());
      SHRINKLAB_REQUIRE(q && *q == p, NotPGroup, "order is not a power of p");
    }
    auto const pc = p_central_series(pgroup, p);     // pc[i-1] = P^i
    auto const lc = lower_central_series(pgroup);    // lc[j-1] = P_j
    auto upper = [&](int i) {
      return std::size_t(i - 1) < pc.size() ? pc[i - 1] : Subgroup::trivial(pgroup);
    };
    auto lower = [&](int j) {
      return std::size_t(j - 1) < lc.size() ? lc[j - 1] : Subgroup::trivial(pgroup);
    };
    std::map<FilterIndex, Subgroup> out;
    FilterIndex                     nu{1, 1};
    for (;;) {
      auto term = join(pgroup, intersection(pgroup, upper(nu.i), lower(nu.j)), upper(nu.i + 1));
      bool done = term.is_trivial();
      out.emplace(nu, std::move(term));
      if (done) {
        return out;
      }
      nu = nu.succ();
    }
  }

  OperatorRank operator_rank(FiniteGroup const&              pgroup,
                             std::uint32_t                   p,
                             FiniteGroup const&              actor,
                             std::vector<Permutation> const& action,
                             std::size_t                     cap) {
    if (pgroup.order() > 1) {
      auto q = prime_of_pgroup(pgroup.order());
      SHRINKLAB_REQUIRE(q && *q == p, NotPGroup, "order is not a power of p");
    }
    SHRINKLAB_REQUIRE(action.size() == actor.order(), InvalidArgument, "one automorphism per actor element");
    for (Element u = 0; u < actor.order(); ++u) {
      auto const& a = action[u];
      SHRINKLAB_REQUIRE(a.size() == pgroup.order(), InvalidArgument, "automorphism size");
      for (Element x = 0; x < pgroup.order(); ++x) {
        for (Element y = 0; y < pgroup.order(); ++y) {
          SHRINKLAB_REQUIRE(a[pgroup.mul(x, y)] == pgroup.mul(a[x], a[y]),
                            InvalidArgument,
                            "action is not by automorphisms");
        }
      }
      for (Element v = 0; v < actor.order(); ++v) {
        for (Element x = 0; x < pgroup.order(); ++x) {
          SHRINKLAB_REQUIRE(action[actor.mul(u, v)][x] == a[action[v][x]],
                            InvalidArgument,
                            "action is not a homomorphism");
        }
      }
    }
    auto const filtration = pgroup_filtration(pgroup, p, std::max<std::size_t>(kSubgroupCap, pgroup.order()));
    FilterIndex depth = std::prev(filtration.end())->first;

    auto const           whole = Subgroup::whole(pgroup);
    Subgroup const       phi   = join(pgroup, power_subgroup(pgroup, whole, p),
                              commutator_subgroup(pgroup, whole, whole));
    std::vector<Element> basis;
    Subgroup             span = phi;
    for (Element x = 0; x < pgroup.order(); ++x) {
      if (!span.contains(x)) {
        basis.push_back(x);
        Element gen[] = {x};
        span = join(pgroup, span, generated_subgroup(pgroup, gen));
      }
    }
    std::size_t const r = basis.size();
    if (r == 0) {
      return {0, depth};
    }
    // coordinates of P/Phi(P)
    std::vector<std::vector<std::uint32_t>> coord(pgroup.order());
    std::size_t                             total = 1;
    for (std::size_t i = 0; i < r; ++i) {
      total *= p;
    }
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<std::uint32_t> e(r);
      std::size_t                c = code;
      Element                    x = 0;
      for (std::size_t i = 0; i < r; ++i) {
        e[i] = std::uint32_t(c % p);
        c /= p;
        x = pgroup.mul(x, pgroup.pow(basis[i], e[i]));
      }
      for (auto f : phi.elements()) {
        coord[pgroup.mul(x, f)] = e;
      }
    }
    // orbit span of a set of vectors
    auto spans = [&](std::vector<std::size_t> const& codes) {
      std::vector<FpVector> vecs;
      for (auto code : codes) {
        std::size_t c = code;
        Element     x = 0;
        for (std::size_t i = 0; i < r; ++i) {
          x = pgroup.mul(x, pgroup.pow(basis[i], std::uint32_t(c % p)));
          c /= p;
        }
        for (Element u = 0; u < actor.order(); ++u) {
          auto const& v = coord[action[u][x]];
          vecs.emplace_back(v.begin(), v.end());
        }
      }
      return rank(FpMatrix::from_rows(p, r, vecs)) == r;
    };
    // greedy upper bound
    std::vector<std::size_t> greedy;
    {
      std::vector<FpVector> vecs;
      std::size_t           current = 0;
      for (std::size_t code = 1; code < total && current < r; ++code) {
        auto trial = greedy;
        trial.push_back(code);
        std::vector<FpVector> tv;
        // rank of the orbit span of the trial set
        for (auto c0 : trial) {
          std::size_t c = c0;
          Element     x = 0;
          for (std::size_t i = 0; i < r; ++i) {
            x = pgroup.mul(x, pgroup.pow(basis[i], std::uint32_t(c % p)));
            c /= p;
          }
          for (Element u = 0; u < actor.order(); ++u) {
            auto const& v = coord[action[u][x]];
            tv.emplace_back(v.begin(), v.end());
          }
        }
        std::size_t rk = rank(FpMatrix::from_rows(p, r, tv));
        if (rk > current) {
          greedy  = std::move(trial);
          current = rk;
        }
      }
    }
    std::size_t best = greedy.size();
    // exhaustive confirmation below the greedy bound
    for (std::size_t n = 1; n < best; ++n) {
      double combos = 1;
      for (std::size_t i = 0; i < n; ++i) {
        combos *= double(total - 1);
      }
      SHRINKLAB_REQUIRE(combos <= double(cap), CapExceeded,
                        "operator_rank search space exceeds the cap");
      std::vector<std::size_t> pick(n, 1);
      bool found = false;
      for (;;) {
        if (spans(pick)) {
          found = true;
          break;
        }
        std::size_t k = 0;
        while (k < n && ++pick[k] == total) {
          pick[k] = 1;
          ++k;
        }
        if (k == n) {
          break;
        }
      }
      if (found) {
        best = n;
        break;
      }
    }
    return {best, depth};
  }

  std::vector<std::size_t> signature(FiniteGroup const& g) {
    std::vector<std::size_t> orders;
    std::set<Element>        squares;
    for (Element a = 0; a < g.order(); ++a) {
      orders.push_back(g.element_order(a));
      squares.insert(g.mul(a, a));
    }
    std::sort(orders.begin(), orders.end());
    auto const whole = Subgroup::whole(g);
    std::vector<std::size_t> sig{g.order()};
    sig.insert(sig.end(), orders.begin(), orders.end());
    sig.push_back(center(g).order());
    sig.push_back(commutator_subgroup(g, whole, whole).order());
    sig.push_back(squares.size());
    return sig;
  }

}  // namespace shrinklab
