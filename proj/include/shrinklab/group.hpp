#pragma once

// Finite groups as explicit multiplication tables, subgroup machinery and
// the solvable-group reduction (Frattini, Fitting, supplements, Ore tower,
// refined p-central filtrations of finite p-groups).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shrinklab {

  using Element     = std::uint32_t;
  using Permutation = std::vector<std::uint32_t>;

  class FiniteGroup {
   public:
    FiniteGroup();  // trivial group
    //! Validates the group law (all triples up to order 256, a deterministic
    //! sample above) and that the generators generate.
    FiniteGroup(std::size_t          order,
                std::vector<Element> table,
                std::vector<Element> generators,
                std::string          name = {});

    std::size_t order() const noexcept {
      return _order;
    }
    Element mul(Element a, Element b) const noexcept {
      return _table[a * _order + b];
    }
    Element inv(Element a) const noexcept {
      return _inv[a];
    }
    static constexpr Element identity() noexcept {
      return 0;
    }
    std::vector<Element> const& generators() const noexcept {
      return _gens;
    }
    std::string const& name() const noexcept {
      return _name;
    }
    void set_name(std::string name) {
      _name = std::move(name);
    }

    Element     pow(Element a, std::int64_t n) const noexcept;
    Element     commutator(Element a, Element b) const noexcept;
    Element     conjugate(Element g, Element h) const noexcept;  // g h g^-1
    std::size_t element_order(Element a) const noexcept;
    bool        is_abelian() const noexcept;

    //! Elements of the subgroup generated by gens, sorted.
    std::vector<Element> closure(std::span<Element const> gens) const;

    bool operator==(FiniteGroup const& that) const noexcept {
      return _order == that._order && _table == that._table;
    }

   private:
    std::size_t          _order;
    std::vector<Element> _table;
    std::vector<Element> _inv;
    std::vector<Element> _gens;
    std::string          _name;
  };

  //! Default closure cap for permutation groups.
  inline constexpr std::size_t kClosureCap = 10000;
  //! Default cap for subgroup enumeration.
  inline constexpr std::size_t kSubgroupCap = 200;

  //! Group generated by permutations of {0..degree-1}. Element 0 is the
  //! identity; element i+1.. follow breadth-first order from the generators.
  FiniteGroup from_permutations(std::size_t                     degree,
                                std::vector<Permutation> const& perms,
                                std::size_t cap = kClosureCap);

  //! Parses cycle notation such as "(0 1 2)(3 4)" or "()".
  Permutation parse_cycles(std::string_view text, std::size_t degree);
  std::string format_cycles(Permutation const& perm);

  class Subgroup {
   public:
    Subgroup() = default;
    //! elements must be closed under the group law of g.
    Subgroup(FiniteGroup const& g, std::vector<Element> elements);
    static Subgroup trivial(FiniteGroup const& g);
    static Subgroup whole(FiniteGroup const& g);

    std::size_t order() const noexcept {
      return _elements.size();
    }
    std::vector<Element> const& elements() const noexcept {
      return _elements;
    }
    bool contains(Element e) const noexcept {
      return e < _mask.size() && _mask[e];
    }
    bool is_subset_of(Subgroup const& that) const noexcept;
    bool is_trivial() const noexcept {
      return _elements.size() == 1;
    }

    // order first, then lexicographic element list
    std::strong_ordering operator<=>(Subgroup const& that) const noexcept;
    bool operator==(Subgroup const& that) const noexcept {
      return _elements == that._elements;
    }

   private:
    std::vector<Element> _elements;
    std::vector<bool>    _mask;
  };

  //! A subgroup as a group in its own right; element k of the result is
  //! embedding[k] in the parent.
  struct SubgroupGroup {
    FiniteGroup          group;
    std::vector<Element> embedding;
  };
  SubgroupGroup as_group(FiniteGroup const& g, Subgroup const& h);

  Subgroup generated_subgroup(FiniteGroup const& g, std::span<Element const> gens);
  Subgroup intersection(FiniteGroup const& g, Subgroup const& a, Subgroup const& b);
  //! The subgroup generated by a and b.
  Subgroup join(FiniteGroup const& g, Subgroup const& a, Subgroup const& b);
  //! [a, b] = <[x,y] : x in a, y in b>
  Subgroup commutator_subgroup(FiniteGroup const& g, Subgroup const& a, Subgroup const& b);
  //! a^p = <x^p : x in a>
  Subgroup power_subgroup(FiniteGroup const& g, Subgroup const& a, std::uint32_t p);
  //! Size of the set product a*b.
  std::size_t product_size(FiniteGroup const& g, Subgroup const& a, Subgroup const& b);
  bool        is_normal(FiniteGroup const& g, Subgroup const& h);
  Subgroup    center(FiniteGroup const& g);

  std::vector<Subgroup> derived_series(FiniteGroup const& g);
  bool                  is_solvable(FiniteGroup const& g);
  std::vector<Subgroup> lower_central_series(FiniteGroup const& g);
  bool                  is_nilpotent(FiniteGroup const& g);
  //! The prime if the order is a prime power > 1.
  std::optional<std::uint32_t> prime_of_pgroup(std::size_t order);

  //! All subgroups, sorted by (order, element list). Cyclic-extension method.
  std::vector<Subgroup> all_subgroups(FiniteGroup const& g,
                                      std::size_t cap = kSubgroupCap);
  std::vector<Subgroup> maximal_subgroups(FiniteGroup const& g,
                                          std::size_t cap = kSubgroupCap);
  Subgroup frattini(FiniteGroup const& g, std::size_t cap = kSubgroupCap);
  Subgroup fitting(FiniteGroup const& g, std::size_t cap = kSubgroupCap);

  //! Minimal-order U != G with N*U = G; ties broken by the element list.
  Subgroup proper_supplement(FiniteGroup const& g,
                             Subgroup const&    n,
                             std::size_t        cap = kSubgroupCap);

  struct OreStep {
    FiniteGroup group;    // G_k, relabelled
    Subgroup    kernel;   // F(G_k), inside group
    Subgroup    actor;    // U_k, inside group
    // embedding of G_k's elements into the original group
    std::vector<Element> into_root;
  };

  //! The Ore recursion G_0 = G, G_{k+1} = proper_supplement(G_k, F(G_k)),
  //! stopping at the nilpotent step (kernel G_k, actor 1). Every step's map
  //! F(G_k) x| U_k -> G_k is verified to be a surjective homomorphism.
  std::vector<OreStep> ore_tower(FiniteGroup const& g,
                                 std::size_t        cap = kSubgroupCap);
  //! Rebuilds G from the tower as iterated products F_0 (F_1 (F_2 ...)).
  std::vector<Element> ore_reconstruction(std::vector<OreStep> const& tower);

  struct FilterIndex {
    int i = 1;
    int j = 1;

    FilterIndex succ() const noexcept {
      return i > j ? FilterIndex{i, j + 1} : FilterIndex{i + 1, 1};
    }
    bool valid() const noexcept {
      return j >= 1 && i >= j;
    }
    auto operator<=>(FilterIndex const&) const = default;
  };
  std::string to_string(FilterIndex nu);
  //! Parses "(i,j)".
  FilterIndex parse_filter_index(std::string_view text);

  std::vector<Subgroup> p_central_series(FiniteGroup const& g, std::uint32_t p);

  //! P^(i,j) = (P^i cap P_j) P^(i+1) for all i >= j >= 1, up to and including
  //! the first trivial term.
  std::map<FilterIndex, Subgroup> pgroup_filtration(FiniteGroup const& pgroup,
                                                    std::uint32_t      p,
                                                    std::size_t cap = kSubgroupCap);

  struct OperatorRank {
    std::size_t rank;   // minimal number of F_p[U]-generators of P/Phi(P)
    FilterIndex depth;  // first filtration index with trivial term
  };

  //! action[u] is the permutation of P's elements induced by u in U.
  OperatorRank operator_rank(FiniteGroup const&              pgroup,
                             std::uint32_t                   p,
                             FiniteGroup const&              actor,
                             std::vector<Permutation> const& action,
                             std::size_t                     cap = 1000000);

  //! Coarse isomorphism invariant: order, sorted element orders, centre
  //! size, derived subgroup size, number of squares.
  std::vector<std::size_t> signature(FiniteGroup const& g);

}  // namespace shrinklab
