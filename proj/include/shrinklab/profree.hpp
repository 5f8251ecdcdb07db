#pragma once

// Quotients F(d)/F(d)^(I,J) of the free pro-p group on generators x_{i,g}
// (1 <= i <= d, g in G), with G permuting generators by g' x_{i,g} = x_{i,g'g}.
//
// Elements are normal forms prod_k c_k^{e_k} over basic commutators of the
// Lyndon Hall basis, ordered by weight and then lexicographically on the
// underlying Lyndon word. Products are computed exactly in the free nilpotent
// group of the truncation's class through the Magnus series over Z (truncated
// by degree), and only the result is reduced by the per-weight moduli.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "shrinklab/fp.hpp"
#include "shrinklab/group.hpp"
#include "shrinklab/module.hpp"

namespace shrinklab {

  //! Necklace number (1/w) sum_{e | w} mu(e) D^(w/e).
  std::int64_t witt_dim(std::int64_t d, int w);

  struct HallCommutator {
    int              weight;
    int              letter;  // leaves only, else -1
    int              left;    // indices into the basis, -1 for leaves
    int              right;
    std::vector<int> word;    // the Lyndon word
  };

  class HallBasis {
   public:
    HallBasis(int letters, int max_weight);

    int letters() const noexcept {
      return _letters;
    }
    int max_weight() const noexcept {
      return _max_weight;
    }
    std::size_t size() const noexcept {
      return _items.size();
    }
    HallCommutator const& operator[](std::size_t k) const noexcept {
      return _items[k];
    }
    //! Index range [begin, end) of weight w.
    std::size_t begin_of(int w) const noexcept {
      return _offsets[w - 1];
    }
    std::size_t end_of(int w) const noexcept {
      return _offsets[w];
    }
    std::size_t count(int w) const noexcept {
      return end_of(w) - begin_of(w);
    }
    //! Index of a Lyndon word, or -1.
    int index_of(std::vector<int> const& word) const;
    //! [u, v] satisfies u < v and, when u = [u1, u2], u2 >= v (words compared
    //! lexicographically).
    bool hall_condition(std::size_t k) const;
    std::string format(std::size_t k) const;

   private:
    int                         _letters;
    int                         _max_weight;
    std::vector<HallCommutator> _items;
    std::vector<std::size_t>    _offsets;
  };

  struct TruncationCaps {
    int max_i       = 4;
    int max_letters = 8;
  };

  class TruncatedFreeGroup;

  class Word {
   public:
    Word() = default;
    Word(TruncatedFreeGroup const* parent, std::vector<std::int64_t> exps)
        : _parent(parent), _exps(std::move(exps)) {}

    TruncatedFreeGroup const* parent() const noexcept {
      return _parent;
    }
    std::vector<std::int64_t> const& exponents() const noexcept {
      return _exps;
    }
    bool is_identity() const noexcept;
    bool operator==(Word const& other) const noexcept {
      return _parent == other._parent && _exps == other._exps;
    }

   private:
    TruncatedFreeGroup const* _parent = nullptr;
    std::vector<std::int64_t> _exps;
  };

  class TruncatedFreeGroup {
   public:
    //! Throws CapExceeded, InvalidArgument (nu_plus_1 invalid, p not prime).
    TruncatedFreeGroup(Residue        p,
                       std::size_t    d,
                       GroupPtr       group,
                       FilterIndex    nu_plus_1,
                       TruncationCaps caps = {});
    TruncatedFreeGroup(TruncatedFreeGroup const&)            = delete;
    TruncatedFreeGroup& operator=(TruncatedFreeGroup const&) = delete;

    Residue p() const noexcept {
      return _p;
    }
    std::size_t d() const noexcept {
      return _d;
    }
    FiniteGroup const& group() const noexcept {
      return *_group;
    }
    GroupPtr const& group_ptr() const noexcept {
      return _group;
    }
    FilterIndex nu_plus_1() const noexcept {
      return _nu_plus_1;
    }
    int letters() const noexcept {
      return _letters;
    }
    //! Largest weight with a nontrivial modulus.
    int max_weight() const noexcept {
      return _class;
    }
    HallBasis const& hall() const noexcept {
      return _hall;
    }
    //! Number of surviving basic commutators (the length of a Word).
    std::size_t rank() const noexcept {
      return _rank;
    }
    std::int64_t modulus(int weight) const noexcept;
    //! Modulus that F^(mu) imposes on weight-w coordinates.
    std::int64_t modulus(FilterIndex mu, int weight) const noexcept;
    //! log_p of the order.
    std::size_t log_order() const;
    int         letter(std::size_t i, Element g) const;  // i is 1-based
    //! Letter permutation of g.
    std::vector<int> const& letter_action(Element g) const noexcept {
      return _letter_perm[g];
    }

    Word identity() const;
    Word generator(std::size_t i, Element g) const;
    Word letter_word(int a) const;
    //! The basic commutator c_k (k below rank()).
    Word basic(std::size_t k) const;
    //! Reduces arbitrary integer exponents into normal form.
    Word reduce(std::vector<std::int64_t> exps) const;

    Word multiply(Word const& u, Word const& v) const;
    Word inverse(Word const& u) const;
    Word power(Word const& u, std::int64_t n) const;
    //! u^-1 v^-1 u v.
    Word commutator(Word const& u, Word const& v) const;
    Word g_act(Element g, Word const& u) const;

    //! Throws IndexOutOfRange unless mu is valid and mu <= nu_plus_1.
    bool filtration_member(Word const& u, FilterIndex mu) const;
    //! Coordinates of u in the layer F^(nu)/F^(succ nu): weight-j exponents
    //! divided by p^(i-j), mod p. Throws InvalidArgument if u is not in F^(nu).
    FpVector layer_coords(Word const& u, FilterIndex nu) const;
    //! c_k^(p^(i-j)) for the k-th weight-j basic commutator.
    Word layer_basis_element(FilterIndex nu, std::size_t k) const;
    //! Throws IndexOutOfRange unless succ(nu) <= nu_plus_1.
    void require_layer(FilterIndex nu) const;

    //! Moduli table, Hall basis and G-action on letters.
    std::string dump() const;

    // Internal series arithmetic, exposed for tests.
    using Series = std::vector<std::vector<std::int64_t>>;
    Series to_series(Word const& u) const;
    //! Mal'cev coordinates of a unit series, unreduced.
    std::vector<std::int64_t> coordinates(Series s) const;

   private:
    struct Term {
      int          degree;
      std::size_t  index;
      std::int64_t coef;
    };
    using Sparse = std::vector<Term>;

    void   check_parent(Word const& u) const;
    Series unit_series() const;
    void   right_mul_factor(Series& s, std::size_t k, std::int64_t e) const;
    void   left_mul_factor(Series& s, std::size_t k, std::int64_t e) const;
    void   right_mul_word(Series& s, Word const& u, bool inverse) const;
    Series mul(Series const& a, Series const& b) const;
    Series inv(Series const& a) const;
    Sparse factor_terms(std::size_t k, std::int64_t e) const;

    Residue                       _p;
    std::size_t                   _d;
    GroupPtr                      _group;
    FilterIndex                   _nu_plus_1;
    int                           _letters;
    int                           _class;
    HallBasis                     _hall;
    std::size_t                   _rank;
    std::vector<std::size_t>      _pow_d;        // D^k
    std::vector<std::vector<int>> _letter_perm;  // per element
    // per basic commutator: powers Y^n (n >= 1) of Y = series(c_k) - 1
    std::vector<std::vector<Sparse>> _y_powers;
    // per basic commutator: its weight-w part (index, coefficient)
    std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> _lie;
    std::vector<std::size_t>               _word_index;  // index of the Lyndon word
  };

  using TruncationPtr = std::shared_ptr<TruncatedFreeGroup const>;

  TruncationPtr build_truncation(Residue        p,
                                 std::size_t    d,
                                 GroupPtr       group,
                                 FilterIndex    nu_plus_1,
                                 TruncationCaps caps = {});

  //! The layer F(d)^(nu)/F(d)^(succ nu) as an F_p[G]-module.
  FpGModule layer_module(TruncatedFreeGroup const& t, FilterIndex nu);

  //! x_1 (x) ... (x) x_j -> [x_1,[x_2,[...,x_j]]]^(p^(i-j)) from
  //! tensor_power(layer (1,1), j) to layer nu. Throws SurjectivityFailure.
  ModuleHom psi_nu_matrix(TruncatedFreeGroup const& t, FilterIndex nu);

  //! The same map as a bare matrix (layer dim x D^j), without building the
  //! tensor power module.
  FpMatrix theta_matrix(TruncatedFreeGroup const& t, FilterIndex nu);
  //! A right inverse of a surjective theta matrix; one nonzero per column when
  //! every row has a column that is a multiple of its unit vector.
  FpMatrix theta_section(FpMatrix const& theta);

  struct OperatorHom {
    TruncationPtr     source;
    TruncationPtr     target;
    std::vector<Word> letter_images;  // per source letter, in target
    std::vector<Word> basic_images;   // per surviving source basic commutator

    Word apply(Word const& u) const;
    //! psi_*: layer nu of the source -> layer nu of the target.
    FpMatrix layer_map(FilterIndex nu) const;
  };

  //! Extends a surjection of (1,1) layers to the truncated operator groups and
  //! checks psi_* theta(source) = theta(target) psi^(x)j on every layer up to
  //! nu_plus_1. Throws NotSurjective, NotEquivariant, InvalidArgument.
  OperatorHom lift_operator_hom(FpMatrix const& psi_bar, TruncationPtr source, TruncationPtr target);

}  // namespace shrinklab
