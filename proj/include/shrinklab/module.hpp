#pragma once

// Finite-dimensional F_p[G]-modules with explicit action matrices for every
// group element, and the standard constructions on them.

#include <memory>
#include <string>
#include <vector>

#include "shrinklab/fp.hpp"
#include "shrinklab/group.hpp"

namespace shrinklab {

  using GroupPtr = std::shared_ptr<FiniteGroup const>;

  inline GroupPtr share(FiniteGroup g) {
    return std::make_shared<FiniteGroup const>(std::move(g));
  }

  //! Upper bound on dim^2 * |G| stored action entries.
  inline constexpr std::size_t kModuleEntryCap = 10'000'000;

  class FpGModule {
   public:
    FpGModule() = default;

    //! Action given on the group's generators, extended along the Cayley
    //! graph; throws InvalidArgument if the relations of G are violated.
    static FpGModule from_generators(GroupPtr                     group,
                                     Residue                      p,
                                     std::size_t                  dim,
                                     std::vector<FpMatrix> const& gen_action);

    //! Action given on every element; checked to be a homomorphism.
    static FpGModule from_all(GroupPtr group, Residue p, std::vector<FpMatrix> rho);

    //! As from_all without the homomorphism check; for constructions whose
    //! correctness follows from the inputs.
    static FpGModule trusted(GroupPtr group, Residue p, std::vector<FpMatrix> rho);

    Residue p() const noexcept {
      return _p;
    }
    std::size_t dim() const noexcept {
      return _dim;
    }
    FiniteGroup const& group() const noexcept {
      return *_group;
    }
    GroupPtr const& group_ptr() const noexcept {
      return _group;
    }
    FpMatrix const& rho(Element g) const noexcept {
      return (*_rho)[g];
    }
    FpVector act(Element g, FpVector const& v) const {
      return rho(g).apply(v);
    }

    //! Whether rho(x) rho(s) = rho(xs) for all x and generators s.
    bool is_homomorphism() const;
    bool is_trivial_action() const;

   private:
    FpGModule(GroupPtr group, Residue p, std::size_t dim, std::vector<FpMatrix> rho);

    GroupPtr                                     _group;
    Residue                                      _p   = 2;
    std::size_t                                  _dim = 0;
    std::shared_ptr<std::vector<FpMatrix> const> _rho;
  };

  bool same_group(FpGModule const& a, FpGModule const& b) noexcept;
  void require_same_group(FpGModule const& a, FpGModule const& b);

  class ModuleHom {
   public:
    //! Throws DimensionMismatch or NotEquivariant.
    ModuleHom(FpGModule source, FpGModule target, FpMatrix matrix);

    FpGModule const& source() const noexcept {
      return _source;
    }
    FpGModule const& target() const noexcept {
      return _target;
    }
    FpMatrix const& matrix() const noexcept {
      return _matrix;
    }
    bool is_surjective() const;

   private:
    FpGModule _source;
    FpGModule _target;
    FpMatrix  _matrix;
  };

  bool is_equivariant(FpGModule const& source, FpGModule const& target, FpMatrix const& m);

  //! Basis of Hom_G(source, target), each as a target.dim x source.dim matrix.
  std::vector<FpMatrix> equivariant_hom_basis(FpGModule const& source, FpGModule const& target);

  FpGModule trivial_module(GroupPtr g, Residue p, std::size_t dim = 1);
  //! Basis e_h indexed by elements; g e_h = e_{gh}.
  FpGModule regular_module(GroupPtr g, Residue p);
  //! Basis {h - 1 : h != 1} in element order.
  FpGModule augmentation_ideal(GroupPtr g, Residue p);
  //! Diagonal action, basis e_a (x) f_b at index a * dim N + b.
  FpGModule tensor_module(FpGModule const& m, FpGModule const& n);
  FpGModule tensor_power(FpGModule const& m, std::size_t s);  // s = 0 gives trivial
  //! Contragredient action rho(g^-1)^T in the dual basis.
  FpGModule dual_module(FpGModule const& m);
  FpGModule direct_sum(FpGModule const& m, FpGModule const& n);
  FpGModule direct_sum(FpGModule const& m, std::size_t r);
  //! rho'(g) = chi(g)^-1 rho(g); chi gives a value for every element and must
  //! be a homomorphism G -> F_p^x.
  FpGModule twist(FpGModule const& m, std::vector<Residue> const& chi);
  //! Extends values on the group's generators to a character; throws
  //! InvalidArgument if no character has those values.
  std::vector<Residue> character_from_generators(FiniteGroup const&          g,
                                                 Residue                     p,
                                                 std::vector<Residue> const& values);
  std::vector<Residue> inverse_character(std::vector<Residue> const& chi, Residue p);

  //! Permutation module on the left cosets xH, ordered by minimal representative.
  FpGModule induced_trivial(GroupPtr g, Subgroup const& h, Residue p);
  //! Minimal coset representatives of G/H in the basis order of induced_trivial.
  std::vector<Element> coset_representatives(FiniteGroup const& g, Subgroup const& h);

  //! Restriction to a subgroup; the result's group is as_group(G, H).
  FpGModule restrict_module(FpGModule const& m, Subgroup const& h);
  //! Module over `big` through the homomorphism quotient: big -> m.group().
  FpGModule inflate(FpGModule const& m, GroupPtr big, std::vector<Element> const& quotient);

  //! A_k: dual(I^(k+1)) for k >= 0, I^(-(k+1)) for k <= -2, trivial at -1.
  FpGModule shift_module(GroupPtr g, Residue p, int k);
  //! M (x) A_k for k in -4..4; throws RangeExceeded otherwise.
  FpGModule shift_coefficients(FpGModule const& m, int k);

  struct Coinvariants {
    std::size_t dim;
    FpMatrix    projection;  // dim x M.dim, kernel = I_G M
  };
  Coinvariants          coinvariants(FpGModule const& m);
  std::vector<FpVector> invariants(FpGModule const& m);
  FpMatrix              norm_map(FpGModule const& m);

  //! Rows of a matrix q with q * S = 0 and q of full row rank n - rank(S),
  //! where S holds spanning columns of a subspace of F_p^n.
  FpMatrix quotient_projection(FpMatrix const& span, std::size_t n);
  //! Columns extending a basis of span(S) to F_p^n with unit vectors.
  FpMatrix complement_basis(FpMatrix const& span, std::size_t n);

}  // namespace shrinklab
