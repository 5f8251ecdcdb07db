#pragma once

// Tate cohomology of a finite group with F_p[G]-module coefficients in
// degrees -2..2, computed on one spliced complex
//
//   X^-3 = C_2 -> X^-2 = C_1 -> X^-1 = M --N--> X^0 = M -> X^1 -> X^2 -> X^3
//
// where C_q are bar chains ([g|h] (x) m, [g] (x) m) and X^q for q > 0 are
// inhomogeneous cochains G^q -> M. A vector in X^q has coordinate
// ((g1 * |G| + g2) * ... ) * dim M + c.

#include <memory>
#include <vector>

#include "shrinklab/fp.hpp"
#include "shrinklab/group.hpp"
#include "shrinklab/module.hpp"

namespace shrinklab {

  //! Upper bound on |G|^2 * dim M.
  inline constexpr std::size_t kTateCap = 10'000'000;
  //! Upper bound on the entries of a dense differential matrix.
  inline constexpr std::size_t kDifferentialCap = 120'000'000;

  //! Number of copies of M in X^q, q in -3..3.
  std::size_t tate_blocks(std::size_t group_order, int q);
  std::size_t tate_chain_dim(FpGModule const& m, int q);

  //! The differential X^q -> X^{q+1}, q in -3..2, applied to one vector.
  FpVector tate_apply(FpGModule const& m, int q, FpVector const& v);
  //! The same differential as a dense matrix.
  FpMatrix tate_differential(FpGModule const& m, int q);

  class CohGroup {
   public:
    //! Throws CapExceeded, RangeExceeded for k outside -2..2.
    CohGroup(FpGModule m, int k);

    FpGModule const& module() const noexcept {
      return _module;
    }
    int degree() const noexcept {
      return _k;
    }
    std::size_t dim() const noexcept {
      return _reps.size();
    }
    std::size_t chain_dim() const noexcept {
      return _chain_dim;
    }
    //! Cocycles representing the basis classes.
    std::vector<FpVector> const& reps() const noexcept {
      return _reps;
    }
    //! dim x chain_dim; on cocycles it returns class coordinates.
    FpMatrix const& projection() const noexcept {
      return _projection;
    }

    bool     is_cocycle(FpVector const& v) const;
    //! Class coordinates of a cocycle; throws InvalidArgument otherwise.
    FpVector classify(FpVector const& cocycle) const;
    FpVector representative(FpVector const& coords) const;

   private:
    FpGModule             _module;
    int                   _k;
    std::size_t           _chain_dim;
    std::vector<FpVector> _reps;
    FpMatrix              _projection;
  };

  using CohGroupPtr = std::shared_ptr<CohGroup const>;

  CohGroupPtr tate(FpGModule const& m, int k);

  struct CohClass {
    CohGroupPtr parent;
    FpVector    coords;

    FpVector representative() const {
      return parent->representative(coords);
    }
    bool is_zero() const noexcept {
      return fp::is_zero(coords);
    }
  };

  //! Connecting map of 0 -> A -> B -> C -> 0 on Tate complexes,
  //! Ĥ^q(C) -> Ĥ^{q+1}(A), as a matrix on class coordinates. incl: A -> B
  //! and section: C -> B are module-level matrices with
  //! proj(section(c)) = c; `b` is the middle module.
  FpMatrix connecting_map(CohGroup const& from,
                          CohGroup const& to,
                          FpGModule const& b,
                          FpMatrix const&  incl,
                          FpMatrix const&  section);

  //! One step of the shift: Ĥ^q(M) -> Ĥ^{q+1}(M (x) I_G) for q <= -2 via the
  //! augmentation sequence with the section m -> m (x) e_1, or
  //! Ĥ^q(M) -> Ĥ^{q-1}(M (x) I_G^*) for q >= 0 by inverting the connecting map
  //! of 0 -> M -> M (x) F_p[G]^* -> M (x) I_G^* -> 0.
  struct ShiftStep {
    CohGroupPtr from;
    CohGroupPtr to;
    FpMatrix    coords;  // to.dim x from.dim, invertible
  };
  ShiftStep shift_up(CohGroupPtr from);
  ShiftStep shift_down(CohGroupPtr from);

  //! Composite shift Ĥ^k(M) -> Ĥ^-1(M (x) A_k); the target module has the
  //! same action matrices as shift_coefficients(M, k).
  struct DimShift {
    CohGroupPtr source;
    CohGroupPtr target;
    FpMatrix    coords;  // target.dim x source.dim
  };
  DimShift dim_shift(CohGroupPtr source);
  CohClass dim_shift(CohClass const& x);

  //! Pairing Ĥ^1(G, twist(dual M, chi)) x H_1(G, twist(M, chi^-1)) -> F_p,
  //! <f, sum [g] (x) m_g> = sum_g f(g)(m_g).
  struct DualityPairing {
    CohGroupPtr cohomology;  // degree 1
    CohGroupPtr homology;    // degree -2
    FpMatrix    matrix;      // cohomology.dim x homology.dim
    bool        nondegenerate() const;
  };
  DualityPairing duality_pairing(FpGModule const& m, std::vector<Residue> const& chi);

  struct SemidirectProduct {
    GroupPtr             normal;      // Q
    GroupPtr             quotient;    // G
    GroupPtr             group;       // (q, g) has index q + |Q| * g
    std::vector<Element> projection;  // E -> G
    std::vector<Element> inclusion;   // Q -> E
  };
  //! action[g] is the permutation of Q's elements induced by g; (q1,g1)(q2,g2)
  //! = (q1 * g1(q2), g1 g2).
  SemidirectProduct semidirect_product(FiniteGroup const&              q,
                                       FiniteGroup const&              g,
                                       std::vector<Permutation> const& action,
                                       std::size_t                     cap = kClosureCap);

  //! Coset basis of Q / Q^p [Q, Q].
  std::vector<Element> frattini_quotient_basis(FiniteGroup const& q, std::uint32_t p);

  //! H_1(Q, W)_G -> H_1(E, W) -> H_1(G, W_Q) -> 0.
  struct FiveTerm {
    SemidirectProduct    product;
    //! Domain of map_a: with Q acting trivially on W it is Q/Q^p[Q,Q] (x) W
    //! on this coset basis (row-major); otherwise class coordinates of h1_q.
    std::vector<Element> q_basis;
    CohGroupPtr          h1_q;  // H_1(Q, W), general case only
    CohGroupPtr          h1_e;  // H_1(E, W)
    CohGroupPtr          h1_g;  // H_1(G, W_Q)
    FpMatrix             map_a;
    FpMatrix             map_b;  // h1_g.dim x h1_e.dim
    bool                 exact;  // im a = ker b
    bool                 surjective;
  };
  //! W is a G-module, inflated to E; Q acts trivially on it.
  FiveTerm five_term_maps(FiniteGroup const&              q,
                          FiniteGroup const&              g,
                          std::vector<Permutation> const& action,
                          FpGModule const&                w);
  //! W is any E-module.
  FiveTerm five_term_maps(SemidirectProduct const& product, FpGModule const& w);

}  // namespace shrinklab
