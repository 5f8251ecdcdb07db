#pragma once

// Shrinking: choose a surjection sum_r M -> M, (x_i) -> sum a_i x_i, whose
// tensor powers kill given elements, and the two uses of it on layers of free
// operator groups (annihilating Tate classes, and the two-stage variant for
// the first homology of the semidirect products).

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shrinklab/cohom.hpp"
#include "shrinklab/fp.hpp"
#include "shrinklab/module.hpp"
#include "shrinklab/profree.hpp"

namespace shrinklab {

  //! An element of (sum_r M)^(x)s (x) N stored by block tuple: the entry for
  //! (b_1, ..., b_s) is its component in M^(x)s (x) N (row-major, N last).
  struct BlockTensor {
    std::map<std::vector<std::uint32_t>, FpVector> blocks;

    bool is_zero() const;
  };

  //! Dense layout: factor index b * dim_m + x per tensor slot, N last.
  BlockTensor block_tensor_from_dense(std::size_t     dim_m,
                                      std::size_t     dim_n,
                                      std::size_t     s,
                                      std::size_t     r,
                                      FpVector const& dense);
  FpVector    dense_from_block_tensor(std::size_t        dim_m,
                                      std::size_t        dim_n,
                                      std::size_t        s,
                                      std::size_t        r,
                                      BlockTensor const& z,
                                      Residue            p);

  //! (f^(x)s (x) id) v, where v has s leading factors of size f.cols() and a
  //! trailing factor of size tail.
  FpVector apply_tensor_power(FpMatrix const& f, std::size_t s, std::size_t tail, FpVector const& v);

  struct ShrinkProblem {
    Residue                  p;
    FpGModule                m;
    FpGModule                n;
    std::size_t              s;
    std::size_t              r;
    std::vector<BlockTensor> targets;

    //! s * t * dim(M^(x)s (x) N); a solution is guaranteed when r exceeds it.
    std::size_t chevalley_bound() const;
  };

  struct SolverOptions {
    std::uint64_t seed   = 1;
    std::uint64_t budget = 1'000'000;
    //! Above the bound, keep doubling the random budget up to this total.
    std::uint64_t escalation_cap = 64'000'000;
  };

  struct SolverStats {
    std::string   strategy;
    std::uint64_t candidates = 0;
  };

  struct ShrinkCertificate {
    Residue                    p = 2;
    std::size_t                s = 0;
    std::size_t                r = 0;
    std::size_t                dim_m = 0;
    std::size_t                dim_n = 0;
    FpVector                   a;
    FpMatrix                   phi;  // dim_m x r dim_m, [a_1 I | ... | a_r I]
    std::vector<std::uint64_t> target_hashes;
    std::vector<FpVector>      images;  // psi_a(z_i), recomputed densely
    SolverStats                stats;
    bool                       verified = false;

    //! Stable text record.
    std::string serialize() const;
  };

  //! FNV-1a over the canonical byte form of a tensor.
  std::uint64_t fnv1a(BlockTensor const& z);

  FpMatrix phi_matrix(Residue p, std::size_t dim_m, FpVector const& a);

  //! Throws NotFound only below the bound; InternalVerifyFail if the
  //! recomputation disagrees with the solver.
  ShrinkCertificate solve_shrink(ShrinkProblem const& problem, SolverOptions const& options = {});

  //! Recomputes psi_a on every target through dense tensor powers of phi_a.
  std::vector<FpVector> recompute_images(ShrinkProblem const& problem, FpVector const& a);

  ////////////////////////////////////////////////////////////////////////
  // Tate classes of layers

  //! Layer coordinates of the layer F(d)^(nu)/F(d)^(succ nu) and everything
  //! derived from it at a fixed level d.
  struct LayerLevel {
    std::size_t   level;
    TruncationPtr truncation;
    FpGModule     free_quotient;  // F(d)/F(d)^2, the layer at (1,1)
    FpGModule     layer;          // E(d, nu)
    FpMatrix      theta;          // layer dim x D^j
    FpMatrix      section;        // right inverse of theta
  };

  struct AnnihilationSetup {
    GroupPtr    group;
    Residue     p;
    std::size_t n;
    FilterIndex nu;
    int         k;
    FpGModule   t;             // the coefficient twist T
    FpGModule   shifted_t;     // T (x) A_k
    std::size_t m;
    LayerLevel  source;        // level m
    LayerLevel  target;        // level n
    CohGroupPtr cohomology;    // Ĥ^k(G, E(m, nu) (x) T), holds the targets
    CohGroupPtr cohomology_n;  // Ĥ^k(G, E(n, nu) (x) T)
    DimShift    shift;         // Ĥ^k -> Ĥ^-1(E(m, nu) (x) T (x) A_k)
    Coinvariants coinv_m;      // of E(m, nu) (x) T (x) A_k
    Coinvariants coinv_n;      // of E(n, nu) (x) T (x) A_k
    FpMatrix     kill_test;    // coinv_n o (theta_n (x) id), on (V_n)^(x)j (x) T (x) A_k
  };

  //! Levels r, m = r n at which the tensor solver is guaranteed to succeed for t targets.
  struct RequiredLevel {
    std::size_t bound;  // s * (t dim(V_n^(x)j (x) T (x) A_k))
    std::size_t r;
    std::size_t m;
  };
  RequiredLevel required_level(GroupPtr const&  group,
                                     Residue          p,
                                     std::size_t      n,
                                     FilterIndex      nu,
                                     int              k,
                                     FpGModule const& t,
                                     std::size_t      targets);

  //! Builds both levels; m >= n. Truncation caps are raised as needed.
  std::shared_ptr<AnnihilationSetup const> annihilation_setup(GroupPtr    group,
                                                Residue     p,
                                                std::size_t n,
                                                FilterIndex nu,
                                                int         k,
                                                FpGModule   t,
                                                std::size_t m);

  //! psi_* on the layer determined by psi_bar through the tensor map:
  //! theta_n psi_bar^(x)j section_m.
  FpMatrix induced_layer_map(AnnihilationSetup const& setup, FpMatrix const& psi_bar);

  //! Direct image of a class of Ĥ^k(E(m) (x) T) in Ĥ^k(E(n) (x) T) under a
  //! layer map, without dimension shifting.
  FpVector class_image(AnnihilationSetup const& setup, FpMatrix const& layer_map, CohClass const& x);

  //! Equivariant map V_m -> V_n with the given images of the letters x_{i,1}.
  FpMatrix equivariant_from_generators(AnnihilationSetup const& setup, std::vector<FpVector> const& images);

  struct AnnihilationResult {
    std::size_t                      m;
    std::size_t                      required_m;
    std::string                      route;  // "blocks" or "search"
    FpMatrix                         psi_bar;
    std::optional<ShrinkCertificate> certificate;
    std::uint64_t                    candidates = 0;
    std::vector<FpVector>            shifted;      // Ĥ^-1 coordinates at level m
    std::vector<FpVector>            coinv_level_n;  // must be zero
    std::vector<FpVector>            class_level_n;  // must be zero
    bool                             verified = false;

    std::string report() const;
  };

  //! Pipeline: dimension shift to degree -1, coinvariants, lift through theta,
  //! the tensor solver on the blocks of V_m = sum_{m/n} V_n, lift to the operator groups,
  //! verify. If no block map kills the targets, searches the general
  //! equivariant surjections (exhaustively up to 2^20 candidates). Throws
  //! NotFound if nothing kills, VerifyFail if a verification fails.
  AnnihilationResult annihilate_classes(AnnihilationSetup const&            setup,
                               std::vector<CohClass> const& targets,
                               SolverOptions const&         options = {});

  ////////////////////////////////////////////////////////////////////////
  // Two stages for the semidirect products

  //! Stage 1 on G-homology classes at level m against level r, then the tensor solver on
  //! (V_r)^(x)(j+1) (x) T against level n. The tensors for stage 2 are asked
  //! from the provider only after stage 1 has succeeded.
  class TwoStageSession {
   public:
    using Provider = std::function<std::vector<FpVector>(LayerLevel const& level_r)>;

    //! stage1 is a setup with k = -2 from level m to level r; nu >= (2,1).
    TwoStageSession(std::shared_ptr<AnnihilationSetup const> stage1, std::size_t n);

    AnnihilationSetup const& stage1_setup() const noexcept {
      return *_stage1;
    }
    AnnihilationResult const&       run_stage1(std::vector<CohClass> const& classes,
                                        SolverOptions const&         options = {});
    ShrinkCertificate const& run_stage2(Provider const& provider, SolverOptions const& options = {});

    //! V_m -> V_n.
    FpMatrix composite() const;
    //! Stage-1 classes vanish at level n under the composite and stage-2
    //! tensors vanish exactly.
    bool        verified() const;
    std::string report() const;

   private:
    std::shared_ptr<AnnihilationSetup const> _stage1;
    std::size_t                       _n;
    std::vector<CohClass>             _classes;
    std::vector<FpVector>             _tensors;
    std::optional<AnnihilationResult>        _result1;
    std::optional<ShrinkCertificate>  _result2;
    std::optional<ShrinkProblem>      _problem2;
  };

  //! Stage 2 alone: one tensor-solver instance on tensors in (V_r)^(x)(j+1) (x) T
  //! against level n (r blocks of V_n when r is a multiple of n).
  ShrinkCertificate kernel_stage_only(LayerLevel const&            level_r,
                                      std::size_t                  n,
                                      FilterIndex                  nu,
                                      FpGModule const&             t,
                                      std::vector<FpVector> const& tensors,
                                      SolverOptions const&         options = {});

}  // namespace shrinklab
