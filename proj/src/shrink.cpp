#include "shrinklab/shrink.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "shrinklab/error.hpp"

namespace shrinklab {

  namespace {

    std::size_t checked_pow(std::size_t base, std::size_t e, std::size_t cap) {
      std::size_t out = 1;
      for (std::size_t i = 0; i < e; ++i) {
        if (base != 0 && out > cap / base) {
          return cap + 1;
        }
        out *= base;
      }
      return out;
    }

    // (f (x) id_tail) v
    FpVector apply_left(FpMatrix const& f, std::size_t tail, FpVector const& v) {
      return apply_tensor_power(f, 1, tail, v);
    }

    FpVector blockwise(FpMatrix const& f, FpVector const& v, std::size_t blocks) {
      SHRINKLAB_REQUIRE(v.size() == blocks * f.cols(), DimensionMismatch, "blockwise image");
      FpVector out(blocks * f.rows(), 0);
      for (std::size_t b = 0; b < blocks; ++b) {
        FpVector in(v.begin() + b * f.cols(), v.begin() + (b + 1) * f.cols());
        auto     r = f.apply(in);
        std::copy(r.begin(), r.end(), out.begin() + b * f.rows());
      }
      return out;
    }

    Residue draw(std::mt19937_64& rng, Residue p) {
      return static_cast<Residue>(rng() % p);
    }

  }  // namespace

  bool BlockTensor::is_zero() const {
    return std::all_of(blocks.begin(), blocks.end(), [](auto const& kv) { return fp::is_zero(kv.second); });
  }

  BlockTensor block_tensor_from_dense(std::size_t     dim_m,
                                      std::size_t     dim_n,
                                      std::size_t     s,
                                      std::size_t     r,
                                      FpVector const& dense) {
    std::size_t const slot  = r * dim_m;
    std::size_t const total = checked_pow(slot, s, dense.size()) * dim_n;
    SHRINKLAB_REQUIRE(total == dense.size(), DimensionMismatch, "dense tensor has the wrong length");
    std::size_t const block_len = checked_pow(dim_m, s, SIZE_MAX) * dim_n;

    BlockTensor out;
    for (std::size_t idx = 0; idx < dense.size(); ++idx) {
      if (dense[idx] == 0) {
        continue;
      }
      std::size_t                rest = idx / dim_n;
      std::size_t                pos  = idx % dim_n;
      std::vector<std::uint32_t> tuple(s);
      std::size_t                inner = 0, scale = dim_n;
      for (std::size_t k = s; k-- > 0;) {
        std::size_t const f = rest % slot;
        rest /= slot;
        tuple[k] = static_cast<std::uint32_t>(f / dim_m);
        inner += (f % dim_m) * scale;
        scale *= dim_m;
      }
      auto& block = out.blocks[tuple];
      if (block.empty()) {
        block.assign(block_len, 0);
      }
      block[inner + pos] = dense[idx];
    }
    return out;
  }

  FpVector dense_from_block_tensor(std::size_t        dim_m,
                                   std::size_t        dim_n,
                                   std::size_t        s,
                                   std::size_t        r,
                                   BlockTensor const& z,
                                   Residue            p) {
    std::size_t const slot      = r * dim_m;
    std::size_t const block_len = checked_pow(dim_m, s, SIZE_MAX) * dim_n;
    FpVector          out(checked_pow(slot, s, SIZE_MAX) * dim_n, 0);
    for (auto const& [tuple, block] : z.blocks) {
      SHRINKLAB_REQUIRE(tuple.size() == s && block.size() == block_len,
                        DimensionMismatch,
                        "block tensor entry has the wrong shape");
      for (std::size_t inner = 0; inner < block_len; ++inner) {
        if (block[inner] == 0) {
          continue;
        }
        std::size_t rest = inner / dim_n;
        std::size_t idx  = 0;
        std::vector<std::size_t> xs(s);
        for (std::size_t k = s; k-- > 0;) {
          xs[k] = rest % dim_m;
          rest /= dim_m;
        }
        for (std::size_t k = 0; k < s; ++k) {
          SHRINKLAB_REQUIRE(tuple[k] < r, IndexOutOfRange, "block index beyond r");
          idx = idx * slot + tuple[k] * dim_m + xs[k];
        }
        idx = idx * dim_n + inner % dim_n;
        out[idx] = fp::add(out[idx], block[inner] % p, p);
      }
    }
    return out;
  }

  FpVector apply_tensor_power(FpMatrix const& f, std::size_t s, std::size_t tail, FpVector const& v) {
    Residue const     p    = f.p();
    std::size_t const rows = f.rows(), cols = f.cols();
    SHRINKLAB_REQUIRE(v.size() == checked_pow(cols, s, v.size()) * tail,
                      DimensionMismatch,
                      "tensor power applied to a vector of the wrong length");
    FpVector cur = v;
    for (std::size_t k = 0; k < s; ++k) {
      std::size_t const pre  = checked_pow(rows, k, SIZE_MAX);
      std::size_t const post = checked_pow(cols, s - k - 1, SIZE_MAX) * tail;
      std::vector<std::uint64_t> acc(pre * rows * post, 0);
      for (std::size_t a = 0; a < pre; ++a) {
        for (std::size_t c = 0; c < cols; ++c) {
          Residue const* src = cur.data() + (a * cols + c) * post;
          if (std::all_of(src, src + post, [](Residue x) { return x == 0; })) {
            continue;
          }
          for (std::size_t r = 0; r < rows; ++r) {
            std::uint64_t const coef = f(r, c);
            if (coef == 0) {
              continue;
            }
            std::uint64_t* dst = acc.data() + (a * rows + r) * post;
            for (std::size_t b = 0; b < post; ++b) {
              dst[b] = (dst[b] + coef * src[b]) % p;
            }
          }
        }
      }
      cur.assign(acc.size(), 0);
      for (std::size_t i = 0; i < acc.size(); ++i) {
        cur[i] = static_cast<Residue>(acc[i]);
      }
    }
    return cur;
  }

  std::size_t ShrinkProblem::chevalley_bound() const {
    std::size_t const per = checked_pow(m.dim(), s, SIZE_MAX) * n.dim();
    return s * targets.size() * per;
  }

  std::uint64_t fnv1a(BlockTensor const& z) {
    std::uint64_t h    = 0xcbf29ce484222325ULL;
    auto          feed = [&h](std::uint64_t x) {
      for (int b = 0; b < 4; ++b) {
        h ^= (x >> (8 * b)) & 0xff;
        h *= 0x100000001b3ULL;
      }
    };
    for (auto const& [tuple, block] : z.blocks) {
      if (fp::is_zero(block)) {
        continue;
      }
      feed(tuple.size());
      for (auto b : tuple) {
        feed(b);
      }
      feed(block.size());
      for (auto x : block) {
        feed(x);
      }
    }
    return h;
  }

  FpMatrix phi_matrix(Residue p, std::size_t dim_m, FpVector const& a) {
    FpMatrix out(p, dim_m, a.size() * dim_m);
    for (std::size_t b = 0; b < a.size(); ++b) {
      for (std::size_t x = 0; x < dim_m; ++x) {
        out(x, b * dim_m + x) = a[b] % p;
      }
    }
    return out;
  }

  std::string ShrinkCertificate::serialize() const {
    std::ostringstream out;
    out << "shrink-certificate\n";
    out << "p " << p << "\n";
    out << "s " << s << "\n";
    out << "r " << r << "\n";
    out << "dim_m " << dim_m << "\n";
    out << "dim_n " << dim_n << "\n";
    out << "a";
    for (auto x : a) {
      out << ' ' << x;
    }
    out << "\n";
    out << "strategy " << stats.strategy << "\n";
    out << "candidates " << stats.candidates << "\n";
    out << "targets " << target_hashes.size() << "\n";
    for (std::size_t i = 0; i < target_hashes.size(); ++i) {
      bool const zero = i < images.size() && fp::is_zero(images[i]);
      out << "target " << i << " fnv1a " << std::hex << std::setw(16) << std::setfill('0') << target_hashes[i]
          << std::dec << std::setfill(' ') << " image " << (zero ? "zero" : "nonzero") << "\n";
    }
    out << "verified " << (verified ? "true" : "false") << "\n";
    return out.str();
  }

  std::vector<FpVector> recompute_images(ShrinkProblem const& problem, FpVector const& a) {
    Residue const     p     = problem.p;
    std::size_t const dm    = problem.m.dim();
    std::size_t const dn    = problem.n.dim();
    std::size_t const s     = problem.s;
    std::size_t const dense = checked_pow(problem.r * dm, s, std::size_t{1} << 26);

    std::vector<FpVector> out;
    if (dense * dn <= (std::size_t{1} << 26)) {
      auto const phi = phi_matrix(p, dm, a);
      for (auto const& z : problem.targets) {
        auto v = dense_from_block_tensor(dm, dn, s, problem.r, z, p);
        out.push_back(apply_tensor_power(phi, s, dn, v));
      }
      return out;
    }
    // the dense space is too large; sum the blocks directly
    std::size_t const len = checked_pow(dm, s, SIZE_MAX) * dn;
    for (auto const& z : problem.targets) {
      FpVector acc(len, 0);
      for (auto const& [tuple, block] : z.blocks) {
        Residue c = 1;
        for (auto b : tuple) {
          c = fp::mul(c, a[b], p);
        }
        if (c != 0) {
          fp::axpy(acc, c, block, p);
        }
      }
      out.push_back(std::move(acc));
    }
    return out;
  }

  namespace {

    // psi_a(z) as polynomials in a: one row per output coordinate of every
    // target, as sparse (monomial, coefficient) lists.
    struct PolySystem {
      Residue                                                p;
      std::size_t                                            r;
      std::vector<std::vector<std::uint32_t>>                monomials;
      std::vector<std::vector<std::pair<std::size_t, Residue>>> equations;

      explicit PolySystem(ShrinkProblem const& problem) : p(problem.p), r(problem.r) {
        std::size_t const len = checked_pow(problem.m.dim(), problem.s, SIZE_MAX) * problem.n.dim();
        std::map<std::vector<std::uint32_t>, std::size_t> index;
        std::vector<FpVector>                              coef;  // per monomial, t * len
        std::size_t const                                  rows = problem.targets.size() * len;
        for (std::size_t t = 0; t < problem.targets.size(); ++t) {
          for (auto const& [tuple, block] : problem.targets[t].blocks) {
            if (fp::is_zero(block)) {
              continue;
            }
            auto key = tuple;
            std::sort(key.begin(), key.end());
            auto [it, fresh] = index.try_emplace(key, monomials.size());
            if (fresh) {
              monomials.push_back(key);
              coef.emplace_back(rows, 0);
            }
            auto& c = coef[it->second];
            for (std::size_t x = 0; x < len; ++x) {
              c[t * len + x] = fp::add(c[t * len + x], block[x] % p, p);
            }
          }
        }
        for (std::size_t e = 0; e < rows; ++e) {
          std::vector<std::pair<std::size_t, Residue>> row;
          for (std::size_t k = 0; k < monomials.size(); ++k) {
            if (coef[k][e] != 0) {
              row.emplace_back(k, coef[k][e]);
            }
          }
          if (!row.empty()) {
            equations.push_back(std::move(row));
          }
        }
      }

      bool solves(FpVector const& a, std::vector<Residue>& values) const {
        values.resize(monomials.size());
        for (std::size_t k = 0; k < monomials.size(); ++k) {
          Residue v = 1;
          for (auto b : monomials[k]) {
            v = fp::mul(v, a[b], p);
            if (v == 0) {
              break;
            }
          }
          values[k] = v;
        }
        for (auto const& row : equations) {
          std::uint64_t acc = 0;
          for (auto const& [k, c] : row) {
            acc += std::uint64_t(c) * values[k];
          }
          if (acc % p != 0) {
            return false;
          }
        }
        return true;
      }
    };

    bool nonzero(FpVector const& a) {
      return !fp::is_zero(a);
    }

    // Base-p counter over the chosen positions (others stay zero).
    std::optional<FpVector> exhaust(PolySystem const&               sys,
                                    std::vector<std::size_t> const& positions,
                                    std::uint64_t&                  candidates) {
      FpVector             a(sys.r, 0);
      std::vector<Residue> values;
      while (true) {
        std::size_t k = 0;
        for (; k < positions.size(); ++k) {
          auto& x = a[positions[k]];
          if (++x < sys.p) {
            break;
          }
          x = 0;
        }
        if (k == positions.size()) {
          return std::nullopt;
        }
        ++candidates;
        if (sys.solves(a, values)) {
          return a;
        }
      }
    }

    std::optional<FpVector> random_search(PolySystem const& sys,
                                          std::mt19937_64&  rng,
                                          std::uint64_t     budget,
                                          std::uint64_t&    candidates) {
      FpVector             a(sys.r);
      std::vector<Residue> values;
      for (std::uint64_t it = 0; it < budget; ++it) {
        for (auto& x : a) {
          x = draw(rng, sys.p);
        }
        if (!nonzero(a)) {
          continue;
        }
        ++candidates;
        if (sys.solves(a, values)) {
          return a;
        }
      }
      return std::nullopt;
    }

    std::size_t exhaust_width(Residue p) {
      return static_cast<std::size_t>(22.0 / std::log2(double(p)));
    }

    // Most variables fixed to zero, exhaustive on a window of the rest.
    std::optional<FpVector> greedy(PolySystem const& sys, std::mt19937_64& rng, std::uint64_t& candidates) {
      std::size_t const        w = std::min(sys.r, exhaust_width(sys.p));
      std::vector<std::size_t> order(sys.r);
      for (std::size_t i = 0; i < sys.r; ++i) {
        order[i] = i;
      }
      for (int round = 0; round < 8; ++round) {
        if (round > 0) {
          std::shuffle(order.begin(), order.end(), rng);
        }
        std::vector<std::size_t> window(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(w));
        std::sort(window.begin(), window.end());
        if (auto a = exhaust(sys, window, candidates)) {
          return a;
        }
      }
      return std::nullopt;
    }

  }  // namespace

  ShrinkCertificate solve_shrink(ShrinkProblem const& problem, SolverOptions const& options) {
    Residue const p = problem.p;
    SHRINKLAB_REQUIRE(fp::is_prime(p), InvalidArgument, "p must be prime");
    SHRINKLAB_REQUIRE(problem.r >= 1, InvalidArgument, "r must be at least 1");
    SHRINKLAB_REQUIRE(problem.s >= 1, InvalidArgument, "s must be at least 1");
    SHRINKLAB_REQUIRE(problem.m.p() == p && problem.n.p() == p, InvalidArgument, "modules over another field");
    require_same_group(problem.m, problem.n);
    std::size_t const len = checked_pow(problem.m.dim(), problem.s, SIZE_MAX) * problem.n.dim();
    for (auto const& z : problem.targets) {
      for (auto const& [tuple, block] : z.blocks) {
        SHRINKLAB_REQUIRE(tuple.size() == problem.s && block.size() == len,
                          DimensionMismatch,
                          "target block has the wrong shape");
        for (auto b : tuple) {
          SHRINKLAB_REQUIRE(b < problem.r, IndexOutOfRange, "target uses a block beyond r");
        }
      }
    }

    std::size_t const       bound = problem.chevalley_bound();
    bool const              above = problem.r > bound;
    SolverStats             stats;
    std::optional<FpVector> found;
    PolySystem const        sys(problem);

    if (sys.equations.empty()) {
      found          = FpVector(problem.r, 0);
      (*found)[0]    = 1;
      stats.strategy = "trivial";
    }
    if (!found && problem.s == 1) {
      stats.strategy = "linear";
      // columns: variables; rows: equations
      FpMatrix lin(p, sys.equations.size(), problem.r);
      for (std::size_t e = 0; e < sys.equations.size(); ++e) {
        for (auto const& [k, c] : sys.equations[e]) {
          lin(e, sys.monomials[k][0]) = c;
        }
      }
      auto ker = kernel(lin);
      if (!ker.empty()) {
        found = ker.front();
      }
    }
    if (!found && problem.s > 1) {
      for (std::size_t b = 0; b < problem.r && !found; ++b) {
        std::vector<std::uint32_t> diag(problem.s, static_cast<std::uint32_t>(b));
        bool                       clear = true;
        for (auto const& z : problem.targets) {
          auto it = z.blocks.find(diag);
          if (it != z.blocks.end() && !fp::is_zero(it->second)) {
            clear = false;
            break;
          }
        }
        if (clear) {
          found          = FpVector(problem.r, 0);
          (*found)[b]    = 1;
          stats.strategy = "support";
        }
      }
    }
    std::vector<std::size_t> all(problem.r);
    for (std::size_t i = 0; i < problem.r; ++i) {
      all[i] = i;
    }
    bool const small = problem.r <= exhaust_width(p);
    if (!found && problem.s > 1 && small) {
      stats.strategy = "exhaustive";
      found          = exhaust(sys, all, stats.candidates);
    }
    std::mt19937_64 rng(options.seed);
    if (!found && problem.s > 1 && !small) {
      stats.strategy = "random";
      found          = random_search(sys, rng, options.budget, stats.candidates);
      if (!found) {
        stats.strategy = "greedy";
        found          = greedy(sys, rng, stats.candidates);
      }
      if (!found && above) {
        // a solution exists; spend more
        stats.strategy     = "random";
        std::uint64_t step = options.budget;
        std::uint64_t used = options.budget;
        while (!found && used < options.escalation_cap) {
          step = std::min(step * 2, options.escalation_cap - used);
          found = random_search(sys, rng, step, stats.candidates);
          used += step;
        }
        if (!found) {
          stats.strategy = "exhaustive";
          found          = exhaust(sys, all, stats.candidates);
        }
      }
    }
    if (!found) {
      SHRINKLAB_REQUIRE(!above,
                        InternalVerifyFail,
                        "no solution above the Chevalley-Warning bound");
      SHRINKLAB_THROW(NotFound,
                      "no nonzero a found with r = " + std::to_string(problem.r) + " (guarantee needs r > " +
                          std::to_string(bound) + ")");
    }

    ShrinkCertificate cert;
    cert.p     = p;
    cert.s     = problem.s;
    cert.r     = problem.r;
    cert.dim_m = problem.m.dim();
    cert.dim_n = problem.n.dim();
    cert.a     = *found;
    cert.phi   = phi_matrix(p, problem.m.dim(), cert.a);
    cert.stats = stats;
    for (auto const& z : problem.targets) {
      cert.target_hashes.push_back(fnv1a(z));
    }
    SHRINKLAB_REQUIRE(nonzero(cert.a), InternalVerifyFail, "solver returned a = 0");
    SHRINKLAB_REQUIRE(is_equivariant(direct_sum(problem.m, problem.r), problem.m, cert.phi),
                      InternalVerifyFail,
                      "phi_a is not equivariant");
    cert.images   = recompute_images(problem, cert.a);
    cert.verified = std::all_of(cert.images.begin(), cert.images.end(), [](auto const& v) { return fp::is_zero(v); });
    SHRINKLAB_REQUIRE(cert.verified, InternalVerifyFail, "recomputed images of the solution are not zero");
    return cert;
  }

  ////////////////////////////////////////////////////////////////////////
  // Tate classes of layers

  namespace {

    LayerLevel make_level(GroupPtr const& group, Residue p, std::size_t d, FilterIndex nu) {
      TruncationCaps caps;
      caps.max_i       = std::max(caps.max_i, nu.succ().i);
      caps.max_letters = std::max(caps.max_letters, int(d * group->order()));
      auto       t     = build_truncation(p, d, group, nu.succ(), caps);
      LayerLevel out{d, t, layer_module(*t, {1, 1}), layer_module(*t, nu), theta_matrix(*t, nu), {}};
      out.section = theta_section(out.theta);
      return out;
    }

    // rho_n(g) applied to each letter image; V_n permutes letters.
    FpMatrix from_letter_images(TruncatedFreeGroup const& source,
                                FpGModule const&          vn,
                                std::vector<FpVector> const& images) {
      std::size_t const n = source.group().order();
      FpMatrix          out(vn.p(), vn.dim(), std::size_t(source.letters()));
      for (std::size_t i = 1; i <= source.d(); ++i) {
        for (Element g = 0; g < n; ++g) {
          auto col = vn.act(g, images[i - 1]);
          auto c   = std::size_t(source.letter(i, g));
          for (std::size_t r = 0; r < col.size(); ++r) {
            out(r, c) = col[r];
          }
        }
      }
      return out;
    }

    bool all_zero(std::vector<FpVector> const& vs) {
      return std::all_of(vs.begin(), vs.end(), [](auto const& v) { return fp::is_zero(v); });
    }

  }  // namespace

  RequiredLevel required_level(GroupPtr const&  group,
                                     Residue          p,
                                     std::size_t      n,
                                     FilterIndex      nu,
                                     int              k,
                                     FpGModule const& t,
                                     std::size_t      targets) {
    SHRINKLAB_REQUIRE(nu.valid(), InvalidArgument, "invalid filtration index");
    std::size_t const a_dim = shift_module(group, p, k).dim();
    std::size_t const dn    = n * group->order();
    std::size_t const j     = std::size_t(nu.j);
    std::size_t const bound = j * targets * checked_pow(dn, j, SIZE_MAX) * t.dim() * a_dim;
    return {bound, bound + 1, (bound + 1) * n};
  }

  std::shared_ptr<AnnihilationSetup const> annihilation_setup(GroupPtr    group,
                                                Residue     p,
                                                std::size_t n,
                                                FilterIndex nu,
                                                int         k,
                                                FpGModule   t,
                                                std::size_t m) {
    SHRINKLAB_REQUIRE(n >= 1 && m >= n, InvalidArgument, "levels must satisfy m >= n >= 1");
    SHRINKLAB_REQUIRE(nu.valid(), InvalidArgument, "invalid filtration index");
    SHRINKLAB_REQUIRE(t.p() == p && (t.group_ptr() == group || t.group() == *group),
                      GroupMismatch,
                      "T is not a module for this group and prime");
    auto setup       = std::make_shared<AnnihilationSetup>();
    setup->group     = group;
    setup->p         = p;
    setup->n         = n;
    setup->nu        = nu;
    setup->k         = k;
    setup->t         = t;
    setup->shifted_t = tensor_module(t, shift_module(group, p, k));
    setup->m         = m;
    setup->source    = make_level(group, p, m, nu);
    setup->target    = make_level(group, p, n, nu);

    auto em             = tensor_module(setup->source.layer, t);
    auto en             = tensor_module(setup->target.layer, t);
    setup->cohomology   = tate(em, k);
    setup->cohomology_n = tate(en, k);
    setup->shift        = dim_shift(setup->cohomology);
    setup->coinv_m      = coinvariants(setup->shift.target->module());
    setup->coinv_n      = coinvariants(shift_coefficients(en, k));
    SHRINKLAB_REQUIRE(setup->coinv_m.projection.cols() == setup->source.layer.dim() * setup->shifted_t.dim(),
                      InternalVerifyFail,
                      "shifted module has an unexpected dimension");
    setup->kill_test =
        setup->coinv_n.projection * setup->target.theta.kron(FpMatrix::identity(p, setup->shifted_t.dim()));
    return setup;
  }

  FpMatrix induced_layer_map(AnnihilationSetup const& setup, FpMatrix const& psi_bar) {
    FpMatrix power = psi_bar;
    for (int k = 1; k < setup.nu.j; ++k) {
      power = power.kron(psi_bar);
    }
    return setup.target.theta * power * setup.source.section;
  }

  FpVector class_image(AnnihilationSetup const& setup, FpMatrix const& layer_map, CohClass const& x) {
    auto const        f     = layer_map.kron(FpMatrix::identity(setup.p, setup.t.dim()));
    auto const        rep   = x.representative();
    std::size_t const dim   = x.parent->module().dim();
    SHRINKLAB_REQUIRE(dim == f.cols(), DimensionMismatch, "class is not over the source layer");
    auto const image = blockwise(f, rep, rep.size() / dim);
    return setup.cohomology_n->classify(image);
  }

  FpMatrix equivariant_from_generators(AnnihilationSetup const& setup, std::vector<FpVector> const& images) {
    SHRINKLAB_REQUIRE(images.size() == setup.m, DimensionMismatch, "one image per source generator");
    return from_letter_images(*setup.source.truncation, setup.target.free_quotient, images);
  }

  std::string AnnihilationResult::report() const {
    std::ostringstream out;
    out << "annihilation m " << m << " required_m " << required_m << "\n";
    out << "route " << route << " candidates " << candidates << "\n";
    out << "psi_bar " << psi_bar.rows() << "x" << psi_bar.cols() << "\n";
    for (std::size_t r = 0; r < psi_bar.rows(); ++r) {
      out << " ";
      for (std::size_t c = 0; c < psi_bar.cols(); ++c) {
        out << ' ' << psi_bar(r, c);
      }
      out << "\n";
    }
    for (std::size_t i = 0; i < shifted.size(); ++i) {
      out << "target " << i << " shifted_zero " << (fp::is_zero(shifted[i]) ? "yes" : "no") << " coinvariant_image "
          << (fp::is_zero(coinv_level_n[i]) ? "zero" : "nonzero") << " class_image "
          << (fp::is_zero(class_level_n[i]) ? "zero" : "nonzero") << "\n";
    }
    if (certificate) {
      out << certificate->serialize();
    }
    out << "verified " << (verified ? "true" : "false") << "\n";
    return out.str();
  }

  namespace {

    struct SearchOutcome {
      std::optional<FpMatrix> psi;
      std::uint64_t           candidates = 0;
    };

    // General equivariant surjections V_m -> V_n, given by the images of the
    // letters x_{i,1}; kills when kill_test (psi^(x)j (x) id) z = 0.
    SearchOutcome search_surjection(AnnihilationSetup const&            setup,
                                    std::vector<FpVector> const& lifts,
                                    SolverOptions const&         options) {
      Residue const     p     = setup.p;
      std::size_t const dn    = setup.target.free_quotient.dim();
      std::size_t const vars  = setup.m * dn;
      std::size_t const total = checked_pow(p, vars, std::size_t{1} << 20);
      std::size_t const j     = std::size_t(setup.nu.j);
      std::size_t const tail  = setup.shifted_t.dim();

      SearchOutcome         out;
      std::vector<FpVector> images(setup.m, FpVector(dn, 0));
      auto try_candidate = [&]() -> bool {
        ++out.candidates;
        auto psi = equivariant_from_generators(setup, images);
        if (rank(psi) != dn) {
          return false;
        }
        for (auto const& z : lifts) {
          if (!fp::is_zero(setup.kill_test.apply(apply_tensor_power(psi, j, tail, z)))) {
            return false;
          }
        }
        out.psi = std::move(psi);
        return true;
      };

      if (total <= (std::size_t{1} << 20)) {
        for (std::size_t c = 1; c < total; ++c) {
          std::size_t rest = c;
          for (std::size_t v = 0; v < vars; ++v) {
            images[v / dn][v % dn] = Residue(rest % p);
            rest /= p;
          }
          if (try_candidate()) {
            break;
          }
        }
        return out;
      }
      std::mt19937_64 rng(options.seed);
      for (std::uint64_t it = 0; it < options.budget; ++it) {
        for (auto& img : images) {
          for (auto& x : img) {
            x = draw(rng, p);
          }
        }
        if (try_candidate()) {
          break;
        }
      }
      return out;
    }

  }  // namespace

  AnnihilationResult annihilate_classes(AnnihilationSetup const&            setup,
                               std::vector<CohClass> const& targets,
                               SolverOptions const&         options) {
    Residue const     p    = setup.p;
    std::size_t const j    = std::size_t(setup.nu.j);
    std::size_t const tail = setup.shifted_t.dim();
    std::size_t const dn   = setup.target.free_quotient.dim();
    for (auto const& x : targets) {
      SHRINKLAB_REQUIRE(x.parent == setup.cohomology || x.parent->module().dim() == setup.cohomology->module().dim(),
                        ParentMismatch,
                        "target class is not in the level-m cohomology");
    }

    AnnihilationResult result;
    result.m          = setup.m;
    result.required_m = required_level(setup.group, p, setup.n, setup.nu, setup.k, setup.t, targets.size()).m;

    // (1) shift to degree -1, (2) coinvariants, (3) lift through theta
    std::vector<FpVector> lifts;
    for (auto const& x : targets) {
      CohClass const x0{setup.cohomology, x.coords};
      auto const     y = dim_shift(x0);
      result.shifted.push_back(y.coords);
      auto const w = y.representative();
      auto const z = apply_left(setup.source.section, tail, w);
      SHRINKLAB_REQUIRE(apply_left(setup.source.theta, tail, z) == w,
                        InternalVerifyFail,
                        "lift through the tensor map does not hit the representative");
      SHRINKLAB_REQUIRE(fp::is_zero(y.coords) == fp::is_zero(setup.coinv_m.projection.apply(w)),
                        InternalVerifyFail,
                        "degree -1 class and its coinvariant image disagree");
      lifts.push_back(z);
    }

    // (4) the tensor solver on the blocks V_m = sum_{m/n} V_n
    if (setup.m % setup.n == 0) {
      ShrinkProblem problem{p, setup.target.free_quotient, setup.shifted_t, j, setup.m / setup.n, {}};
      for (auto const& z : lifts) {
        problem.targets.push_back(block_tensor_from_dense(dn, tail, j, problem.r, z));
      }
      try {
        auto cert       = solve_shrink(problem, options);
        result.route    = "blocks";
        result.psi_bar  = cert.phi;
        result.candidates = cert.stats.candidates;
        result.certificate    = std::move(cert);
      } catch (Error const& e) {
        if (e.kind() != ErrorKind::NotFound) {
          throw;
        }
      }
    }
    if (!result.certificate) {
      auto found = search_surjection(setup, lifts, options);
      result.candidates += found.candidates;
      if (!found.psi) {
        SHRINKLAB_THROW(NotFound,
                        "no equivariant surjection from level " + std::to_string(setup.m) + " to " +
                            std::to_string(setup.n) + " kills the targets (" + std::to_string(result.candidates) +
                            " candidates; the guarantee needs m >= " + std::to_string(result.required_m) + ")");
      }
      result.route   = "search";
      result.psi_bar = *found.psi;
    }

    // (5) lift to the operator groups, (6) verify at level n
    auto const hom       = lift_operator_hom(result.psi_bar, setup.source.truncation, setup.target.truncation);
    auto const layer_map = hom.layer_map(setup.nu);
    auto const f         = layer_map.kron(FpMatrix::identity(p, tail));
    for (std::size_t a = 0; a < targets.size(); ++a) {
      auto const w = apply_left(setup.source.theta, tail, lifts[a]);
      result.coinv_level_n.push_back(setup.coinv_n.projection.apply(f.apply(w)));
      result.class_level_n.push_back(class_image(setup, layer_map, CohClass{setup.cohomology, targets[a].coords}));
    }
    result.verified = all_zero(result.coinv_level_n) && all_zero(result.class_level_n);
    SHRINKLAB_REQUIRE(result.verified, VerifyFail, "a target survives at level n:\n" + result.report());
    return result;
  }

  ////////////////////////////////////////////////////////////////////////
  // Two stages

  TwoStageSession::TwoStageSession(std::shared_ptr<AnnihilationSetup const> stage1, std::size_t n)
      : _stage1(std::move(stage1)), _n(n) {
    SHRINKLAB_REQUIRE(_stage1 != nullptr, InvalidArgument, "missing stage-1 setup");
    SHRINKLAB_REQUIRE(_stage1->k == -2, InvalidArgument, "stage 1 works on H_1, degree -2");
    SHRINKLAB_REQUIRE((FilterIndex{2, 1} <= _stage1->nu), InvalidArgument, "nu must be at least (2,1)");
    SHRINKLAB_REQUIRE(n >= 1 && n <= _stage1->n, InvalidArgument, "need r >= n >= 1");
  }

  AnnihilationResult const& TwoStageSession::run_stage1(std::vector<CohClass> const& classes, SolverOptions const& options) {
    _classes = classes;
    _result1 = annihilate_classes(*_stage1, classes, options);
    _result2.reset();
    return *_result1;
  }

  ShrinkCertificate const& TwoStageSession::run_stage2(Provider const& provider, SolverOptions const& options) {
    SHRINKLAB_REQUIRE(_result1 && _result1->verified,
                      StageOrderViolation,
                      "stage 2 tensors requested before stage 1 completed");
    auto const& level_r = _stage1->target;
    _tensors            = provider(level_r);
    _result2            = kernel_stage_only(level_r, _n, _stage1->nu, _stage1->t, _tensors, options);
    return *_result2;
  }

  FpMatrix TwoStageSession::composite() const {
    SHRINKLAB_REQUIRE(_result1 && _result2, StageOrderViolation, "both stages must run first");
    return _result2->phi * _result1->psi_bar;
  }

  bool TwoStageSession::verified() const {
    if (!_result1 || !_result2 || !_result1->verified || !_result2->verified) {
      return false;
    }
    // the stage-1 classes under the composite, straight from level m to n
    auto const  psi   = composite();
    auto const& s1    = *_stage1;
    auto const  final = make_level(s1.group, s1.p, _n, s1.nu);
    auto const  hom   = lift_operator_hom(psi, s1.source.truncation, final.truncation);
    auto const  map   = hom.layer_map(s1.nu).kron(FpMatrix::identity(s1.p, s1.t.dim()));
    auto const  h_n   = tate(tensor_module(final.layer, s1.t), s1.k);
    for (auto const& x : _classes) {
      CohClass const c{s1.cohomology, x.coords};
      auto const     rep = c.representative();
      auto const     img = blockwise(map, rep, rep.size() / map.cols());
      if (!fp::is_zero(h_n->classify(img))) {
        return false;
      }
    }
    // the stage-2 tensors under psi_2^(x)(j+1) (x) id, densely
    std::size_t const s = std::size_t(s1.nu.j) + 1;
    for (auto const& y : _tensors) {
      if (!fp::is_zero(apply_tensor_power(_result2->phi, s, s1.t.dim(), y))) {
        return false;
      }
    }
    return true;
  }

  std::string TwoStageSession::report() const {
    std::ostringstream out;
    out << "two-stage m " << _stage1->m << " r " << _stage1->n << " n " << _n << "\n";
    out << "stage 1\n";
    if (_result1) {
      out << _result1->report();
    } else {
      out << "not run\n";
    }
    out << "stage 2\n";
    if (_result2) {
      out << _result2->serialize();
    } else {
      out << "not run\n";
    }
    out << "composite verified " << (verified() ? "true" : "false") << "\n";
    return out.str();
  }

  ShrinkCertificate kernel_stage_only(LayerLevel const&            level_r,
                                      std::size_t                  n,
                                      FilterIndex                  nu,
                                      FpGModule const&             t,
                                      std::vector<FpVector> const& tensors,
                                      SolverOptions const&         options) {
    std::size_t const r = level_r.level;
    SHRINKLAB_REQUIRE(n >= 1 && r % n == 0,
                      InvalidArgument,
                      "level " + std::to_string(r) + " is not a multiple of " + std::to_string(n) +
                          "; the blocks of V_r need n | r");
    auto const        vn = make_level(level_r.truncation->group_ptr(), level_r.truncation->p(), n, {1, 1}).free_quotient;
    std::size_t const s  = std::size_t(nu.j) + 1;
    ShrinkProblem     problem{level_r.truncation->p(), vn, t, s, r / n, {}};
    for (auto const& y : tensors) {
      problem.targets.push_back(block_tensor_from_dense(vn.dim(), t.dim(), s, problem.r, y));
    }
    return solve_shrink(problem, options);
  }

}  // namespace shrinklab
