#include "shrinklab/cohom.hpp"

#include <algorithm>

#include "shrinklab/error.hpp"

namespace shrinklab {

  std::size_t tate_blocks(std::size_t n, int q) {
    switch (q) {
      case -3: return n * n;
      case -2: return n;
      case -1:
      case 0: return 1;
      case 1: return n;
      case 2: return n * n;
      case 3: return n * n * n;
      default: SHRINKLAB_THROW(RangeExceeded, "chain degree outside -3..3");
    }
  }

  std::size_t tate_chain_dim(FpGModule const& m, int q) {
    return tate_blocks(m.group().order(), q) * m.dim();
  }

  namespace {
    // out[block] += sign * a * in[src block]
    void add_applied(FpVector&       out,
                     std::size_t     out_block,
                     FpMatrix const* a,
                     FpVector const& in,
                     std::size_t     in_block,
                     std::size_t     d,
                     bool            negate,
                     Residue         p) {
      for (std::size_t i = 0; i < d; ++i) {
        std::uint64_t acc = 0;
        if (a == nullptr) {
          acc = in[in_block * d + i];
        } else {
          auto row = a->row(i);
          for (std::size_t j = 0; j < d; ++j) {
            acc += std::uint64_t(row[j]) * in[in_block * d + j];
            if (acc >= (std::uint64_t(1) << 62)) {
              acc %= p;
            }
          }
        }
        Residue  x   = Residue(acc % p);
        Residue& dst = out[out_block * d + i];
        dst          = negate ? fp::sub(dst, x, p) : fp::add(dst, x, p);
      }
    }

    void add_block(FpMatrix&       out,
                   std::size_t     row_block,
                   std::size_t     col_block,
                   FpMatrix const* a,
                   std::size_t     d,
                   bool            negate) {
      Residue const p = out.p();
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          Residue x = a == nullptr ? Residue(i == j) : (*a)(i, j);
          if (x == 0) {
            continue;
          }
          Residue& dst = out(row_block * d + i, col_block * d + j);
          dst          = negate ? fp::sub(dst, x, p) : fp::add(dst, x, p);
        }
      }
    }
  }  // namespace

  FpVector tate_apply(FpGModule const& m, int q, FpVector const& v) {
    SHRINKLAB_REQUIRE(q >= -3 && q <= 2, RangeExceeded, "differential degree outside -3..2");
    auto const&       g = m.group();
    std::size_t const n = g.order(), d = m.dim();
    Residue const     p = m.p();
    SHRINKLAB_REQUIRE(v.size() == tate_blocks(n, q) * d, DimensionMismatch, "cochain size");
    FpVector out(tate_blocks(n, q + 1) * d, 0);
    switch (q) {
      case -3:
        for (Element a = 0; a < n; ++a) {
          for (Element b = 0; b < n; ++b) {
            std::size_t blk = a * n + b;
            add_applied(out, b, &m.rho(g.inv(a)), v, blk, d, false, p);
            add_applied(out, g.mul(a, b), nullptr, v, blk, d, true, p);
            add_applied(out, a, nullptr, v, blk, d, false, p);
          }
        }
        break;
      case -2:
        for (Element a = 0; a < n; ++a) {
          add_applied(out, 0, &m.rho(g.inv(a)), v, a, d, false, p);
          add_applied(out, 0, nullptr, v, a, d, true, p);
        }
        break;
      case -1:
        for (Element a = 0; a < n; ++a) {
          add_applied(out, 0, &m.rho(a), v, 0, d, false, p);
        }
        break;
      case 0:
        for (Element a = 0; a < n; ++a) {
          add_applied(out, a, &m.rho(a), v, 0, d, false, p);
          add_applied(out, a, nullptr, v, 0, d, true, p);
        }
        break;
      case 1:
        for (Element a = 0; a < n; ++a) {
          for (Element b = 0; b < n; ++b) {
            std::size_t blk = a * n + b;
            add_applied(out, blk, &m.rho(a), v, b, d, false, p);
            add_applied(out, blk, nullptr, v, g.mul(a, b), d, true, p);
            add_applied(out, blk, nullptr, v, a, d, false, p);
          }
        }
        break;
      case 2:
        for (Element a = 0; a < n; ++a) {
          for (Element b = 0; b < n; ++b) {
            for (Element c = 0; c < n; ++c) {
              std::size_t blk = (a * n + b) * n + c;
              add_applied(out, blk, &m.rho(a), v, b * n + c, d, false, p);
              add_applied(out, blk, nullptr, v, g.mul(a, b) * n + c, d, true, p);
              add_applied(out, blk, nullptr, v, a * n + g.mul(b, c), d, false, p);
              add_applied(out, blk, nullptr, v, a * n + b, d, true, p);
            }
          }
        }
        break;
    }
    return out;
  }

  FpMatrix tate_differential(FpGModule const& m, int q) {
    SHRINKLAB_REQUIRE(q >= -3 && q <= 2, RangeExceeded, "differential degree outside -3..2");
    auto const&       g = m.group();
    std::size_t const n = g.order(), d = m.dim();
    std::size_t const rows = tate_blocks(n, q + 1) * d, cols = tate_blocks(n, q) * d;
    SHRINKLAB_REQUIRE(rows * cols <= kDifferentialCap,
                      CapExceeded,
                      "differential in degree " + std::to_string(q) + " has "
                          + std::to_string(rows) + "x" + std::to_string(cols) + " entries");
    FpMatrix out(m.p(), rows, cols);
    switch (q) {
      case -3:
        for (Element a = 0; a < n; ++a) {
          for (Element b = 0; b < n; ++b) {
            std::size_t blk = a * n + b;
            add_block(out, b, blk, &m.rho(g.inv(a)), d, false);
            add_block(out, g.mul(a, b), blk, nullptr, d, true);
            add_block(out, a, blk, nullptr, d, false);
          }
        }
        break;
      case -2:
        for (Element a = 0; a < n; ++a) {
          add_block(out, 0, a, &m.rho(g.inv(a)), d, false);
          add_block(out, 0, a, nullptr, d, true);
        }
        break;
      case -1:
        for (Element a = 0; a < n; ++a) {
          add_block(out, 0, 0, &m.rho(a), d, false);
        }
        break;
      case 0:
        for (Element a = 0; a < n; ++a) {
          add_block(out, a, 0, &m.rho(a), d, false);
          add_block(out, a, 0, nullptr, d, true);
        }
        break;
      case 1:
        for (Element a = 0; a < n; ++a) {
          for (Element b = 0; b < n; ++b) {
            std::size_t blk = a * n + b;
            add_block(out, blk, b, &m.rho(a), d, false);
            add_block(out, blk, g.mul(a, b), nullptr, d, true);
            add_block(out, blk, a, nullptr, d, false);
          }
        }
        break;
      case 2:
        for (Element a = 0; a < n; ++a) {
          for (Element b = 0; b < n; ++b) {
            for (Element c = 0; c < n; ++c) {
              std::size_t blk = (a * n + b) * n + c;
              add_block(out, blk, b * n + c, &m.rho(a), d, false);
              add_block(out, blk, g.mul(a, b) * n + c, nullptr, d, true);
              add_block(out, blk, a * n + g.mul(b, c), nullptr, d, false);
              add_block(out, blk, a * n + b, nullptr, d, true);
            }
          }
        }
        break;
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // CohGroup
  ////////////////////////////////////////////////////////////////////////

  CohGroup::CohGroup(FpGModule m, int k) : _module(std::move(m)), _k(k) {
    SHRINKLAB_REQUIRE(k >= -2 && k <= 2, RangeExceeded, "Tate degree outside -2..2");
    auto const&       g = _module.group();
    std::size_t const n = g.order(), d = _module.dim();
    Residue const     p = _module.p();
    SHRINKLAB_REQUIRE(n * n * d <= kTateCap,
                      CapExceeded,
                      "|G|^2 dim M = " + std::to_string(n * n * d) + " exceeds the cap");
    _chain_dim = tate_blocks(n, k) * d;
    auto const id = FpMatrix::identity(p, d);

    // cycles (as kernel vectors) and a spanning set of boundaries (columns)
    std::vector<FpVector> cycles;
    FpMatrix              bounds(p, _chain_dim, 0);
    switch (k) {
      case -2:
        cycles = kernel(tate_differential(_module, -2));
        bounds = tate_differential(_module, -3);
        break;
      case -1: {
        cycles = kernel(norm_map(_module));
        // I_G M is spanned by (s^-1 - 1) M over generators s
        for (auto s : g.generators()) {
          bounds = bounds.hstack(_module.rho(g.inv(s)) - id);
        }
        break;
      }
      case 0: {
        FpMatrix eq(p, 0, d);
        for (auto s : g.generators()) {
          eq = eq.vstack(_module.rho(s) - id);
        }
        cycles = kernel(eq);
        bounds = norm_map(_module);
        break;
      }
      default:
        cycles = kernel(tate_differential(_module, k));
        bounds = tate_differential(_module, k - 1);
        break;
    }
    auto const bbasis = column_basis(bounds);
    auto       stack  = FpMatrix::from_columns(p, _chain_dim, bbasis);
    stack             = stack.hstack(FpMatrix::from_columns(p, _chain_dim, cycles));
    auto const ech    = rref(stack);
    std::vector<FpVector> full = bbasis;
    for (auto c : ech.pivots) {
      if (c >= bbasis.size()) {
        _reps.push_back(cycles[c - bbasis.size()]);
        full.push_back(_reps.back());
      }
    }
    std::size_t const h = _reps.size();
    if (h == 0) {
      _projection = FpMatrix(p, 0, _chain_dim);
      return;
    }
    auto const li = left_inverse(FpMatrix::from_columns(p, _chain_dim, full));
    std::vector<std::size_t> rows;
    for (std::size_t i = bbasis.size(); i < full.size(); ++i) {
      rows.push_back(i);
    }
    _projection = li.select_rows(rows);
  }

  bool CohGroup::is_cocycle(FpVector const& v) const {
    if (v.size() != _chain_dim) {
      return false;
    }
    if (_k == -2) {
      return fp::is_zero(tate_apply(_module, -2, v));
    }
    if (_k == 0) {
      auto const& g = _module.group();
      for (auto s : g.generators()) {
        if (_module.act(s, v) != v) {
          return false;
        }
      }
      return true;
    }
    return fp::is_zero(tate_apply(_module, _k, v));
  }

  FpVector CohGroup::classify(FpVector const& cocycle) const {
    SHRINKLAB_REQUIRE(is_cocycle(cocycle), InvalidArgument,
                      "vector is not a cocycle in degree " + std::to_string(_k));
    return _projection.apply(cocycle);
  }

  FpVector CohGroup::representative(FpVector const& coords) const {
    SHRINKLAB_REQUIRE(coords.size() == dim(), DimensionMismatch, "class coordinates");
    FpVector out(_chain_dim, 0);
    for (std::size_t i = 0; i < coords.size(); ++i) {
      fp::axpy(out, coords[i], _reps[i], _module.p());
    }
    return out;
  }

  CohGroupPtr tate(FpGModule const& m, int k) {
    return std::make_shared<CohGroup const>(m, k);
  }

  ////////////////////////////////////////////////////////////////////////
  // Dimension shifting
  ////////////////////////////////////////////////////////////////////////

  namespace {
    // apply a module map to every M-block of a chain vector
    FpVector blockwise(FpMatrix const& f, FpVector const& v, std::size_t blocks) {
      SHRINKLAB_REQUIRE(v.size() == blocks * f.cols(), DimensionMismatch, "blockwise");
      FpVector out(blocks * f.rows(), 0);
      FpVector in(f.cols());
      for (std::size_t b = 0; b < blocks; ++b) {
        std::copy(v.begin() + b * f.cols(), v.begin() + (b + 1) * f.cols(), in.begin());
        auto r = f.apply(in);
        std::copy(r.begin(), r.end(), out.begin() + b * f.rows());
      }
      return out;
    }
  }  // namespace

  FpMatrix connecting_map(CohGroup const&  from,
                          CohGroup const&  to,
                          FpGModule const& b,
                          FpMatrix const&  incl,
                          FpMatrix const&  section) {
    int const         q = from.degree();
    std::size_t const n = b.group().order();
    SHRINKLAB_REQUIRE(to.degree() == q + 1, InvalidArgument, "connecting map raises degree by one");
    auto const back = left_inverse(incl);
    FpMatrix   out(b.p(), to.dim(), from.dim());
    for (std::size_t i = 0; i < from.dim(); ++i) {
      auto lifted = blockwise(section, from.reps()[i], tate_blocks(n, q));
      auto db     = tate_apply(b, q, lifted);
      auto a      = blockwise(back, db, tate_blocks(n, q + 1));
      SHRINKLAB_REQUIRE(blockwise(incl, a, tate_blocks(n, q + 1)) == db,
                        InternalVerifyFail,
                        "boundary of the lift does not come from the submodule");
      auto c = to.classify(a);
      for (std::size_t r = 0; r < c.size(); ++r) {
        out(r, i) = c[r];
      }
    }
    return out;
  }

  ShiftStep shift_up(CohGroupPtr from) {
    auto const&       m = from->module();
    int const         q = from->degree();
    SHRINKLAB_REQUIRE(q <= -2, RangeExceeded, "shift_up starts at degree <= -2");
    std::size_t const n = m.group().order(), d = m.dim();
    Residue const     p = m.p();
    auto const        aug = augmentation_ideal(m.group_ptr(), p);
    auto const        a   = tensor_module(m, aug);
    auto const        b   = tensor_module(m, regular_module(m.group_ptr(), p));
    // I -> F_p[G], h - 1 -> e_h - e_1
    FpMatrix iota(p, n, n - 1);
    for (std::size_t h = 1; h < n; ++h) {
      iota(h, h - 1) = 1;
      iota(0, h - 1) = fp::neg(1, p);
    }
    auto     incl = FpMatrix::identity(p, d).kron(iota);
    FpMatrix section(p, d * n, d);
    for (std::size_t c = 0; c < d; ++c) {
      section(c * n, c) = 1;
    }
    auto to     = tate(a, q + 1);
    auto coords = connecting_map(*from, *to, b, incl, section);
    SHRINKLAB_REQUIRE(coords.rows() == coords.cols() && rank(coords) == coords.rows(),
                      InternalVerifyFail,
                      "connecting map is not bijective");
    return {std::move(from), std::move(to), std::move(coords)};
  }

  ShiftStep shift_down(CohGroupPtr from) {
    auto const&       m = from->module();
    int const         q = from->degree();
    SHRINKLAB_REQUIRE(q >= 0, RangeExceeded, "shift_down starts at degree >= 0");
    std::size_t const n = m.group().order(), d = m.dim();
    Residue const     p = m.p();
    auto const        c = tensor_module(m, dual_module(augmentation_ideal(m.group_ptr(), p)));
    auto const        b = tensor_module(m, dual_module(regular_module(m.group_ptr(), p)));
    // M -> M (x) F_p[G]^*, m -> m (x) (sum of dual basis)
    FpMatrix incl(p, d * n, d);
    for (std::size_t cc = 0; cc < d; ++cc) {
      for (std::size_t g = 0; g < n; ++g) {
        incl(cc * n + g, cc) = 1;
      }
    }
    // I^* -> F_p[G]^*, dual basis of h - 1 -> dual basis of e_h
    FpMatrix section(p, d * n, d * (n - 1));
    for (std::size_t cc = 0; cc < d; ++cc) {
      for (std::size_t h = 1; h < n; ++h) {
        section(cc * n + h, cc * (n - 1) + h - 1) = 1;
      }
    }
    auto to    = tate(c, q - 1);
    auto delta = connecting_map(*to, *from, b, incl, section);
    SHRINKLAB_REQUIRE(delta.rows() == delta.cols() && rank(delta) == delta.rows(),
                      InternalVerifyFail,
                      "connecting map is not bijective");
    return {std::move(from), std::move(to), inverse(delta)};
  }

  DimShift dim_shift(CohGroupPtr source) {
    int const k = source->degree();
    Residue   p = source->module().p();
    DimShift  out{source, source, FpMatrix::identity(p, source->dim())};
    if (k == -2) {
      auto step  = shift_up(source);
      out.target = step.to;
      out.coords = step.coords;
    }
    for (int q = k; q >= 0; --q) {
      auto step  = shift_down(out.target);
      out.target = step.to;
      out.coords = step.coords * out.coords;
    }
    return out;
  }

  CohClass dim_shift(CohClass const& x) {
    auto s = dim_shift(x.parent);
    return {s.target, s.coords.apply(x.coords)};
  }

  ////////////////////////////////////////////////////////////////////////
  // Duality
  ////////////////////////////////////////////////////////////////////////

  bool DualityPairing::nondegenerate() const {
    return matrix.rows() == matrix.cols() && rank(matrix) == matrix.rows();
  }

  DualityPairing duality_pairing(FpGModule const& m, std::vector<Residue> const& chi) {
    Residue const p     = m.p();
    auto          left  = twist(dual_module(m), chi);
    auto          right = twist(m, inverse_character(chi, p));
    DualityPairing out{tate(left, 1), tate(right, -2), {}};
    out.matrix = FpMatrix(p, out.cohomology->dim(), out.homology->dim());
    for (std::size_t i = 0; i < out.cohomology->dim(); ++i) {
      auto const& f = out.cohomology->reps()[i];
      for (std::size_t j = 0; j < out.homology->dim(); ++j) {
        auto const&   z   = out.homology->reps()[j];
        std::uint64_t acc = 0;
        for (std::size_t t = 0; t < f.size(); ++t) {
          acc = (acc + std::uint64_t(f[t]) * z[t]) % p;
        }
        out.matrix(i, j) = Residue(acc);
      }
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Semidirect products and the five-term sequence
  ////////////////////////////////////////////////////////////////////////

  SemidirectProduct semidirect_product(FiniteGroup const&              q,
                                       FiniteGroup const&              g,
                                       std::vector<Permutation> const& action,
                                       std::size_t                     cap) {
    std::size_t const nq = q.order(), ng = g.order();
    SHRINKLAB_REQUIRE(nq * ng <= cap, CapExceeded, "semidirect product exceeds the cap");
    SHRINKLAB_REQUIRE(action.size() == ng, DimensionMismatch, "one automorphism per element of G");
    for (Element a = 0; a < ng; ++a) {
      SHRINKLAB_REQUIRE(action[a].size() == nq, DimensionMismatch, "automorphism size");
      for (Element x = 0; x < nq; ++x) {
        for (Element y = 0; y < nq; ++y) {
          SHRINKLAB_REQUIRE(action[a][q.mul(x, y)] == q.mul(action[a][x], action[a][y]),
                            InvalidArgument,
                            "action is not by automorphisms");
        }
      }
      for (Element b = 0; b < ng; ++b) {
        for (Element x = 0; x < nq; ++x) {
          SHRINKLAB_REQUIRE(action[g.mul(a, b)][x] == action[a][action[b][x]],
                            InvalidArgument,
                            "action is not a homomorphism");
        }
      }
    }
    std::size_t const    n = nq * ng;
    std::vector<Element> table(n * n);
    for (Element g1 = 0; g1 < ng; ++g1) {
      for (Element q1 = 0; q1 < nq; ++q1) {
        for (Element g2 = 0; g2 < ng; ++g2) {
          for (Element q2 = 0; q2 < nq; ++q2) {
            Element qq = q.mul(q1, action[g1][q2]);
            Element gg = g.mul(g1, g2);
            table[(q1 + nq * g1) * n + (q2 + nq * g2)] = Element(qq + nq * gg);
          }
        }
      }
    }
    std::vector<Element> gens;
    for (auto x : q.generators()) {
      gens.push_back(x);
    }
    for (auto x : g.generators()) {
      gens.push_back(Element(nq * x));
    }
    SemidirectProduct out;
    out.normal             = share(q);
    out.quotient           = share(g);
    std::string       name = q.name() + ":" + g.name();
    out.group              = share(FiniteGroup(n, std::move(table), std::move(gens), name));
    for (Element e = 0; e < n; ++e) {
      out.projection.push_back(Element(e / nq));
    }
    for (Element x = 0; x < nq; ++x) {
      out.inclusion.push_back(x);
    }
    return out;
  }

  std::vector<Element> frattini_quotient_basis(FiniteGroup const& q, std::uint32_t p) {
    auto const whole = Subgroup::whole(q);
    Subgroup   span  = join(q, power_subgroup(q, whole, p), commutator_subgroup(q, whole, whole));
    std::vector<Element> basis;
    for (Element x = 0; x < q.order(); ++x) {
      if (!span.contains(x)) {
        basis.push_back(x);
        Element gen[] = {x};
        span          = join(q, span, generated_subgroup(q, gen));
      }
    }
    return basis;
  }

  namespace {
    // the map on H_1(E, W) -> H_1(G, W_Q) and the exactness verdicts
    void finish_five_term(FiveTerm& out, FpMatrix const& to_coinv) {
      auto const&       e = *out.product.group;
      Residue const     p = out.h1_e->module().p();
      std::size_t const d = out.h1_e->module().dim(), k = to_coinv.rows();
      out.map_b = FpMatrix(p, out.h1_g->dim(), out.h1_e->dim());
      for (std::size_t j = 0; j < out.h1_e->dim(); ++j) {
        auto const& z = out.h1_e->reps()[j];
        FpVector    image(out.product.quotient->order() * k, 0);
        FpVector    block(d);
        for (Element x = 0; x < e.order(); ++x) {
          std::copy(z.begin() + x * d, z.begin() + (x + 1) * d, block.begin());
          auto    w  = to_coinv.apply(block);
          Element gx = out.product.projection[x];
          for (std::size_t c = 0; c < k; ++c) {
            image[gx * k + c] = fp::add(image[gx * k + c], w[c], p);
          }
        }
        auto coords = out.h1_g->classify(image);
        for (std::size_t r = 0; r < coords.size(); ++r) {
          out.map_b(r, j) = coords[r];
        }
      }
      std::size_t const ra = rank(out.map_a), rb = rank(out.map_b);
      out.exact      = (out.map_b * out.map_a).is_zero() && ra + rb == out.h1_e->dim();
      out.surjective = rb == out.h1_g->dim();
    }
  }  // namespace

  FiveTerm five_term_maps(FiniteGroup const&              q,
                          FiniteGroup const&              g,
                          std::vector<Permutation> const& action,
                          FpGModule const&                w) {
    SHRINKLAB_REQUIRE(w.group() == g, GroupMismatch, "W must be a module over G");
    FiveTerm out;
    out.product = semidirect_product(q, g, action);
    auto const&       e  = *out.product.group;
    auto const        we = inflate(w, out.product.group, out.product.projection);
    Residue const     p  = w.p();
    std::size_t const d  = w.dim();
    out.q_basis = frattini_quotient_basis(q, p);
    out.h1_e    = tate(we, -2);
    out.h1_g    = tate(w, -2);
    out.map_a   = FpMatrix(p, out.h1_e->dim(), out.q_basis.size() * d);
    for (std::size_t i = 0; i < out.q_basis.size(); ++i) {
      Element x = out.product.inclusion[out.q_basis[i]];
      for (std::size_t c = 0; c < d; ++c) {
        FpVector chain(e.order() * d, 0);
        chain[x * d + c] = 1;
        auto coords      = out.h1_e->classify(chain);
        for (std::size_t r = 0; r < coords.size(); ++r) {
          out.map_a(r, i * d + c) = coords[r];
        }
      }
    }
    finish_five_term(out, FpMatrix::identity(p, d));
    return out;
  }

  FiveTerm five_term_maps(SemidirectProduct const& product, FpGModule const& w) {
    SHRINKLAB_REQUIRE(w.group() == *product.group, GroupMismatch, "W must be a module over E");
    FiveTerm out;
    out.product = product;
    auto const&       e = *product.group;
    Residue const     p = w.p();
    std::size_t const d = w.dim(), nq = product.normal->order();
    Subgroup const    qsub(e, product.inclusion);
    auto const        wq = restrict_module(w, qsub);
    out.h1_q            = tate(wq, -2);
    out.h1_e            = tate(w, -2);
    // W_Q as a G-module through the complement {(1, g)}
    auto const co      = coinvariants(wq);
    auto const section = right_inverse(co.projection);
    std::vector<FpMatrix> rho;
    for (Element g = 0; g < product.quotient->order(); ++g) {
      rho.push_back(co.projection * w.rho(Element(nq * g)) * section);
    }
    out.h1_g  = tate(FpGModule::from_all(product.quotient, p, std::move(rho)), -2);
    out.map_a = FpMatrix(p, out.h1_e->dim(), out.h1_q->dim());
    for (std::size_t i = 0; i < out.h1_q->dim(); ++i) {
      auto const& z = out.h1_q->reps()[i];
      FpVector    chain(e.order() * d, 0);
      for (Element x = 0; x < nq; ++x) {
        for (std::size_t c = 0; c < d; ++c) {
          chain[product.inclusion[x] * d + c] = z[x * d + c];
        }
      }
      auto coords = out.h1_e->classify(chain);
      for (std::size_t r = 0; r < coords.size(); ++r) {
        out.map_a(r, i) = coords[r];
      }
    }
    finish_five_term(out, co.projection);
    return out;
  }

}  // namespace shrinklab
