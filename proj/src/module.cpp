#include "shrinklab/module.hpp"

#include <algorithm>
#include <map>

#include "shrinklab/error.hpp"

namespace shrinklab {

  FpGModule::FpGModule(GroupPtr group, Residue p, std::size_t dim, std::vector<FpMatrix> rho)
      : _group(std::move(group)),
        _p(p),
        _dim(dim),
        _rho(std::make_shared<std::vector<FpMatrix> const>(std::move(rho))) {}

  namespace {
    void check_shape(FiniteGroup const& g, Residue p, std::size_t dim,
                     std::vector<FpMatrix> const& rho) {
      SHRINKLAB_REQUIRE(fp::is_prime(p), InvalidArgument, "p must be prime");
      SHRINKLAB_REQUIRE(dim * dim * g.order() <= kModuleEntryCap,
                        CapExceeded,
                        "module of dimension " + std::to_string(dim) + " over a group of order "
                            + std::to_string(g.order()) + " exceeds the action-matrix cap");
      SHRINKLAB_REQUIRE(rho.size() == g.order(), DimensionMismatch, "one matrix per element");
      for (auto const& m : rho) {
        SHRINKLAB_REQUIRE(m.rows() == dim && m.cols() == dim && m.p() == p,
                          DimensionMismatch,
                          "action matrix shape");
      }
    }
  }  // namespace

  FpGModule FpGModule::from_generators(GroupPtr                     group,
                                       Residue                      p,
                                       std::size_t                  dim,
                                       std::vector<FpMatrix> const& gen_action) {
    auto const& g = *group;
    SHRINKLAB_REQUIRE(gen_action.size() == g.generators().size(),
                      DimensionMismatch,
                      "one matrix per generator");
    for (auto const& m : gen_action) {
      SHRINKLAB_REQUIRE(m.rows() == dim && m.cols() == dim && m.p() == p,
                        DimensionMismatch,
                        "generator matrix shape");
    }
    std::vector<FpMatrix> rho(g.order());
    std::vector<bool>     known(g.order(), false);
    rho[0]   = FpMatrix::identity(p, dim);
    known[0] = true;
    std::vector<Element> queue{0};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      Element x = queue[i];
      for (std::size_t s = 0; s < gen_action.size(); ++s) {
        Element y = g.mul(x, g.generators()[s]);
        if (!known[y]) {
          rho[y]   = rho[x] * gen_action[s];
          known[y] = true;
          queue.push_back(y);
        }
      }
    }
    return from_all(std::move(group), p, std::move(rho));
  }

  FpGModule FpGModule::from_all(GroupPtr group, Residue p, std::vector<FpMatrix> rho) {
    auto m = trusted(std::move(group), p, std::move(rho));
    SHRINKLAB_REQUIRE(m.is_homomorphism(), InvalidArgument, "action is not a homomorphism");
    return m;
  }

  FpGModule FpGModule::trusted(GroupPtr group, Residue p, std::vector<FpMatrix> rho) {
    std::size_t dim = rho.empty() ? 0 : rho[0].rows();
    check_shape(*group, p, dim, rho);
    return FpGModule(std::move(group), p, dim, std::move(rho));
  }

  bool FpGModule::is_homomorphism() const {
    auto const& g = *_group;
    if (!(rho(0) == FpMatrix::identity(_p, _dim))) {
      return false;
    }
    for (Element x = 0; x < g.order(); ++x) {
      for (auto s : g.generators()) {
        if (!(rho(x) * rho(s) == rho(g.mul(x, s)))) {
          return false;
        }
      }
    }
    return true;
  }

  bool FpGModule::is_trivial_action() const {
    auto id = FpMatrix::identity(_p, _dim);
    for (auto s : group().generators()) {
      if (!(rho(s) == id)) {
        return false;
      }
    }
    return true;
  }

  bool same_group(FpGModule const& a, FpGModule const& b) noexcept {
    return a.group_ptr() == b.group_ptr() || a.group() == b.group();
  }

  void require_same_group(FpGModule const& a, FpGModule const& b) {
    SHRINKLAB_REQUIRE(same_group(a, b), GroupMismatch, "modules over different groups");
    SHRINKLAB_REQUIRE(a.p() == b.p(), GroupMismatch, "modules over different primes");
  }

  bool is_equivariant(FpGModule const& source, FpGModule const& target, FpMatrix const& m) {
    for (auto s : source.group().generators()) {
      if (!(m * source.rho(s) == target.rho(s) * m)) {
        return false;
      }
    }
    return true;
  }

  ModuleHom::ModuleHom(FpGModule source, FpGModule target, FpMatrix matrix)
      : _source(std::move(source)), _target(std::move(target)), _matrix(std::move(matrix)) {
    require_same_group(_source, _target);
    SHRINKLAB_REQUIRE(_matrix.rows() == _target.dim() && _matrix.cols() == _source.dim(),
                      DimensionMismatch,
                      "hom matrix shape");
    SHRINKLAB_REQUIRE(is_equivariant(_source, _target, _matrix),
                      NotEquivariant,
                      "matrix does not commute with the action");
  }

  bool ModuleHom::is_surjective() const {
    return rank(_matrix) == _target.dim();
  }

  std::vector<FpMatrix> equivariant_hom_basis(FpGModule const& source, FpGModule const& target) {
    require_same_group(source, target);
    Residue const     p  = source.p();
    std::size_t const ds = source.dim(), dt = target.dim();
    auto const&       gens = source.group().generators();
    FpMatrix          eq(p, gens.size() * dt * ds, dt * ds);
    std::size_t       row = 0;
    for (auto s : gens) {
      auto const& a = source.rho(s);
      auto const& b = target.rho(s);
      // (X a - b X)(i,l)
      for (std::size_t i = 0; i < dt; ++i) {
        for (std::size_t l = 0; l < ds; ++l, ++row) {
          for (std::size_t j = 0; j < ds; ++j) {
            eq(row, i * ds + j) = fp::add(eq(row, i * ds + j), a(j, l), p);
          }
          for (std::size_t k = 0; k < dt; ++k) {
            eq(row, k * ds + l) = fp::sub(eq(row, k * ds + l), b(i, k), p);
          }
        }
      }
    }
    std::vector<FpMatrix> out;
    for (auto const& v : kernel(eq)) {
      FpMatrix x(p, dt, ds);
      for (std::size_t i = 0; i < dt; ++i) {
        for (std::size_t j = 0; j < ds; ++j) {
          x(i, j) = v[i * ds + j];
        }
      }
      out.push_back(std::move(x));
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Constructions
  ////////////////////////////////////////////////////////////////////////

  FpGModule trivial_module(GroupPtr g, Residue p, std::size_t dim) {
    std::vector<FpMatrix> rho(g->order(), FpMatrix::identity(p, dim));
    return FpGModule::trusted(std::move(g), p, std::move(rho));
  }

  FpGModule regular_module(GroupPtr g, Residue p) {
    std::size_t const     n = g->order();
    std::vector<FpMatrix> rho;
    for (Element x = 0; x < n; ++x) {
      FpMatrix m(p, n, n);
      for (Element h = 0; h < n; ++h) {
        m(g->mul(x, h), h) = 1;
      }
      rho.push_back(std::move(m));
    }
    return FpGModule::trusted(std::move(g), p, std::move(rho));
  }

  FpGModule augmentation_ideal(GroupPtr g, Residue p) {
    std::size_t const     n = g->order();
    std::vector<FpMatrix> rho;
    // basis index of h - 1 is h - 1
    for (Element x = 0; x < n; ++x) {
      FpMatrix m(p, n - 1, n - 1);
      for (Element h = 1; h < n; ++h) {
        // x (h - 1) = (xh - 1) - (x - 1)
        Element xh = g->mul(x, h);
        if (xh != 0) {
          m(xh - 1, h - 1) = fp::add(m(xh - 1, h - 1), 1, p);
        }
        if (x != 0) {
          m(x - 1, h - 1) = fp::sub(m(x - 1, h - 1), 1, p);
        }
      }
      rho.push_back(std::move(m));
    }
    return FpGModule::trusted(std::move(g), p, std::move(rho));
  }

  FpGModule tensor_module(FpGModule const& m, FpGModule const& n) {
    require_same_group(m, n);
    std::vector<FpMatrix> rho;
    for (Element x = 0; x < m.group().order(); ++x) {
      rho.push_back(m.rho(x).kron(n.rho(x)));
    }
    return FpGModule::trusted(m.group_ptr(), m.p(), std::move(rho));
  }

  FpGModule tensor_power(FpGModule const& m, std::size_t s) {
    FpGModule out = trivial_module(m.group_ptr(), m.p(), 1);
    for (std::size_t i = 0; i < s; ++i) {
      out = i == 0 ? m : tensor_module(out, m);
    }
    return out;
  }

  FpGModule dual_module(FpGModule const& m) {
    std::vector<FpMatrix> rho;
    for (Element x = 0; x < m.group().order(); ++x) {
      rho.push_back(m.rho(m.group().inv(x)).transpose());
    }
    return FpGModule::trusted(m.group_ptr(), m.p(), std::move(rho));
  }

  FpGModule direct_sum(FpGModule const& m, FpGModule const& n) {
    require_same_group(m, n);
    std::size_t const     a = m.dim(), b = n.dim();
    std::vector<FpMatrix> rho;
    for (Element x = 0; x < m.group().order(); ++x) {
      FpMatrix out(m.p(), a + b, a + b);
      for (std::size_t i = 0; i < a; ++i) {
        for (std::size_t j = 0; j < a; ++j) {
          out(i, j) = m.rho(x)(i, j);
        }
      }
      for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
          out(a + i, a + j) = n.rho(x)(i, j);
        }
      }
      rho.push_back(std::move(out));
    }
    return FpGModule::trusted(m.group_ptr(), m.p(), std::move(rho));
  }

  FpGModule direct_sum(FpGModule const& m, std::size_t r) {
    SHRINKLAB_REQUIRE(r >= 1, InvalidArgument, "direct sum of zero copies");
    FpGModule out = m;
    for (std::size_t i = 1; i < r; ++i) {
      out = direct_sum(out, m);
    }
    return out;
  }

  namespace {
    void check_character(FiniteGroup const& g, Residue p, std::vector<Residue> const& chi) {
      SHRINKLAB_REQUIRE(chi.size() == g.order(), DimensionMismatch, "character needs a value per element");
      for (Element a = 0; a < g.order(); ++a) {
        SHRINKLAB_REQUIRE(chi[a] % p != 0, InvalidArgument, "character value must be a unit");
        for (auto s : g.generators()) {
          SHRINKLAB_REQUIRE(chi[g.mul(a, s)] == fp::mul(chi[a], chi[s], p),
                            InvalidArgument,
                            "values do not define a character");
        }
      }
      SHRINKLAB_REQUIRE(chi[0] == 1, InvalidArgument, "character must send 1 to 1");
    }
  }  // namespace

  std::vector<Residue> character_from_generators(FiniteGroup const&          g,
                                                 Residue                     p,
                                                 std::vector<Residue> const& values) {
    SHRINKLAB_REQUIRE(values.size() == g.generators().size(),
                      DimensionMismatch,
                      "one character value per generator");
    std::vector<Residue> chi(g.order(), 0);
    std::vector<bool>    known(g.order(), false);
    chi[0]   = 1;
    known[0] = true;
    std::vector<Element> queue{0};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      for (std::size_t s = 0; s < values.size(); ++s) {
        Element y = g.mul(queue[i], g.generators()[s]);
        if (!known[y]) {
          chi[y]   = fp::mul(chi[queue[i]], values[s] % p, p);
          known[y] = true;
          queue.push_back(y);
        }
      }
    }
    check_character(g, p, chi);
    return chi;
  }

  std::vector<Residue> inverse_character(std::vector<Residue> const& chi, Residue p) {
    std::vector<Residue> out;
    for (auto c : chi) {
      out.push_back(fp::inv(c, p));
    }
    return out;
  }

  FpGModule twist(FpGModule const& m, std::vector<Residue> const& chi) {
    check_character(m.group(), m.p(), chi);
    std::vector<FpMatrix> rho;
    for (Element x = 0; x < m.group().order(); ++x) {
      rho.push_back(m.rho(x).scaled(fp::inv(chi[x], m.p())));
    }
    return FpGModule::trusted(m.group_ptr(), m.p(), std::move(rho));
  }

  std::vector<Element> coset_representatives(FiniteGroup const& g, Subgroup const& h) {
    std::vector<Element> reps;
    for (Element x = 0; x < g.order(); ++x) {
      Element least = x;
      for (auto y : h.elements()) {
        least = std::min(least, g.mul(x, y));
      }
      if (least == x) {
        reps.push_back(x);
      }
    }
    return reps;
  }

  FpGModule induced_trivial(GroupPtr g, Subgroup const& h, Residue p) {
    auto const  reps = coset_representatives(*g, h);
    std::size_t n    = reps.size();
    // coset index of every element
    std::vector<std::size_t> coset(g->order());
    for (std::size_t c = 0; c < n; ++c) {
      for (auto y : h.elements()) {
        coset[g->mul(reps[c], y)] = c;
      }
    }
    std::vector<FpMatrix> rho;
    for (Element x = 0; x < g->order(); ++x) {
      FpMatrix m(p, n, n);
      for (std::size_t c = 0; c < n; ++c) {
        m(coset[g->mul(x, reps[c])], c) = 1;
      }
      rho.push_back(std::move(m));
    }
    return FpGModule::trusted(std::move(g), p, std::move(rho));
  }

  FpGModule restrict_module(FpGModule const& m, Subgroup const& h) {
    auto                  sub = as_group(m.group(), h);
    std::vector<FpMatrix> rho;
    for (auto e : sub.embedding) {
      rho.push_back(m.rho(e));
    }
    return FpGModule::trusted(share(std::move(sub.group)), m.p(), std::move(rho));
  }

  FpGModule inflate(FpGModule const& m, GroupPtr big, std::vector<Element> const& quotient) {
    SHRINKLAB_REQUIRE(quotient.size() == big->order(), DimensionMismatch, "quotient map size");
    auto const& small = m.group();
    for (Element a = 0; a < big->order(); ++a) {
      SHRINKLAB_REQUIRE(quotient[a] < small.order(), IndexOutOfRange, "quotient map range");
      for (auto s : big->generators()) {
        SHRINKLAB_REQUIRE(quotient[big->mul(a, s)] == small.mul(quotient[a], quotient[s]),
                          InvalidArgument,
                          "quotient map is not a homomorphism");
      }
    }
    std::vector<FpMatrix> rho;
    for (Element a = 0; a < big->order(); ++a) {
      rho.push_back(m.rho(quotient[a]));
    }
    return FpGModule::trusted(std::move(big), m.p(), std::move(rho));
  }

  FpGModule shift_module(GroupPtr g, Residue p, int k) {
    if (k == -1) {
      return trivial_module(std::move(g), p, 1);
    }
    auto aug = augmentation_ideal(g, p);
    if (k >= 0) {
      return dual_module(tensor_power(aug, std::size_t(k + 1)));
    }
    return tensor_power(aug, std::size_t(-(k + 1)));
  }

  FpGModule shift_coefficients(FpGModule const& m, int k) {
    SHRINKLAB_REQUIRE(k >= -4 && k <= 4, RangeExceeded, "shift degree outside -4..4");
    return tensor_module(m, shift_module(m.group_ptr(), m.p(), k));
  }

  ////////////////////////////////////////////////////////////////////////
  // Invariants, coinvariants, norm
  ////////////////////////////////////////////////////////////////////////

  FpMatrix complement_basis(FpMatrix const& span, std::size_t n) {
    SHRINKLAB_REQUIRE(span.rows() == n, DimensionMismatch, "span rows");
    auto const        ech = rref(span.transpose());
    std::vector<bool> pivot(n, false);
    for (auto c : ech.pivots) {
      pivot[c] = true;
    }
    std::vector<FpVector> cols;
    for (std::size_t i = 0; i < n; ++i) {
      if (!pivot[i]) {
        FpVector e(n, 0);
        e[i] = 1;
        cols.push_back(std::move(e));
      }
    }
    return FpMatrix::from_columns(span.p(), n, cols);
  }

  FpMatrix quotient_projection(FpMatrix const& span, std::size_t n) {
    auto basis = column_basis(span);
    auto comp  = complement_basis(span, n);
    auto full  = FpMatrix::from_columns(span.p(), n, basis).hstack(comp);
    auto inv   = inverse(full);
    std::vector<std::size_t> rows;
    for (std::size_t i = basis.size(); i < n; ++i) {
      rows.push_back(i);
    }
    return inv.select_rows(rows);
  }

  Coinvariants coinvariants(FpGModule const& m) {
    std::size_t const d = m.dim();
    FpMatrix          span(m.p(), d, 0);
    auto const        id = FpMatrix::identity(m.p(), d);
    for (auto s : m.group().generators()) {
      span = span.hstack(m.rho(s) - id);
    }
    auto q = quotient_projection(span, d);
    return {q.rows(), std::move(q)};
  }

  std::vector<FpVector> invariants(FpGModule const& m) {
    std::size_t const d = m.dim();
    FpMatrix          eq(m.p(), 0, d);
    auto const        id = FpMatrix::identity(m.p(), d);
    for (auto s : m.group().generators()) {
      eq = eq.vstack(m.rho(s) - id);
    }
    return kernel(eq);
  }

  FpMatrix norm_map(FpGModule const& m) {
    FpMatrix out(m.p(), m.dim(), m.dim());
    for (Element x = 0; x < m.group().order(); ++x) {
      out = out + m.rho(x);
    }
    return out;
  }

}  // namespace shrinklab
