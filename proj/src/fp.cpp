#include "shrinklab/fp.hpp"
#include <algorithm>

#include "shrinklab/error.hpp"

namespace shrinklab {

  namespace fp {
    Residue pow(Residue a, std::uint64_t e, Residue p) noexcept {
      std::uint64_t result = 1 % p, base = a % p;
      while (e > 0) {
        if (e & 1) {
          result = (result * base) % p;
        }
        base = (base * base) % p;
        e >>= 1;
      }
      return static_cast<Residue>(result);
    }

    Residue inv(Residue a, Residue p) {
      SHRINKLAB_REQUIRE(a % p != 0, InvalidArgument, "inverse of zero mod p");
      return pow(a, p - 2, p);
    }

    Residue reduce(std::int64_t a, Residue p) noexcept {
      std::int64_t r = a % static_cast<std::int64_t>(p);
      if (r < 0) {
        r += p;
      }
      return static_cast<Residue>(r);
    }

    bool is_prime(std::uint64_t n) noexcept {
      if (n < 2) {
        return false;
      }
      for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
          return false;
        }
      }
      return true;
    }

    bool is_zero(FpVector const& v) noexcept {
      for (auto x : v) {
        if (x != 0) {
          return false;
        }
      }
      return true;
    }

    FpVector add(FpVector const& a, FpVector const& b, Residue p) {
      SHRINKLAB_REQUIRE(a.size() == b.size(), DimensionMismatch, "vector add");
      FpVector out(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = add(a[i], b[i], p);
      }
      return out;
    }

    FpVector scale(FpVector const& a, Residue c, Residue p) {
      FpVector out(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = mul(a[i], c, p);
      }
      return out;
    }

    void axpy(FpVector& a, Residue c, FpVector const& b, Residue p) {
      SHRINKLAB_REQUIRE(a.size() == b.size(), DimensionMismatch, "axpy");
      if (c == 0) {
        return;
      }
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (b[i] != 0) {
          a[i] = add(a[i], mul(c, b[i], p), p);
        }
      }
    }
  }  // namespace fp

  FpMatrix FpMatrix::identity(Residue p, std::size_t n) {
    FpMatrix m(p, n, n);
    for (std::size_t i = 0; i < n; ++i) {
      m(i, i) = 1 % p;
    }
    return m;
  }

  FpMatrix FpMatrix::from_columns(Residue                      p,
                                  std::size_t                  rows,
                                  std::vector<FpVector> const& cols) {
    FpMatrix m(p, rows, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      SHRINKLAB_REQUIRE(
          cols[c].size() == rows, DimensionMismatch, "from_columns");
      for (std::size_t r = 0; r < rows; ++r) {
        m(r, c) = cols[c][r];
      }
    }
    return m;
  }

  FpMatrix FpMatrix::from_rows(Residue                      p,
                               std::size_t                  cols,
                               std::vector<FpVector> const& rows) {
    FpMatrix m(p, rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      SHRINKLAB_REQUIRE(rows[r].size() == cols, DimensionMismatch, "from_rows");
      for (std::size_t c = 0; c < cols; ++c) {
        m(r, c) = rows[r][c];
      }
    }
    return m;
  }

  FpVector FpMatrix::column(std::size_t c) const {
    FpVector v(_rows);
    for (std::size_t r = 0; r < _rows; ++r) {
      v[r] = (*this)(r, c);
    }
    return v;
  }

  FpMatrix FpMatrix::operator*(FpMatrix const& that) const {
    SHRINKLAB_REQUIRE(_cols == that._rows && _p == that._p,
                      DimensionMismatch,
                      "matrix product");
    FpMatrix out(_p, _rows, that._cols);
    std::vector<std::uint64_t> acc(that._cols);
    for (std::size_t i = 0; i < _rows; ++i) {
      std::fill(acc.begin(), acc.end(), 0);
      for (std::size_t k = 0; k < _cols; ++k) {
        std::uint64_t a = (*this)(i, k);
        if (a == 0) {
          continue;
        }
        auto brow = that.row(k);
        for (std::size_t j = 0; j < that._cols; ++j) {
          acc[j] += a * brow[j];
          // keep the accumulator bounded
          if (acc[j] >= (std::uint64_t(1) << 62)) {
            acc[j] %= _p;
          }
        }
      }
      for (std::size_t j = 0; j < that._cols; ++j) {
        out(i, j) = static_cast<Residue>(acc[j] % _p);
      }
    }
    return out;
  }

  FpMatrix FpMatrix::operator+(FpMatrix const& that) const {
    SHRINKLAB_REQUIRE(_rows == that._rows && _cols == that._cols,
                      DimensionMismatch,
                      "matrix sum");
    FpMatrix out(*this);
    for (std::size_t i = 0; i < _data.size(); ++i) {
      out._data[i] = fp::add(_data[i], that._data[i], _p);
    }
    return out;
  }

  FpMatrix FpMatrix::operator-(FpMatrix const& that) const {
    SHRINKLAB_REQUIRE(_rows == that._rows && _cols == that._cols,
                      DimensionMismatch,
                      "matrix difference");
    FpMatrix out(*this);
    for (std::size_t i = 0; i < _data.size(); ++i) {
      out._data[i] = fp::sub(_data[i], that._data[i], _p);
    }
    return out;
  }

  FpVector FpMatrix::apply(FpVector const& v) const {
    SHRINKLAB_REQUIRE(v.size() == _cols, DimensionMismatch, "matrix apply");
    FpVector out(_rows);
    for (std::size_t i = 0; i < _rows; ++i) {
      std::uint64_t acc = 0;
      auto          r   = row(i);
      for (std::size_t j = 0; j < _cols; ++j) {
        if (v[j] != 0 && r[j] != 0) {
          acc = (acc + std::uint64_t(r[j]) * v[j]) % _p;
        }
      }
      out[i] = static_cast<Residue>(acc);
    }
    return out;
  }

  FpMatrix FpMatrix::transpose() const {
    FpMatrix out(_p, _cols, _rows);
    for (std::size_t i = 0; i < _rows; ++i) {
      for (std::size_t j = 0; j < _cols; ++j) {
        out(j, i) = (*this)(i, j);
      }
    }
    return out;
  }

  FpMatrix FpMatrix::kron(FpMatrix const& that) const {
    FpMatrix out(_p, _rows * that._rows, _cols * that._cols);
    for (std::size_t i = 0; i < _rows; ++i) {
      for (std::size_t j = 0; j < _cols; ++j) {
        Residue a = (*this)(i, j);
        if (a == 0) {
          continue;
        }
        for (std::size_t k = 0; k < that._rows; ++k) {
          for (std::size_t l = 0; l < that._cols; ++l) {
            out(i * that._rows + k, j * that._cols + l)
                = fp::mul(a, that(k, l), _p);
          }
        }
      }
    }
    return out;
  }

  FpMatrix FpMatrix::scaled(Residue c) const {
    FpMatrix out(*this);
    for (auto& x : out._data) {
      x = fp::mul(x, c, _p);
    }
    return out;
  }

  bool FpMatrix::is_zero() const noexcept {
    for (auto x : _data) {
      if (x != 0) {
        return false;
      }
    }
    return true;
  }

  FpMatrix FpMatrix::select_rows(std::vector<std::size_t> const& idx) const {
    FpMatrix out(_p, idx.size(), _cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      auto src = row(idx[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
  }

  FpMatrix FpMatrix::select_cols(std::vector<std::size_t> const& idx) const {
    FpMatrix out(_p, _rows, idx.size());
    for (std::size_t i = 0; i < _rows; ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) {
        out(i, j) = (*this)(i, idx[j]);
      }
    }
    return out;
  }

  FpMatrix FpMatrix::hstack(FpMatrix const& that) const {
    SHRINKLAB_REQUIRE(_rows == that._rows, DimensionMismatch, "hstack");
    FpMatrix out(_p, _rows, _cols + that._cols);
    for (std::size_t i = 0; i < _rows; ++i) {
      auto dst = out.row(i);
      std::copy(row(i).begin(), row(i).end(), dst.begin());
      std::copy(that.row(i).begin(), that.row(i).end(), dst.begin() + _cols);
    }
    return out;
  }

  FpMatrix FpMatrix::vstack(FpMatrix const& that) const {
    SHRINKLAB_REQUIRE(_cols == that._cols, DimensionMismatch, "vstack");
    FpMatrix out(_p, _rows + that._rows, _cols);
    std::copy(_data.begin(), _data.end(), out._data.begin());
    std::copy(that._data.begin(),
              that._data.end(),
              out._data.begin() + _data.size());
    return out;
  }

  RowEchelon rref(FpMatrix m) {
    Residue const p = m.p();
    RowEchelon    out;
    std::size_t   r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
      std::size_t piv = r;
      while (piv < m.rows() && m(piv, c) == 0) {
        ++piv;
      }
      if (piv == m.rows()) {
        continue;
      }
      if (piv != r) {
        auto a = m.row(piv);
        auto b = m.row(r);
        std::swap_ranges(a.begin(), a.end(), b.begin());
      }
      Residue const s   = fp::inv(m(r, c), p);
      auto          prw = m.row(r);
      for (std::size_t j = c; j < m.cols(); ++j) {
        prw[j] = fp::mul(prw[j], s, p);
      }
      for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i == r || m(i, c) == 0) {
          continue;
        }
        Residue const f   = p - m(i, c);
        auto          irw = m.row(i);
        for (std::size_t j = c; j < m.cols(); ++j) {
          if (prw[j] != 0) {
            irw[j] = static_cast<Residue>(
                (irw[j] + std::uint64_t(f) * prw[j]) % p);
          }
        }
      }
      out.pivots.push_back(c);
      ++r;
    }
    out.rank    = r;
    out.reduced = std::move(m);
    return out;
  }

  std::size_t rank(FpMatrix const& m) {
    // eliminate on the shorter side
    if (m.rows() > m.cols()) {
      return rref(m.transpose()).rank;
    }
    return rref(m).rank;
  }

  std::vector<FpVector> kernel(FpMatrix const& m) {
    Residue const            p  = m.p();
    auto const               re = rref(m);
    std::vector<bool>        is_pivot(m.cols(), false);
    for (auto c : re.pivots) {
      is_pivot[c] = true;
    }
    std::vector<FpVector> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
      if (is_pivot[f]) {
        continue;
      }
      FpVector v(m.cols(), 0);
      v[f] = 1 % p;
      for (std::size_t i = 0; i < re.rank; ++i) {
        v[re.pivots[i]] = fp::neg(re.reduced(i, f), p);
      }
      basis.push_back(std::move(v));
    }
    return basis;
  }

  std::optional<FpVector> solve(FpMatrix const& m, FpVector const& v) {
    SHRINKLAB_REQUIRE(v.size() == m.rows(), DimensionMismatch, "solve");
    FpMatrix aug(m.p(), m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      auto src = m.row(i);
      std::copy(src.begin(), src.end(), aug.row(i).begin());
      aug(i, m.cols()) = v[i];
    }
    auto const re = rref(std::move(aug));
    if (!re.pivots.empty() && re.pivots.back() == m.cols()) {
      return std::nullopt;
    }
    FpVector x(m.cols(), 0);
    for (std::size_t i = 0; i < re.rank; ++i) {
      x[re.pivots[i]] = re.reduced(i, m.cols());
    }
    return x;
  }

  FpMatrix inverse(FpMatrix const& m) {
    SHRINKLAB_REQUIRE(m.rows() == m.cols(), DimensionMismatch, "inverse");
    std::size_t const n   = m.rows();
    auto const        re  = rref(m.hstack(FpMatrix::identity(m.p(), n)));
    SHRINKLAB_REQUIRE(re.rank >= n && (n == 0 || re.pivots[n - 1] == n - 1),
                      DimensionMismatch,
                      "matrix is singular");
    FpMatrix out(m.p(), n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        out(i, j) = re.reduced(i, n + j);
      }
    }
    return out;
  }

  FpMatrix left_inverse(FpMatrix const& k) {
    // independent rows of k are the pivot columns of k^T
    auto const re = rref(k.transpose());
    SHRINKLAB_REQUIRE(re.rank == k.cols(),
                      DimensionMismatch,
                      "left_inverse needs full column rank");
    auto const sub_inv = inverse(k.select_rows(re.pivots));
    FpMatrix   out(k.p(), k.cols(), k.rows());
    for (std::size_t i = 0; i < k.cols(); ++i) {
      for (std::size_t j = 0; j < re.pivots.size(); ++j) {
        out(i, re.pivots[j]) = sub_inv(i, j);
      }
    }
    return out;
  }

  FpMatrix right_inverse(FpMatrix const& m) {
    return left_inverse(m.transpose()).transpose();
  }

  std::vector<FpVector> column_basis(FpMatrix const& m) {
    auto const            re = rref(m);
    std::vector<FpVector> out;
    for (auto c : re.pivots) {
      out.push_back(m.column(c));
    }
    return out;
  }

}  // namespace shrinklab
