#pragma once

// Exact dense linear algebra over the prime field F_p.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace shrinklab {

  using Residue  = std::uint32_t;
  using FpVector = std::vector<Residue>;

  namespace fp {
    inline Residue add(Residue a, Residue b, Residue p) noexcept {
      std::uint64_t s = std::uint64_t(a) + b;
      return static_cast<Residue>(s >= p ? s - p : s);
    }
    inline Residue sub(Residue a, Residue b, Residue p) noexcept {
      return a >= b ? a - b : static_cast<Residue>(std::uint64_t(a) + p - b);
    }
    inline Residue mul(Residue a, Residue b, Residue p) noexcept {
      return static_cast<Residue>((std::uint64_t(a) * b) % p);
    }
    inline Residue neg(Residue a, Residue p) noexcept {
      return a == 0 ? 0 : p - a;
    }
    Residue pow(Residue a, std::uint64_t e, Residue p) noexcept;
    // a must be nonzero mod p
    Residue inv(Residue a, Residue p);
    // reduce a signed integer into 0..p-1
    Residue reduce(std::int64_t a, Residue p) noexcept;
    bool is_prime(std::uint64_t n) noexcept;

    bool is_zero(FpVector const& v) noexcept;
    FpVector add(FpVector const& a, FpVector const& b, Residue p);
    FpVector scale(FpVector const& a, Residue c, Residue p);
    // a += c*b
    void axpy(FpVector& a, Residue c, FpVector const& b, Residue p);
  }  // namespace fp

  class FpMatrix {
   public:
    FpMatrix() = default;
    FpMatrix(Residue p, std::size_t rows, std::size_t cols)
        : _p(p), _rows(rows), _cols(cols), _data(rows * cols, 0) {}

    static FpMatrix identity(Residue p, std::size_t n);
    // columns given as vectors of equal length `rows`
    static FpMatrix from_columns(Residue                      p,
                                 std::size_t                  rows,
                                 std::vector<FpVector> const& cols);
    static FpMatrix from_rows(Residue                      p,
                              std::size_t                  cols,
                              std::vector<FpVector> const& rows);

    Residue p() const noexcept {
      return _p;
    }
    std::size_t rows() const noexcept {
      return _rows;
    }
    std::size_t cols() const noexcept {
      return _cols;
    }

    Residue operator()(std::size_t r, std::size_t c) const noexcept {
      return _data[r * _cols + c];
    }
    Residue& operator()(std::size_t r, std::size_t c) noexcept {
      return _data[r * _cols + c];
    }

    std::span<Residue const> row(std::size_t r) const noexcept {
      return {_data.data() + r * _cols, _cols};
    }
    std::span<Residue> row(std::size_t r) noexcept {
      return {_data.data() + r * _cols, _cols};
    }
    FpVector column(std::size_t c) const;

    FpMatrix operator*(FpMatrix const& that) const;
    FpMatrix operator+(FpMatrix const& that) const;
    FpMatrix operator-(FpMatrix const& that) const;
    FpVector apply(FpVector const& v) const;
    FpMatrix transpose() const;
    FpMatrix kron(FpMatrix const& that) const;
    FpMatrix scaled(Residue c) const;

    bool is_zero() const noexcept;
    bool operator==(FpMatrix const&) const = default;

    // selects the given rows / columns, in the given order
    FpMatrix select_rows(std::vector<std::size_t> const& idx) const;
    FpMatrix select_cols(std::vector<std::size_t> const& idx) const;
    FpMatrix hstack(FpMatrix const& that) const;
    FpMatrix vstack(FpMatrix const& that) const;

   private:
    Residue              _p    = 2;
    std::size_t          _rows = 0;
    std::size_t          _cols = 0;
    std::vector<Residue> _data;
  };

  struct RowEchelon {
    std::size_t              rank = 0;
    std::vector<std::size_t> pivots;
    FpMatrix                 reduced;
  };

  //! Reduced row echelon form.
  RowEchelon rref(FpMatrix m);
  std::size_t rank(FpMatrix const& m);

  //! Basis of the null space {x : m x = 0}, in the order of the free columns.
  std::vector<FpVector> kernel(FpMatrix const& m);

  //! Any solution of m x = v, or nullopt.
  std::optional<FpVector> solve(FpMatrix const& m, FpVector const& v);

  //! Inverse of a square matrix; throws DimensionMismatch if singular.
  FpMatrix inverse(FpMatrix const& m);

  //! For k of full column rank, a matrix l with l * k = identity.
  FpMatrix left_inverse(FpMatrix const& k);

  //! Right inverse of a surjective matrix: s with m * s = identity.
  FpMatrix right_inverse(FpMatrix const& m);

  //! Basis of the column space, as a list of columns of m (pivot columns).
  std::vector<FpVector> column_basis(FpMatrix const& m);

}  // namespace shrinklab
