#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace bcpace {

using Vector = std::vector<double>;
using ComplexList = std::vector<std::complex<double>>;

// Dense row-major real matrix. Dimensions in this library never exceed 16,
// so everything is stored inline in one vector and copied freely.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> entries);
  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  Vector row(std::size_t r) const;
  Vector col(std::size_t c) const;
  Matrix transposed() const;

  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, std::span<const double> v);

// Vector helpers. Kept as named functions so they never collide with
// operators on std::vector found through other namespaces.
Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
Vector scaled(double s, std::span<const double> v);
/// a + s * b
Vector axpy(std::span<const double> a, double s, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);
Vector unit_vector(std::size_t n, std::size_t k);

/// Frobenius norm; used as the matrix scale for singularity thresholds.
double frobenius_norm(const Matrix& m);
bool all_finite(const Matrix& m);
bool all_finite(std::span<const double> v);

/// Solve M x = v by LU with partial pivoting. Throws singular_matrix when a
/// pivot drops below 1e-12 * ||M||.
Vector lu_solve(const Matrix& m, std::span<const double> v);
Matrix inverse(const Matrix& m);
double determinant(const Matrix& m);

/// Eigenvalues by balancing, Hessenberg reduction and Francis double-shift QR.
/// Complex pairs are returned adjacently, positive imaginary part first.
ComplexList eigenvalues(const Matrix& m);
double spectral_radius(const Matrix& m);

/// Real eigenvector basis V with V^-1 M V block diagonal (1x1 blocks for
/// real eigenvalues, 2x2 rotation-scaling blocks for complex pairs).
/// Empty when the basis is numerically singular (defective M).
std::optional<Matrix> real_eigenvector_basis(const Matrix& m);

/// Operator 2-norm, power iteration on M^T M.
double operator_norm(const Matrix& m);
/// ||S M S^-1||_2.
double s_norm(const Matrix& m, const Matrix& s);

}  // namespace bcpace
