#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "epslab/errors.hpp"

namespace epslab {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Dense row-major complex matrix. Operators on E are square; rectangular
/// shapes only appear as multi-column right-hand sides and coupling blocks.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n) : ComplexMatrix(n, n) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, Complex fill = {});

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const Complex> d);
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<Complex> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const Complex> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Complex* data() noexcept { return data_.data(); }
  const Complex* data() const noexcept { return data_.data(); }

  CVector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const Complex> v);
  void set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b);
  ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;

  ComplexMatrix adjoint() const;
  Complex trace() const;
  double norm_1() const;
  double norm_inf() const;
  double norm_fro() const;
  double max_abs() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(Complex s);
  /// this += s * I
  ComplexMatrix& add_identity(Complex s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(ComplexMatrix a, Complex s);
CVector operator*(const ComplexMatrix& a, std::span<const Complex> x);
inline CVector operator*(const ComplexMatrix& a, const CVector& x) {
  return a * std::span<const Complex>(x);
}

double norm2(std::span<const Complex> v);
/// y += a * x
void axpy(Complex a, std::span<const Complex> x, std::span<Complex> y);

/// LU with partial pivoting. Throws SingularMatrix when a pivot falls below
/// pivot_tol * ||M||_inf.
class LuFactorization {
 public:
  explicit LuFactorization(ComplexMatrix m, double pivot_tol = 1e-13);

  std::size_t size() const noexcept { return lu_.rows(); }
  CVector solve(std::span<const Complex> b) const;
  ComplexMatrix solve(const ComplexMatrix& b) const;
  ComplexMatrix inverse() const;
  double min_pivot() const noexcept { return min_pivot_; }
  double log_abs_det() const;

 private:
  ComplexMatrix lu_;
  std::vector<std::size_t> perm_;
  double min_pivot_ = 0.0;
};

ComplexMatrix mat_solve(const ComplexMatrix& m, const ComplexMatrix& rhs);
CVector mat_solve(const ComplexMatrix& m, std::span<const Complex> rhs);
ComplexMatrix inverse(const ComplexMatrix& m);

struct SqrtmOptions {
  int max_iterations = 100;
  double residual_tol = 1e-11;
};

/// Principal square root by Denman-Beavers with determinantal scaling.
ComplexMatrix sqrtm(const ComplexMatrix& m, const SqrtmOptions& opts = {});

struct ExpmOptions {
  double norm_cap = 1e8;
};

/// Matrix exponential by Pade scaling and squaring (orders 3..13).
ComplexMatrix expm(const ComplexMatrix& m, const ExpmOptions& opts = {});

struct OpNormOptions {
  double rel_tol = 1e-10;
  int max_iterations = 2000;
};

/// Spectral norm (largest singular value) by power iteration on M^* M.
double op_norm(const ComplexMatrix& m, const OpNormOptions& opts = {});

struct PositivitySample {
  Complex lambda;
  double value = 0.0;  ///< (1+|lambda|) ||(A+lambda)^{-1}||
};

struct SectorialityReport {
  double phi = 0.0;
  double bound_M = 0.0;
  double cap = 0.0;
  bool passed = false;
  std::vector<PositivitySample> samples;
};

/// Sampled check of (1+|lambda|)||(A+lambda)^{-1}|| <= M on the sector
/// |arg lambda| <= phi. Every sample must lie in the sector.
SectorialityReport check_positivity(const ComplexMatrix& a, double phi,
                                    std::span<const Complex> lambda_samples, double cap = 100.0);

/// Default sample set: rays at angles {0, +-phi/2, +-phi} with moduli
/// 10^k for k in [kmin, kmax], plus lambda = 0 when include_zero.
std::vector<Complex> sector_samples(double phi, int kmin, int kmax, bool include_zero);

/// Block tridiagonal solve with variable block sizes. lower[i] couples block
/// i to block i-1 (lower[0] unused), upper[i] couples i to i+1.
std::vector<CVector> solve_block_tridiagonal(const std::vector<ComplexMatrix>& lower,
                                             const std::vector<ComplexMatrix>& diag,
                                             const std::vector<ComplexMatrix>& upper,
                                             const std::vector<CVector>& rhs);

}  // namespace epslab
