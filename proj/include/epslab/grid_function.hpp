#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "epslab/linalg.hpp"

namespace epslab {

/// Samples u(t_i, y_j) on the uniform grid t_i = i*T/(n_t-1), stored
/// row-major: row i is the E-vector u(t_i).
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(double T, std::size_t n_t, std::size_t n_y);

  double T() const noexcept { return T_; }
  std::size_t n_t() const noexcept { return n_t_; }
  std::size_t n_y() const noexcept { return n_y_; }
  double dt() const noexcept { return T_ / static_cast<double>(n_t_ - 1); }
  double t(std::size_t i) const noexcept { return static_cast<double>(i) * dt(); }

  std::span<Complex> row(std::size_t i) { return {values_.data() + i * n_y_, n_y_}; }
  std::span<const Complex> row(std::size_t i) const { return {values_.data() + i * n_y_, n_y_}; }
  CVector row_copy(std::size_t i) const { return {row(i).begin(), row(i).end()}; }
  Complex& operator()(std::size_t i, std::size_t j) { return values_[i * n_y_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return values_[i * n_y_ + j]; }
  const std::vector<Complex>& values() const noexcept { return values_; }

  bool all_finite() const;
  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(Complex s);

  /// Sample f(t) at every node.
  static GridFunction sample(double T, std::size_t n_t, std::size_t n_y, const std::function<CVector(double)>& f);

  /// Keep every k-th node (k = (n_t-1)/(coarse n_t-1)).
  GridFunction restrict_to(std::size_t coarse_n_t) const;

 private:
  double T_ = 0.0;
  std::size_t n_t_ = 0;
  std::size_t n_y_ = 0;
  std::vector<Complex> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);

/// First and second t-derivatives by O(h^2) differences: centered inside,
/// one-sided (3- and 4-point) at the ends.
GridFunction derivative_t(const GridFunction& u);
GridFunction second_derivative_t(const GridFunction& u);

/// Right-hand side f(t, .) in E. Either identically zero or a callable.
class Forcing {
 public:
  Forcing() = default;
  explicit Forcing(std::function<CVector(double)> f) : f_(std::move(f)) {}
  static Forcing zero() { return {}; }
  /// Piecewise-linear interpolation of a sampled function in t.
  static Forcing from_grid(GridFunction g);

  bool is_zero() const noexcept { return !f_; }
  CVector operator()(double t, std::size_t n) const { return f_ ? f_(t) : CVector(n); }
  Forcing scaled(Complex s) const;
  Forcing plus(const Forcing& o) const;

 private:
  std::function<CVector(double)> f_;
};

}  // namespace epslab
