#pragma once

#include <string>
#include <vector>

#include "epslab/discretize.hpp"
#include "epslab/grid_function.hpp"
#include "epslab/linalg.hpp"

namespace epslab {

/// Uniform samples x_k = -L + k dx, k < n_x, of the periodic box [-L, L).
/// Frequencies follow FFT order: xi_k = 2 pi k/(n_x dx) for k <= n_x/2,
/// negative above.
struct LineGrid {
  std::size_t n_x = 0;
  double L = 0.0;
  double dx = 0.0;

  static LineGrid make(std::size_t n_x, double L);
  double x(std::size_t k) const noexcept { return -L + static_cast<double>(k) * dx; }
  double xi(std::size_t k) const noexcept;
  std::vector<double> frequencies() const;
};

/// Forward transform under the convention (F f)(xi) = int e^{i xi x} f(x) dx
/// (so F(f') = -i xi F f), on the box; `inverse` undoes it.
void line_fft(std::vector<Complex>& data, bool inverse);

/// Solution of -eps u'' + B u' + (A + lambda) u = fbar on the line, stored
/// as n_x samples of E-vectors (row-major n_x x n).
struct LineSolution {
  LineGrid grid;
  std::size_t n = 0;
  std::vector<Complex> u;
  std::vector<Complex> du;
  std::vector<Complex> u_hat;
  double alias_fraction = 0.0;
  bool alias_warning = false;

  std::span<const Complex> at(std::size_t k) const { return {u.data() + k * n, n}; }
  /// Cubic Hermite interpolation from the samples and spectral derivatives.
  CVector value(double x) const;
  /// Trigonometric interpolant evaluated directly (O(n_x n) per point).
  CVector value_exact(double x) const;
  CVector derivative_exact(double x) const;
};

/// Samples f on [0,T] extended by zero; the two jump nodes take the midpoint
/// value f/2.
std::vector<Complex> sample_zero_extension(const LineGrid& grid, const Forcing& f, double T, std::size_t n);

LineSolution whole_line_solve(const LineGrid& grid, const std::vector<Complex>& fbar, double eps, Complex lambda,
                              const OperatorPair& pair);

/// Phi(lambda, eps, xi) = (A - i xi B + eps xi^2 + lambda)^{-1}.
ComplexMatrix multiplier_symbol(const OperatorPair& pair, double eps, Complex lambda, double xi);

struct MultiplierCell {
  double eps = 0.0;
  Complex lambda;
  double phi_bound = 0.0;    ///< sup (1+|eps xi^2 + lambda|) ||Phi||
  double aphi_bound = 0.0;   ///< sup ||A Phi||
  double sigma_bound = 0.0;  ///< sup ||sum_j eps^{j/2}|lambda|^{1-j/2} xi^j Phi||
  bool ok = true;
  std::string error;
};

struct MultiplierTable {
  std::vector<MultiplierCell> cells;  ///< eps-major, lambda-minor
  /// max/min of phi_bound over eps at each lambda (index into lambda_list).
  std::vector<double> phi_uniformity;
};

/// 0 plus +-10^k for k on a uniform grid in [lo_decade, hi_decade].
std::vector<double> default_xi_grid(double lo_decade = -3.0, double hi_decade = 5.0, std::size_t per_side = 161);

MultiplierTable multiplier_bound_scan(std::span<const double> eps_list, std::span<const Complex> lambda_list,
                                      const OperatorPair& pair, std::span<const double> xi_grid);

}  // namespace epslab
