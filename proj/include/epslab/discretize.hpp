#pragma once

#include <string>
#include <vector>

#include "epslab/exprparse.hpp"
#include "epslab/grid_function.hpp"
#include "epslab/linalg.hpp"

namespace epslab {

/// Interior nodes y_j = j*h, h = 1/(n_y+1), of (0,1). The weights are the
/// trapezoid rule with the missing end values copied from the nearest
/// interior node: h*(3/2, 1, ..., 1, 3/2), second order and summing to 1.
/// A single node (n_y = 1) carries weight 1.
struct SpaceGrid {
  std::size_t n_y = 0;
  double h = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  static SpaceGrid uniform(std::size_t n_y);
  double e_norm(std::span<const Complex> v) const;
  double e_norm_sq(std::span<const Complex> v) const;
};

struct PositivityOptions {
  double phi = 1.5707963267948966;
  int min_decade = -3;
  int max_decade = 4;
  bool include_zero = true;
  double cap = 100.0;
  bool waived = false;
};

/// A and B realized on a space grid, plus the t-norm exponent p.
class OperatorPair {
 public:
  OperatorPair(ComplexMatrix a, ComplexMatrix b, SpaceGrid grid, double p, std::string preset,
               const PositivityOptions& positivity = {});

  const ComplexMatrix& A() const noexcept { return a_; }
  const ComplexMatrix& B() const noexcept { return b_; }
  const SpaceGrid& grid() const noexcept { return grid_; }
  double p() const noexcept { return p_; }
  std::size_t n() const noexcept { return a_.rows(); }
  const std::string& preset() const noexcept { return preset_; }
  const SectorialityReport& positivity() const noexcept { return positivity_; }
  bool positivity_waived() const noexcept { return waived_; }

  ComplexMatrix A_lambda(Complex lambda) const;
  double e_norm(std::span<const Complex> v) const { return grid_.e_norm(v); }
  /// W^{1/2} M W^{-1/2}: the matrix whose spectral norm is the operator
  /// norm of M on the weighted space E.
  ComplexMatrix to_euclidean(const ComplexMatrix& m) const;
  double op_norm_E(const ComplexMatrix& m) const;
  double commutator_norm() const;
  bool commutes(double rel_tol = 1e-10) const;
  SectorialityReport check_positivity(const PositivityOptions& opts) const;

 private:
  ComplexMatrix a_, b_;
  SpaceGrid grid_;
  double p_;
  std::string preset_;
  SectorialityReport positivity_;
  bool waived_ = false;
};

/// Boundary operators L1 u = a0 u(0) + eps^{1/2} a1 u'(0),
/// L2 u = b0 u(T) + eps^{1/2} b1 u'(T), with data f1, f2.
struct BoundaryData {
  int m1 = 0;
  int m2 = 0;
  Complex alpha0, alpha1, beta0, beta1;
  CVector f1, f2;
  double theta1 = 0.0;
  double theta2 = 0.0;
  Complex d;

  /// Validates orders, leading coefficients and d != 0.
  static BoundaryData make(int m1, int m2, Complex alpha0, Complex alpha1, Complex beta0, Complex beta1, CVector f1,
                           CVector f2, double p);
  Complex recompute_d() const { return alpha0 * beta1 - beta0 * alpha1; }
  BoundaryData with_data(CVector g1, CVector g2) const;
};

ComplexMatrix build_wentzell_operator(const expr::Expr& a, const expr::Expr& b, const SpaceGrid& grid);
ComplexMatrix build_integral_operator(const expr::Expr& k, const SpaceGrid& grid);
/// A = diag(d(y_j)), B = sum_k c_k A^k.
std::pair<ComplexMatrix, ComplexMatrix> build_commuting_operators(const expr::Expr& diag, std::span<const double> b_coeffs,
                                                                  const SpaceGrid& grid);

struct Condition21Report {
  double lhs = 0.0;
  double rhs = 0.0;
  bool norm_passed = false;
  Complex d;
  bool d_nonzero = false;
  bool a_plus_b_nonsingular = false;
  std::vector<std::pair<double, double>> samples;  // (t, ||A(A+t)^{-1}||)
  bool passed = false;
  std::string details() const;
};

Condition21Report check_condition_2_1(const OperatorPair& pair, std::span<const double> t_samples,
                                      const BoundaryData* bc = nullptr);

struct Condition1Report {
  Complex d1;
  bool passed = false;
  std::string details() const;
};

/// Local boundary conditions embedded as nonlocal ones with the cross terms
/// set to zero; the sum term then vanishes and d1 = (-1)^{m1} a_{m1} b_{m2}.
Condition1Report check_condition_1(const BoundaryData& bc);

struct Condition41Report {
  double min_a = 0.0;
  bool a_positive = false;
  bool coefficients_finite = false;
  bool kernel_finite = false;
  double integrability = 0.0;  // quadrature of exp(-int_0^y b/a)
  bool passed = false;
  std::string details() const;
};

Condition41Report check_condition_4_1(const expr::Expr& a, const expr::Expr& b, const expr::Expr& k,
                                      const SpaceGrid& grid);

/// log-spaced t-grid for the K-functional.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Norm of f in (E(A), E)_{theta,p} by the discrete K-method, with
/// K(t,f) = inf_g (||f-g||_{E(A)} + t||g||_E).
double kfunctional_norm(std::span<const Complex> f, const ComplexMatrix& a, const SpaceGrid& grid, double theta,
                        double p, std::span<const double> t_grid);
double kfunctional_norm(std::span<const Complex> f, const ComplexMatrix& a, const SpaceGrid& grid, double theta,
                        double p);
/// K(t,f) on the given t values.
std::vector<double> kfunctional_values(std::span<const Complex> f, const ComplexMatrix& a, const SpaceGrid& grid,
                                       double p, std::span<const double> t_grid);

/// (sum_i w_i ||u(t_i)||_E^p)^{1/p} with trapezoid weights w_i in t.
double mixed_norm(const GridFunction& u, const SpaceGrid& grid, double p);
/// Same restricted to nodes with t in [t0, t1] (sup form when p is infinite).
double sup_norm(const GridFunction& u, const SpaceGrid& grid, double t0, double t1);

}  // namespace epslab
