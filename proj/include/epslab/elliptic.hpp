#pragma once

#include <memory>
#include <string>

#include "epslab/discretize.hpp"
#include "epslab/exprparse.hpp"
#include "epslab/grid_function.hpp"
#include "epslab/linalg.hpp"

namespace epslab {

/// -eps u'' + B u' + (A + lambda) u = f on (0,T) with L1 u = f1, L2 u = f2.
struct ProblemSpec {
  std::shared_ptr<const OperatorPair> pair;
  double eps = 1.0;
  double eps0 = 1.0;
  Complex lambda;
  double T = 1.0;
  BoundaryData bc;
  Forcing f;
  std::size_t n_t = 400;
  /// Whole-line grid for the u1 part of full_solve; L = 0 means 8 T.
  std::size_t n_x = 1024;
  double L = 0.0;
  /// When positive, n_t is raised so the fastest mode e^{-|Q1| t} gets this
  /// many nodes per unit decay length (capped at max_n_t).
  double layer_points = 0.0;
  std::size_t max_n_t = 200000;

  void validate() const;
  std::size_t n() const { return pair->n(); }
  double line_half_width() const { return L > 0.0 ? L : 8.0 * T; }
};

/// Samples f(t, y_j) at the space nodes.
Forcing forcing_from_expr(const expr::Expr& f, const SpaceGrid& grid);

struct QSystem {
  ComplexMatrix Q1, Q2, Qlam;
  ComplexMatrix Dinv;
  /// u(t) = e^{t Q2} a + e^{-(T-t) Q1} b; g1 = a and g2 = e^{-T Q1} b.
  CVector a, b;
  CVector g1, g2;
  double min_pivot = 0.0;
};

QSystem compute_q_system(const ProblemSpec& spec);

/// Fills a, b, g1, g2 from the boundary rows; the second form takes the data
/// explicitly instead of spec.bc.f1, spec.bc.f2.
QSystem solve_boundary_system(const ProblemSpec& spec, QSystem q);
QSystem solve_boundary_system(const ProblemSpec& spec, QSystem q, std::span<const Complex> f1,
                              std::span<const Complex> f2);

/// Grid size actually used for spec (after the boundary-layer refinement).
std::size_t effective_n_t(const ProblemSpec& spec, const QSystem& q);
std::size_t effective_n_t(const ProblemSpec& spec);

GridFunction homogeneous_solution(const ProblemSpec& spec, const QSystem& q, std::size_t n_t);
GridFunction homogeneous_solution(const ProblemSpec& spec, const QSystem& q);

/// Finite differences in t: second order inside, one-sided second order in
/// the boundary rows; one block-tridiagonal solve.
GridFunction direct_solve(const ProblemSpec& spec);

enum class SolvePath { Semigroup, Direct };
std::string to_string(SolvePath p);

struct FullSolveResult {
  GridFunction u;
  SolvePath path = SolvePath::Semigroup;
  double alias_fraction = 0.0;
  bool alias_warning = false;
};

/// u = u1 + u2: u1 restricted from the whole-line solve of the zero
/// extension of f, u2 homogeneous with data f_k - L_k u1. Pairs that do not
/// commute go through direct_solve.
FullSolveResult full_solve(const ProblemSpec& spec);

/// Boundary operators applied to a sampled solution (one-sided differences).
std::pair<CVector, CVector> apply_boundary_operators(const ProblemSpec& spec, const GridFunction& u);

struct EpsilonDerivative {
  GridFunction first;
  GridFunction second;
};

/// Central differences of full_solve in eps with step delta, all three
/// solves on the same t-grid.
EpsilonDerivative epsilon_derivative(const ProblemSpec& spec, double delta);

}  // namespace epslab
