#pragma once

#include <memory>

#include "epslab/discretize.hpp"
#include "epslab/elliptic.hpp"
#include "epslab/grid_function.hpp"

namespace epslab {

/// B u' + (A + lambda) u = f0, u(0) = u0.
struct CauchySpec {
  std::shared_ptr<const OperatorPair> pair;
  CVector u0;
  Forcing f0;
  double T = 1.0;
  std::size_t n_t = 400;
  Complex lambda;

  void validate() const;
};

/// Exact propagator e^{-h G}, G = B^{-1} A_lambda, with the source integral
/// over each step taken at its midpoint.
GridFunction cauchy_solve(const CauchySpec& spec);

struct PropagatorSample {
  double t = 0.0;
  double left = 0.0;   ///< ||exp(-t B^{-1} A_lambda)||
  double right = 0.0;  ///< ||exp(-t A_lambda B^{-1})||
};

std::vector<PropagatorSample> compare_propagators(const OperatorPair& pair, Complex lambda,
                                                  std::span<const double> t_samples);

/// u(t) = M(t) f_layer + N(t) f_other for f = 0. M carries the data of the
/// end where the boundary layer sits: t = T when Re tr B > 0 (the fast mode
/// e^{-(T-t) Q1} lives there), t = 0 otherwise.
class BoundaryPropagators {
 public:
  BoundaryPropagators(const ProblemSpec& spec, const QSystem& q);

  bool layer_at_end() const noexcept { return layer_at_end_; }
  /// Distance from t to the layer end.
  double layer_distance(double t) const noexcept { return layer_at_end_ ? T_ - t : t; }
  ComplexMatrix M(double t) const;
  ComplexMatrix N(double t) const;
  /// Response to (f1, f2) at t; used to cross-check against homogeneous_solution.
  CVector apply(double t, std::span<const Complex> f1, std::span<const Complex> f2) const;

 private:
  ComplexMatrix response(double t, bool first) const;

  double T_;
  std::size_t n_;
  ComplexMatrix Q1_, Q2_;
  ComplexMatrix inv_;  // inverse of the 2n x 2n boundary system
  bool layer_at_end_;
};

BoundaryPropagators build_MN(const ProblemSpec& spec, const QSystem& q);

}  // namespace epslab
