#pragma once

#include <array>
#include <string>
#include <vector>

#include "epslab/elliptic.hpp"
#include "epslab/parabolic.hpp"

namespace epslab {

/// Terms of the coercive estimate for one (eps, lambda). Three weightings of
/// the derivative terms are kept: eps^{j/2}, eps^{j/2-1/p} and
/// eps^{j/2-1/(2p)}, each times |lambda|^{1-j/2} ||u^{(j)}||_X.
struct EstimateReport {
  double eps = 0.0;
  Complex lambda;
  std::array<double, 3> lhs_terms{};
  std::array<double, 3> lhs_alt_terms{};
  std::array<double, 3> lhs_half_terms{};
  double au_norm = 0.0;
  double lhs_total = 0.0;
  double lhs_alt_total = 0.0;
  double lhs_half_total = 0.0;
  double f_norm = 0.0;
  std::array<double, 2> data_interp{};  ///< ||f_k||_{E_k}
  std::array<double, 2> data_norm{};    ///< ||f_k||_E
  double rhs = 0.0;
  double ratio = 0.0;
  double ratio_alt = 0.0;
  double ratio_half = 0.0;
  std::size_t n_t = 0;
  SolvePath path = SolvePath::Semigroup;
  bool ok = true;
  std::string status = "ok";
};

EstimateReport coercive_report(const ProblemSpec& spec, const GridFunction& u);

struct SweepSummary {
  Complex lambda;
  double max_ratio = 0.0;
  double uniformity = 0.0;  ///< max/min of ratio over eps
  double uniformity_alt = 0.0;
  double uniformity_half = 0.0;
  std::size_t failed = 0;
};

struct SweepResult {
  std::vector<EstimateReport> cells;  ///< eps-major, lambda-minor
  std::vector<SweepSummary> summary;  ///< one per lambda
  double max_ratio = 0.0;
};

/// One full_solve and report per (eps, lambda); failures are kept per cell.
SweepResult uniformity_sweep(const ProblemSpec& base, std::span<const double> eps_list,
                             std::span<const Complex> lambda_list, std::size_t jobs = 1);

struct EpsilonDerivativeReport {
  double eps = 0.0;
  Complex lambda;
  double delta = 0.0;
  double d1_norm = 0.0;  ///< ||du/deps||_X
  double d2_norm = 0.0;  ///< ||d^2u/deps^2||_X
  double weighted_d1 = 0.0;  ///< eps^{3/2-1/p} |lambda|^{1/2} ||du/deps||_X
  double weighted_d2 = 0.0;  ///< eps^{3-1/p} ||d^2u/deps^2||_X
  double rhs = 0.0;
  double ratio = 0.0;
  double scaled_u = 0.0;    ///< eps^{1/p} ||u||_X
  double data_decay = 0.0;  ///< sum_k ||A_lambda^{-m_k/2} f_k||_E
};

/// delta <= 0 picks 1% of eps (shrunk to stay inside (0, eps0]).
EpsilonDerivativeReport epsilon_derivative_report(const ProblemSpec& spec, double delta = 0.0);

struct DecayFit {
  double omega = 0.0;  ///< decay rate per unit (distance to the layer end)/eps
  double C1 = 0.0;
  double residual = 0.0;  ///< RMS of the log residual
  double window_lo = 0.0;
  double window_hi = 0.0;
  double omega_reference = 0.0;  ///< scalar closed form, NaN for n > 1
  bool layer_at_end = false;
  std::vector<std::pair<double, double>> samples;  ///< (distance, ||M||)
};

/// Least-squares fit of log ||M|| against distance/eps over
/// [min(eps/2, hi/20), min(10 eps, T/2)]; lambda must be 0.
DecayFit decay_fit(const ProblemSpec& spec, std::size_t points = 40);

struct LayerNormRow {
  double eps = 0.0;
  double m_norm = 0.0;  ///< ||M(t, eps)||
  double n_norm = 0.0;  ///< ||N(t, eps)||
};

struct LayerNormSweep {
  double t = 0.0;
  std::vector<LayerNormRow> rows;
  bool m_decreasing = false;
  double n_max = 0.0;
};

LayerNormSweep layer_norm_sweep(const ProblemSpec& base, std::span<const double> eps_list, double t);

struct ConvergenceRow {
  double eps = 0.0;
  double x_gap = 0.0;
  double sup_gap = 0.0;
  double floor = 0.0;
  double sup_floor = 0.0;
  bool above_floor = false;
  bool sup_above_floor = false;
  std::size_t n_t = 0;
  bool ok = true;
  std::string status = "ok";
};

struct ConvergenceRecord {
  std::vector<ConvergenceRow> rows;  ///< eps strictly decreasing
  double fitted_rate = 0.0;
  double sup_fitted_rate = 0.0;
  bool x_monotone = false;
  bool sup_monotone = false;
  double x_gap_ratio = 0.0;    ///< largest-eps gap / smallest above-floor gap
  double sup_gap_ratio = 0.0;
};

/// Data wiring: f1 := alpha0 u0 (so u(0) -> u0), f2 := u0, f := f0, and
/// lambda = 0 on both sides. The floor is the grid-halving error estimate of
/// both solutions.
ConvergenceRecord convergence_study(const ProblemSpec& base, const CauchySpec& cauchy,
                                    std::span<const double> eps_list, double compact_delta, std::size_t jobs = 1);

}  // namespace epslab
