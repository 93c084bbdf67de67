#include "epslab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epslab/parallel.hpp"

namespace epslab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct DataNorms {
  double f_norm = 0.0;
  std::array<double, 2> interp{};
  std::array<double, 2> norm{};
  double rhs = 0.0;
};

DataNorms data_norms(const ProblemSpec& spec, std::size_t n_t) {
  const auto& pair = *spec.pair;
  const std::size_t n = pair.n();
  const double p = pair.p();
  DataNorms d;
  if (!spec.f.is_zero())
    d.f_norm = mixed_norm(GridFunction::sample(spec.T, n_t, n, [&](double t) { return spec.f(t, n); }),
                          pair.grid(), p);
  const double lam = std::abs(spec.lambda);
  const CVector* fk[2] = {&spec.bc.f1, &spec.bc.f2};
  const double theta[2] = {spec.bc.theta1, spec.bc.theta2};
  d.rhs = d.f_norm;
  for (int k = 0; k < 2; ++k) {
    d.norm[k] = pair.e_norm(*fk[k]);
    d.interp[k] = d.norm[k] > 0.0 ? kfunctional_norm(*fk[k], pair.A(), pair.grid(), theta[k], p) : 0.0;
    d.rhs += d.interp[k] + std::pow(lam, 1.0 - theta[k]) * d.norm[k];
  }
  return d;
}

GridFunction apply_rows(const ComplexMatrix& m, const GridFunction& u) {
  GridFunction out(u.T(), u.n_t(), u.n_y());
  for (std::size_t i = 0; i < u.n_t(); ++i) {
    const CVector v = m * u.row(i);
    std::copy(v.begin(), v.end(), out.row(i).begin());
  }
  return out;
}

// Slope and intercept of y = a + b x by least squares.
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = m * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) return {kNaN, kNaN};
  const double b = (m * sxy - sx * sy) / den;
  return {(sy - b * sx) / m, b};
}

double uniformity_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? *hi / *lo : (*hi > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
}

}  // namespace

EstimateReport coercive_report(const ProblemSpec& spec, const GridFunction& u) {
  const auto& pair = *spec.pair;
  const double p = pair.p(), eps = spec.eps, lam = std::abs(spec.lambda);
  EstimateReport r;
  r.eps = eps;
  r.lambda = spec.lambda;
  r.n_t = u.n_t();
  const double norms[3] = {mixed_norm(u, pair.grid(), p), mixed_norm(derivative_t(u), pair.grid(), p),
                           mixed_norm(second_derivative_t(u), pair.grid(), p)};
  r.au_norm = mixed_norm(apply_rows(pair.A(), u), pair.grid(), p);
  r.lhs_total = r.lhs_alt_total = r.lhs_half_total = r.au_norm;
  for (int j = 0; j < 3; ++j) {
    const double base = std::pow(lam, 1.0 - 0.5 * j) * norms[j];
    r.lhs_terms[j] = std::pow(eps, 0.5 * j) * base;
    r.lhs_alt_terms[j] = std::pow(eps, 0.5 * j - 1.0 / p) * base;
    r.lhs_half_terms[j] = std::pow(eps, 0.5 * j - 0.5 / p) * base;
    r.lhs_total += r.lhs_terms[j];
    r.lhs_alt_total += r.lhs_alt_terms[j];
    r.lhs_half_total += r.lhs_half_terms[j];
  }
  const DataNorms d = data_norms(spec, u.n_t());
  r.f_norm = d.f_norm;
  r.data_interp = d.interp;
  r.data_norm = d.norm;
  r.rhs = d.rhs;
  if (r.rhs > 0.0) {
    r.ratio = r.lhs_total / r.rhs;
    r.ratio_alt = r.lhs_alt_total / r.rhs;
    r.ratio_half = r.lhs_half_total / r.rhs;
  }
  return r;
}

SweepResult uniformity_sweep(const ProblemSpec& base, std::span<const double> eps_list,
                             std::span<const Complex> lambda_list, std::size_t jobs) {
  if (eps_list.empty() || lambda_list.empty()) throw InvalidArgument("uniformity_sweep: empty eps or lambda list");
  const std::size_t nl = lambda_list.size();
  SweepResult out;
  out.cells.resize(eps_list.size() * nl);
  parallel_for(out.cells.size(), jobs, [&](std::size_t idx) {
    ProblemSpec s = base;
    s.eps = eps_list[idx / nl];
    s.lambda = lambda_list[idx % nl];
    EstimateReport& cell = out.cells[idx];
    try {
      const auto sol = full_solve(s);
      cell = coercive_report(s, sol.u);
      cell.path = sol.path;
    } catch (const Error& e) {
      cell = EstimateReport{};
      cell.eps = s.eps;
      cell.lambda = s.lambda;
      cell.ok = false;
      cell.status = std::string(to_string(e.kind())) + ": " + e.what();
    }
  });
  for (std::size_t l = 0; l < nl; ++l) {
    SweepSummary sm;
    sm.lambda = lambda_list[l];
    std::vector<double> r, ra, rh;
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
      const auto& c = out.cells[e * nl + l];
      if (!c.ok) {
        ++sm.failed;
        continue;
      }
      r.push_back(c.ratio);
      ra.push_back(c.ratio_alt);
      rh.push_back(c.ratio_half);
      sm.max_ratio = std::max(sm.max_ratio, c.ratio);
    }
    sm.uniformity = uniformity_of(r);
    sm.uniformity_alt = uniformity_of(ra);
    sm.uniformity_half = uniformity_of(rh);
    out.max_ratio = std::max(out.max_ratio, sm.max_ratio);
    out.summary.push_back(sm);
  }
  return out;
}

EpsilonDerivativeReport epsilon_derivative_report(const ProblemSpec& spec, double delta) {
  spec.validate();
  if (!(delta > 0.0)) delta = 0.01 * spec.eps;
  delta = std::min({delta, spec.eps0 - spec.eps, 0.5 * spec.eps});
  if (!(delta > 0.0)) throw InvalidArgument("epsilon_derivative_report: eps must lie strictly below eps0");
  const auto& pair = *spec.pair;
  const double p = pair.p(), eps = spec.eps, lam = std::abs(spec.lambda);
  const auto d = epsilon_derivative(spec, delta);

  EpsilonDerivativeReport r;
  r.eps = eps;
  r.lambda = spec.lambda;
  r.delta = delta;
  r.d1_norm = mixed_norm(d.first, pair.grid(), p);
  r.d2_norm = mixed_norm(d.second, pair.grid(), p);
  r.weighted_d1 = std::pow(eps, 1.5 - 1.0 / p) * std::sqrt(lam) * r.d1_norm;
  r.weighted_d2 = std::pow(eps, 3.0 - 1.0 / p) * r.d2_norm;
  r.rhs = data_norms(spec, d.first.n_t()).rhs;
  r.ratio = r.rhs > 0.0 ? (r.weighted_d1 + r.weighted_d2) / r.rhs : 0.0;

  ProblemSpec mid = spec;
  mid.n_t = d.first.n_t();
  mid.layer_points = 0.0;
  r.scaled_u = std::pow(eps, 1.0 / p) * mixed_norm(full_solve(mid).u, pair.grid(), p);
  const int m[2] = {spec.bc.m1, spec.bc.m2};
  const CVector* fk[2] = {&spec.bc.f1, &spec.bc.f2};
  for (int k = 0; k < 2; ++k) {
    if (m[k] == 0) {
      r.data_decay += pair.e_norm(*fk[k]);
    } else {
      r.data_decay += pair.e_norm(mat_solve(sqrtm(pair.A_lambda(spec.lambda)), *fk[k]));
    }
  }
  return r;
}

DecayFit decay_fit(const ProblemSpec& spec, std::size_t points) {
  if (spec.lambda != Complex(0.0)) throw InvalidArgument("decay_fit: lambda must be 0");
  if (points < 3) throw InvalidArgument("decay_fit: need at least 3 points");
  const QSystem q = compute_q_system(spec);
  const auto mn = build_MN(spec, q);
  DecayFit fit;
  fit.layer_at_end = mn.layer_at_end();
  const double eps = spec.eps;
  fit.window_hi = std::min(10.0 * eps, 0.5 * spec.T);
  fit.window_lo = std::min(0.5 * eps, fit.window_hi / 20.0);
  std::vector<double> x, y;
  for (std::size_t k = 0; k < points; ++k) {
    const double s =
        fit.window_lo + (fit.window_hi - fit.window_lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    const double t = fit.layer_at_end ? spec.T - s : s;
    const double nm = spec.pair->op_norm_E(mn.M(t));
    fit.samples.emplace_back(s, nm);
    if (!(nm > 1e-300) || !std::isfinite(nm)) throw FitDegenerate("decay_fit: M vanishes numerically in the window");
    x.push_back(s / eps);
    y.push_back(std::log(nm));
  }
  const auto [a, b] = line_fit(x, y);
  if (!std::isfinite(b)) throw FitDegenerate("decay_fit: degenerate abscissae");
  fit.omega = -b;
  fit.C1 = std::exp(a);
  double ss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) ss += std::pow(y[k] - (a + b * x[k]), 2);
  fit.residual = std::sqrt(ss / static_cast<double>(x.size()));
  fit.omega_reference =
      spec.n() == 1 ? (fit.layer_at_end ? (eps * q.Q1(0, 0)).real() : (-eps * q.Q2(0, 0)).real()) : kNaN;
  return fit;
}

LayerNormSweep layer_norm_sweep(const ProblemSpec& base, std::span<const double> eps_list, double t) {
  LayerNormSweep out;
  out.t = t;
  for (double eps : eps_list) {
    ProblemSpec s = base;
    s.eps = eps;
    const auto mn = build_MN(s, compute_q_system(s));
    LayerNormRow row;
    row.eps = eps;
    row.m_norm = s.pair->op_norm_E(mn.M(t));
    row.n_norm = s.pair->op_norm_E(mn.N(t));
    out.n_max = std::max(out.n_max, row.n_norm);
    out.rows.push_back(row);
  }
  auto sorted = out.rows;
  std::sort(sorted.begin(), sorted.end(), [](const auto& l, const auto& r) { return l.eps > r.eps; });
  out.m_decreasing = sorted.size() >= 2 && sorted.back().m_norm < sorted.front().m_norm;
  for (std::size_t k = 1; k < sorted.size(); ++k)
    if (sorted[k].m_norm > sorted[k - 1].m_norm) out.m_decreasing = false;
  return out;
}

ConvergenceRecord convergence_study(const ProblemSpec& base, const CauchySpec& cauchy,
                                    std::span<const double> eps_list, double compact_delta, std::size_t jobs) {
  if (base.lambda != Complex(0.0) || cauchy.lambda != Complex(0.0))
    throw InvalidArgument("convergence_study: lambda must be 0");
  if (base.bc.alpha0 == Complex(0.0))
    throw InvalidArgument("convergence_study: alpha0 = 0 cannot carry the initial value");
  if (eps_list.empty()) throw InvalidArgument("convergence_study: empty eps list");
  for (std::size_t k = 1; k < eps_list.size(); ++k)
    if (!(eps_list[k] < eps_list[k - 1])) throw InvalidArgument("convergence_study: eps_list must strictly decrease");
  if (!(compact_delta > 0.0) || !(2.0 * compact_delta < base.T))
    throw InvalidArgument("convergence_study: compact window is empty");
  cauchy.validate();

  const auto& pair = *base.pair;
  const double p = pair.p(), T = base.T;
  ConvergenceRecord rec;
  rec.rows.resize(eps_list.size());
  parallel_for(eps_list.size(), jobs, [&](std::size_t k) {
    ConvergenceRow& row = rec.rows[k];
    row.eps = eps_list[k];
    try {
      ProblemSpec s = base;
      s.eps = eps_list[k];
      s.bc.f1 = cauchy.u0;
      for (auto& v : s.bc.f1) v *= base.bc.alpha0;
      s.bc.f2 = cauchy.u0;
      s.f = cauchy.f0;
      const GridFunction ue = full_solve(s).u;
      const std::size_t n_t = ue.n_t();
      CauchySpec c = cauchy;
      c.T = T;
      c.n_t = n_t;
      const GridFunction u0 = cauchy_solve(c);
      const GridFunction diff = ue - u0;
      row.n_t = n_t;
      row.x_gap = mixed_norm(diff, pair.grid(), p);
      row.sup_gap = sup_norm(diff, pair.grid(), compact_delta, T - compact_delta);

      ProblemSpec fine = s;
      fine.n_t = 2 * n_t - 1;
      fine.layer_points = 0.0;
      fine.n_x = 2 * s.n_x;
      CauchySpec cf = c;
      cf.n_t = 2 * n_t - 1;
      const GridFunction ee = full_solve(fine).u.restrict_to(n_t) - ue;
      const GridFunction ep = cauchy_solve(cf).restrict_to(n_t) - u0;
      row.floor = 4.0 / 3.0 * (mixed_norm(ee, pair.grid(), p) + mixed_norm(ep, pair.grid(), p));
      row.sup_floor = 4.0 / 3.0 * (sup_norm(ee, pair.grid(), compact_delta, T - compact_delta) +
                                   sup_norm(ep, pair.grid(), compact_delta, T - compact_delta));
      row.above_floor = row.x_gap > 3.0 * row.floor;
      row.sup_above_floor = row.sup_gap > 3.0 * row.sup_floor;
    } catch (const Error& e) {
      row.ok = false;
      row.status = std::string(to_string(e.kind())) + ": " + e.what();
    }
  });

  // Monotonicity and ratios over the leading run of rows above the floor.
  auto analyse = [&](auto gap, auto above, bool& monotone, double& ratio, double& rate) {
    std::size_t run = 0;
    while (run < rec.rows.size() && rec.rows[run].ok && above(rec.rows[run])) ++run;
    monotone = run >= 2;
    for (std::size_t k = 1; k < run; ++k)
      if (gap(rec.rows[k]) > 1.05 * gap(rec.rows[k - 1])) monotone = false;
    ratio = run >= 1 ? gap(rec.rows[0]) / gap(rec.rows[run - 1]) : kNaN;
    std::vector<double> lx, ly;
    for (const auto& r : rec.rows)
      if (r.ok && above(r) && gap(r) > 0.0) {
        lx.push_back(std::log(r.eps));
        ly.push_back(std::log(gap(r)));
      }
    rate = lx.size() >= 2 ? line_fit(lx, ly).second : kNaN;
  };
  analyse([](const ConvergenceRow& r) { return r.x_gap; }, [](const ConvergenceRow& r) { return r.above_floor; },
          rec.x_monotone, rec.x_gap_ratio, rec.fitted_rate);
  analyse([](const ConvergenceRow& r) { return r.sup_gap; },
          [](const ConvergenceRow& r) { return r.sup_above_floor; }, rec.sup_monotone, rec.sup_gap_ratio,
          rec.sup_fitted_rate);
  return rec;
}

}  // namespace epslab
