#include "epslab/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace epslab {

using expr::Bindings;
using expr::Var;

// ---------------------------------------------------------------- SpaceGrid

SpaceGrid SpaceGrid::uniform(std::size_t n_y) {
  if (n_y == 0) throw InvalidArgument("SpaceGrid: n_y must be positive");
  SpaceGrid g;
  g.n_y = n_y;
  g.h = 1.0 / static_cast<double>(n_y + 1);
  g.nodes.resize(n_y);
  g.weights.assign(n_y, g.h);
  for (std::size_t j = 0; j < n_y; ++j) g.nodes[j] = static_cast<double>(j + 1) * g.h;
  if (n_y == 1) {
    g.weights[0] = 1.0;
  } else {
    g.weights.front() = 1.5 * g.h;
    g.weights.back() = 1.5 * g.h;
  }
  return g;
}

double SpaceGrid::e_norm_sq(std::span<const Complex> v) const {
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) s += weights[j] * std::norm(v[j]);
  return s;
}

double SpaceGrid::e_norm(std::span<const Complex> v) const { return std::sqrt(e_norm_sq(v)); }

// ---------------------------------------------------------------- OperatorPair

OperatorPair::OperatorPair(ComplexMatrix a, ComplexMatrix b, SpaceGrid grid, double p, std::string preset,
                           const PositivityOptions& positivity)
    : a_(std::move(a)), b_(std::move(b)), grid_(std::move(grid)), p_(p), preset_(std::move(preset)) {
  if (!a_.is_square() || !b_.is_square() || a_.rows() != b_.rows() || a_.rows() != grid_.n_y)
    throw InvalidArgument("OperatorPair: A, B and grid dimensions disagree");
  if (!(p_ > 1.0)) throw InvalidArgument("OperatorPair: p must exceed 1");
  if (!a_.all_finite() || !b_.all_finite()) throw InvalidArgument("OperatorPair: non-finite operator entries");
  waived_ = positivity.waived;
  positivity_ = check_positivity(positivity);
  if (!waived_ && !positivity_.passed) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "OperatorPair: positivity check failed (bound %.3e above cap %.3e)",
                  positivity_.bound_M, positivity_.cap);
    throw InvalidArgument(buf);
  }
}

ComplexMatrix OperatorPair::A_lambda(Complex lambda) const {
  ComplexMatrix m = a_;
  m.add_identity(lambda);
  return m;
}

ComplexMatrix OperatorPair::to_euclidean(const ComplexMatrix& m) const {
  ComplexMatrix s = m;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j) s(i, j) *= std::sqrt(grid_.weights[i] / grid_.weights[j]);
  return s;
}

double OperatorPair::op_norm_E(const ComplexMatrix& m) const { return op_norm(to_euclidean(m)); }

double OperatorPair::commutator_norm() const { return (a_ * b_ - b_ * a_).norm_fro(); }

bool OperatorPair::commutes(double rel_tol) const {
  const double scale = a_.norm_fro() * b_.norm_fro();
  return commutator_norm() <= rel_tol * std::max(scale, 1e-300);
}

SectorialityReport OperatorPair::check_positivity(const PositivityOptions& opts) const {
  const auto samples = sector_samples(opts.phi, opts.min_decade, opts.max_decade, opts.include_zero);
  return epslab::check_positivity(to_euclidean(a_), opts.phi, samples, opts.cap);
}

// ---------------------------------------------------------------- BoundaryData

BoundaryData BoundaryData::make(int m1, int m2, Complex alpha0, Complex alpha1, Complex beta0, Complex beta1,
                                CVector f1, CVector f2, double p) {
  if ((m1 != 0 && m1 != 1) || (m2 != 0 && m2 != 1)) throw InvalidArgument("BoundaryData: orders must be 0 or 1");
  if (m1 == 0 && alpha1 != Complex(0.0)) throw InvalidArgument("BoundaryData: alpha1 must vanish when m1 = 0");
  if (m2 == 0 && beta1 != Complex(0.0)) throw InvalidArgument("BoundaryData: beta1 must vanish when m2 = 0");
  if ((m1 == 0 ? alpha0 : alpha1) == Complex(0.0)) throw InvalidArgument("BoundaryData: leading alpha is zero");
  if ((m2 == 0 ? beta0 : beta1) == Complex(0.0)) throw InvalidArgument("BoundaryData: leading beta is zero");
  if (f1.size() != f2.size()) throw InvalidArgument("BoundaryData: f1 and f2 sizes differ");
  if (!(p > 1.0)) throw InvalidArgument("BoundaryData: p must exceed 1");
  BoundaryData bc;
  bc.m1 = m1;
  bc.m2 = m2;
  bc.alpha0 = alpha0;
  bc.alpha1 = alpha1;
  bc.beta0 = beta0;
  bc.beta1 = beta1;
  bc.f1 = std::move(f1);
  bc.f2 = std::move(f2);
  bc.theta1 = 0.5 * m1 + 0.5 / p;
  bc.theta2 = 0.5 * m2 + 0.5 / p;
  bc.d = bc.recompute_d();
  if (bc.d == Complex(0.0)) throw InvalidArgument("BoundaryData: d = alpha0*beta1 - beta0*alpha1 vanishes");
  return bc;
}

BoundaryData BoundaryData::with_data(CVector g1, CVector g2) const {
  BoundaryData bc = *this;
  bc.f1 = std::move(g1);
  bc.f2 = std::move(g2);
  return bc;
}

// ---------------------------------------------------------------- operators

ComplexMatrix build_wentzell_operator(const expr::Expr& a, const expr::Expr& b, const SpaceGrid& grid) {
  const std::size_t n = grid.n_y;
  if (n < 3) throw InvalidArgument("build_wentzell_operator: need n_y >= 3");
  const double h = grid.h, h2 = h * h;
  auto a_at = [&](double y, std::size_t node) {
    const double v = a.eval(Bindings{}.set(Var::y, y));
    if (!(v > 0.0)) throw NonPositiveCoefficient(node, y, v);
    return v;
  };
  auto b_at = [&](double y) { return b.eval(Bindings{}.set(Var::y, y)); };

  // Full-grid index k = 0..n+1; interior unknown k lives in column k-1.
  // Each boundary value is a combination of the first/last three interior ones.
  const double a0 = a_at(0.0, 0), b0 = b_at(0.0);
  const double a1 = a_at(1.0, n + 1), b1 = b_at(1.0);
  const double cl = 2.0 * a0 / h2 - 1.5 * b0 / h;
  const double cr = 2.0 * a1 / h2 + 1.5 * b1 / h;
  if (std::abs(cl) < 1e-12 * (a0 / h2) || std::abs(cr) < 1e-12 * (a1 / h2))
    throw SingularMatrix(std::min(std::abs(cl), std::abs(cr)), 1e-12, "Wentzell boundary elimination");
  // u_0 = sum_m left[m] * u_{m+1}
  const double left[3] = {-(-5.0 * a0 / h2 + 2.0 * b0 / h) / cl, -(4.0 * a0 / h2 - 0.5 * b0 / h) / cl,
                          -(-a0 / h2) / cl};
  // u_{n+1} = sum_m right[m] * u_{n-m}
  const double right[3] = {-(-5.0 * a1 / h2 - 2.0 * b1 / h) / cr, -(4.0 * a1 / h2 + 0.5 * b1 / h) / cr,
                           -(-a1 / h2) / cr};

  ComplexMatrix m(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t i = k - 1;
    const double ak = a_at(grid.nodes[i], k);
    const double bk = b_at(grid.nodes[i]);
    // -(a u'' + b u') = c_minus u_{k-1} + c_mid u_k + c_plus u_{k+1}
    const double c_minus = -ak / h2 + 0.5 * bk / h;
    const double c_mid = 2.0 * ak / h2;
    const double c_plus = -ak / h2 - 0.5 * bk / h;
    m(i, i) += c_mid;
    if (k - 1 >= 1) m(i, i - 1) += c_minus;
    else
      for (std::size_t q = 0; q < 3; ++q) m(i, q) += c_minus * left[q];
    if (k + 1 <= n) m(i, i + 1) += c_plus;
    else
      for (std::size_t q = 0; q < 3; ++q) m(i, n - 1 - q) += c_plus * right[q];
  }
  return m;
}

ComplexMatrix build_integral_operator(const expr::Expr& k, const SpaceGrid& grid) {
  const std::size_t n = grid.n_y;
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = k.eval(Bindings{}.set(Var::y, grid.nodes[i]).set(Var::tau, grid.nodes[j])) * grid.weights[j];
  return m;
}

std::pair<ComplexMatrix, ComplexMatrix> build_commuting_operators(const expr::Expr& diag,
                                                                  std::span<const double> b_coeffs,
                                                                  const SpaceGrid& grid) {
  CVector d(grid.n_y);
  for (std::size_t j = 0; j < grid.n_y; ++j) d[j] = diag.eval(Bindings{}.set(Var::y, grid.nodes[j]));
  const ComplexMatrix a = ComplexMatrix::diagonal(d);
  ComplexMatrix b(grid.n_y);
  ComplexMatrix power = ComplexMatrix::identity(grid.n_y);
  for (std::size_t k = 0; k < b_coeffs.size(); ++k) {
    if (k > 0) power = power * a;
    b += power * Complex(b_coeffs[k]);
  }
  return {a, b};
}

// ---------------------------------------------------------------- conditions

namespace {
std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}
}  // namespace

std::string Condition21Report::details() const {
  std::string s = fmt("||B|| = %.6g, sup_t ||A(A+t)^-1|| = %.6g: ", lhs, rhs);
  s += norm_passed ? "norm condition holds" : "norm condition fails";
  s += fmt("; d = %.6g%+.6gi", d.real(), d.imag());
  s += d_nonzero ? " (nonzero)" : " (zero)";
  s += a_plus_b_nonsingular ? "; A+B nonsingular" : "; A+B singular";
  return s;
}

Condition21Report check_condition_2_1(const OperatorPair& pair, std::span<const double> t_samples,
                                      const BoundaryData* bc) {
  Condition21Report r;
  r.lhs = pair.op_norm_E(pair.B());
  r.rhs = 0.0;
  for (double t : t_samples) {
    double v = std::numeric_limits<double>::quiet_NaN();
    try {
      const ComplexMatrix res = inverse(pair.A_lambda(t));
      v = pair.op_norm_E(pair.A() * res);
      r.rhs = std::max(r.rhs, v);
    } catch (const SingularMatrix&) {
    }
    r.samples.emplace_back(t, v);
  }
  r.norm_passed = r.lhs < r.rhs;
  if (bc) {
    r.d = bc->recompute_d();
    r.d_nonzero = r.d != Complex(0.0);
  } else {
    r.d_nonzero = true;
  }
  try {
    LuFactorization lu(pair.A() + pair.B());
    r.a_plus_b_nonsingular = true;
  } catch (const SingularMatrix&) {
    r.a_plus_b_nonsingular = false;
  }
  r.passed = r.norm_passed && r.d_nonzero && r.a_plus_b_nonsingular;
  return r;
}

std::string Condition1Report::details() const {
  return fmt("d1 = %.6g%+.6gi", d1.real(), d1.imag()) + (passed ? " (nonzero)" : " (zero)");
}

Condition1Report check_condition_1(const BoundaryData& bc) {
  Condition1Report r;
  const Complex am = bc.m1 == 0 ? bc.alpha0 : bc.alpha1;
  const Complex bm = bc.m2 == 0 ? bc.beta0 : bc.beta1;
  r.d1 = (bc.m1 % 2 == 0 ? 1.0 : -1.0) * am * bm;
  r.passed = r.d1 != Complex(0.0);
  return r;
}

std::string Condition41Report::details() const {
  std::string s = fmt("min a = %.6g", min_a);
  s += a_positive ? " (positive)" : " (not positive)";
  s += coefficients_finite ? "; a, b finite" : "; a or b not finite";
  s += kernel_finite ? "; K finite on the grid" : "; K not finite";
  s += fmt("; int_0^1 exp(-int b/a) = %.6g", integrability);
  return s;
}

Condition41Report check_condition_4_1(const expr::Expr& a, const expr::Expr& b, const expr::Expr& k,
                                      const SpaceGrid& grid) {
  Condition41Report r;
  r.min_a = std::numeric_limits<double>::infinity();
  r.coefficients_finite = true;
  // Coefficients on a fine grid of [0,1] including the end points.
  const std::size_t fine = 2000;
  std::vector<double> ratio(fine + 1);
  for (std::size_t i = 0; i <= fine; ++i) {
    const double y = static_cast<double>(i) / fine;
    try {
      const double av = a.eval(Bindings{}.set(Var::y, y));
      const double bv = b.eval(Bindings{}.set(Var::y, y));
      r.min_a = std::min(r.min_a, av);
      ratio[i] = av > 0.0 ? bv / av : std::numeric_limits<double>::quiet_NaN();
    } catch (const EvalError&) {
      r.coefficients_finite = false;
    }
  }
  r.a_positive = r.min_a > 0.0;
  r.kernel_finite = true;
  try {
    for (double y : grid.nodes)
      for (double t : grid.nodes) (void)k.eval(Bindings{}.set(Var::y, y).set(Var::tau, t));
    for (double y : {0.0, 1.0})
      for (double t : {0.0, 1.0}) (void)k.eval(Bindings{}.set(Var::y, y).set(Var::tau, t));
  } catch (const EvalError&) {
    r.kernel_finite = false;
  }
  if (r.a_positive && r.coefficients_finite) {
    double inner = 0.0, outer = 0.0, prev = 1.0;
    const double dy = 1.0 / fine;
    for (std::size_t i = 1; i <= fine; ++i) {
      inner += 0.5 * dy * (ratio[i - 1] + ratio[i]);
      const double cur = std::exp(-inner);
      outer += 0.5 * dy * (prev + cur);
      prev = cur;
    }
    r.integrability = outer;
  } else {
    r.integrability = std::numeric_limits<double>::quiet_NaN();
  }
  r.passed = r.a_positive && r.coefficients_finite && r.kernel_finite;
  return r;
}

// ---------------------------------------------------------------- norms

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw InvalidArgument("log_grid: need 0 < lo < hi and count >= 2");
  std::vector<double> t(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) t[i] = std::exp(a + (b - a) * static_cast<double>(i) / (count - 1));
  return t;
}

std::vector<double> kfunctional_values(std::span<const Complex> f, const ComplexMatrix& a, const SpaceGrid& grid,
                                       double p, std::span<const double> t_grid) {
  const std::size_t n = f.size();
  if (a.rows() != n || grid.n_y != n) throw InvalidArgument("kfunctional: dimension mismatch");
  auto graph_norm = [&](std::span<const Complex> v) {
    const CVector av = a * v;
    return std::pow(std::pow(grid.e_norm(v), p) + std::pow(grid.e_norm(av), p), 1.0 / p);
  };
  const double f_graph = graph_norm(f);
  const double f_e = grid.e_norm(f);
  std::vector<double> k(t_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j) k[j] = std::min(f_graph, t_grid[j] * f_e);
  if (f_e == 0.0) return k;

  // Interior candidates lie on the Tikhonov path (G + mu W) g = G f with
  // G = W + A^* W A; sample it on a log grid of mu and take the lower
  // envelope of a(mu) + t b(mu).
  ComplexMatrix w(n), g(n);
  for (std::size_t i = 0; i < n; ++i) w(i, i) = grid.weights[i];
  g = w + a.adjoint() * w * a;
  const CVector gf = g * f;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(g(i, i)) / grid.weights[i]);
  const std::size_t n_mu = 241;
  for (std::size_t m = 0; m < n_mu; ++m) {
    const double mu = scale * std::pow(10.0, -12.0 + 24.0 * static_cast<double>(m) / (n_mu - 1));
    ComplexMatrix sys = g + w * Complex(mu);
    const CVector gv = mat_solve(sys, gf);
    CVector diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = f[i] - gv[i];
    const double av = graph_norm(diff);
    const double bv = grid.e_norm(gv);
    for (std::size_t j = 0; j < t_grid.size(); ++j) k[j] = std::min(k[j], av + t_grid[j] * bv);
  }
  return k;
}

double kfunctional_norm(std::span<const Complex> f, const ComplexMatrix& a, const SpaceGrid& grid, double theta,
                        double p, std::span<const double> t_grid) {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("kfunctional_norm: theta must lie in (0,1)");
  if (t_grid.size() < 2) throw InvalidArgument("kfunctional_norm: need at least two t values");
  const auto k = kfunctional_values(f, a, grid, p, t_grid);
  double s = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    double dl = 0.0;  // trapezoid weight in log t
    if (j > 0) dl += 0.5 * std::log(t_grid[j] / t_grid[j - 1]);
    if (j + 1 < k.size()) dl += 0.5 * std::log(t_grid[j + 1] / t_grid[j]);
    s += std::pow(std::pow(t_grid[j], -theta) * k[j], p) * dl;
  }
  return std::pow(s, 1.0 / p);
}

double kfunctional_norm(std::span<const Complex> f, const ComplexMatrix& a, const SpaceGrid& grid, double theta,
                        double p) {
  const auto t = log_grid(1e-4, 1e4, 200);
  return kfunctional_norm(f, a, grid, theta, p, t);
}

double mixed_norm(const GridFunction& u, const SpaceGrid& grid, double p) {
  if (u.n_y() != grid.n_y) throw InvalidArgument("mixed_norm: grid mismatch");
  const double dt = u.dt();
  double s = 0.0;
  for (std::size_t i = 0; i < u.n_t(); ++i) {
    const double w = (i == 0 || i + 1 == u.n_t()) ? 0.5 * dt : dt;
    s += w * std::pow(grid.e_norm(u.row(i)), p);
  }
  return std::pow(s, 1.0 / p);
}

double sup_norm(const GridFunction& u, const SpaceGrid& grid, double t0, double t1) {
  double m = 0.0;
  const double tol = 1e-12 * u.T();
  for (std::size_t i = 0; i < u.n_t(); ++i) {
    const double t = u.t(i);
    if (t < t0 - tol || t > t1 + tol) continue;
    m = std::max(m, grid.e_norm(u.row(i)));
  }
  return m;
}

}  // namespace epslab
