#include "epslab/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "epslab/multiplier.hpp"

namespace epslab {

void ProblemSpec::validate() const {
  if (!pair) throw InvalidArgument("ProblemSpec: no operator pair");
  if (!(eps > 0.0) || !(eps <= eps0 * (1.0 + 1e-12))) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "ProblemSpec: eps = %g outside (0, %g]", eps, eps0);
    throw InvalidArgument(buf);
  }
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("ProblemSpec: T must be positive");
  if (n_t < 5) throw InvalidArgument("ProblemSpec: n_t must be at least 5");
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw InvalidArgument("ProblemSpec: lambda not finite");
  if (lambda != Complex(0.0) && std::abs(std::arg(lambda)) > pair->positivity().phi + 1e-12)
    throw InvalidArgument("ProblemSpec: lambda outside the positivity sector");
  if (bc.d == Complex(0.0)) throw InvalidArgument("ProblemSpec: boundary determinant d is zero");
  if (bc.f1.size() != n() || bc.f2.size() != n()) throw InvalidArgument("ProblemSpec: boundary data size mismatch");
  if (n_x < 4 || (n_x & (n_x - 1)) != 0) throw InvalidArgument("ProblemSpec: n_x must be a power of two");
  if (!(L >= 0.0)) throw InvalidArgument("ProblemSpec: L must be nonnegative");
}

Forcing forcing_from_expr(const expr::Expr& f, const SpaceGrid& grid) {
  return Forcing([f, grid](double t) {
    CVector v(grid.n_y);
    expr::Bindings b;
    b.set(expr::Var::t, t);
    for (std::size_t j = 0; j < grid.n_y; ++j) {
      b.set(expr::Var::y, grid.nodes[j]);
      v[j] = f.eval(b);
    }
    return v;
  });
}

QSystem compute_q_system(const ProblemSpec& spec) {
  spec.validate();
  const auto& B = spec.pair->B();
  const double eps = spec.eps;
  ComplexMatrix m = B * B;
  m += Complex(4.0 * eps) * spec.pair->A_lambda(spec.lambda);
  QSystem q;
  q.Qlam = sqrtm(m);
  q.Q1 = Complex(0.5 / eps) * (B + q.Qlam);
  q.Q2 = Complex(0.5 / eps) * (B - q.Qlam);
  LuFactorization lu(q.Qlam);
  q.Dinv = Complex(-1.0) / spec.bc.d * lu.inverse();
  return q;
}

QSystem solve_boundary_system(const ProblemSpec& spec, QSystem q) {
  return solve_boundary_system(spec, std::move(q), spec.bc.f1, spec.bc.f2);
}

QSystem solve_boundary_system(const ProblemSpec& spec, QSystem q, std::span<const Complex> f1,
                              std::span<const Complex> f2) {
  const std::size_t n = spec.n();
  if (f1.size() != n || f2.size() != n) throw InvalidArgument("solve_boundary_system: data size mismatch");
  const auto& bc = spec.bc;
  const Complex s = std::sqrt(spec.eps);
  const ComplexMatrix E0 = expm(Complex(spec.T) * q.Q2);
  const ComplexMatrix E1 = expm(Complex(-spec.T) * q.Q1);
  // Both modes must decay in the direction they are stepped.
  for (const auto* e : {&E0, &E1})
    if (!(e->max_abs() <= 1e8)) throw Overflow("solve_boundary_system: a mode grows in its stepping direction");

  auto weighted = [&](Complex c0, Complex c1, const ComplexMatrix& Q) {
    ComplexMatrix r = (s * c1) * Q;
    r.add_identity(c0);
    return r;
  };
  ComplexMatrix sys(2 * n, 2 * n);
  sys.set_block(0, 0, weighted(bc.alpha0, bc.alpha1, q.Q2));
  sys.set_block(0, n, weighted(bc.alpha0, bc.alpha1, q.Q1) * E1);
  sys.set_block(n, 0, weighted(bc.beta0, bc.beta1, q.Q2) * E0);
  sys.set_block(n, n, weighted(bc.beta0, bc.beta1, q.Q1));
  CVector rhs(2 * n);
  std::copy(f1.begin(), f1.end(), rhs.begin());
  std::copy(f2.begin(), f2.end(), rhs.begin() + static_cast<std::ptrdiff_t>(n));

  LuFactorization lu(sys, 1e-14);
  const CVector x = lu.solve(rhs);
  q.min_pivot = lu.min_pivot();
  q.a.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
  q.b.assign(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
  q.g1 = q.a;
  q.g2 = E1 * q.b;
  return q;
}

std::size_t effective_n_t(const ProblemSpec& spec, const QSystem& q) {
  if (!(spec.layer_points > 0.0)) return spec.n_t;
  const double rate = std::max(op_norm(q.Q1), op_norm(q.Q2));
  const double want = std::ceil(spec.layer_points * spec.T * rate) + 1.0;
  const double capped = std::min(want, static_cast<double>(spec.max_n_t));
  return std::max(spec.n_t, static_cast<std::size_t>(capped));
}

std::size_t effective_n_t(const ProblemSpec& spec) {
  if (!(spec.layer_points > 0.0)) return spec.n_t;
  return effective_n_t(spec, compute_q_system(spec));
}

GridFunction homogeneous_solution(const ProblemSpec& spec, const QSystem& q) {
  return homogeneous_solution(spec, q, effective_n_t(spec, q));
}

GridFunction homogeneous_solution(const ProblemSpec& spec, const QSystem& q, std::size_t n_t) {
  const std::size_t n = spec.n();
  if (q.a.size() != n || q.b.size() != n) throw InvalidArgument("homogeneous_solution: boundary system not solved");
  GridFunction u(spec.T, n_t, n);
  const double h = u.dt();
  // Both modes are stepped in their decaying direction.
  const ComplexMatrix P2 = expm(Complex(h) * q.Q2);
  const ComplexMatrix P1 = expm(Complex(-h) * q.Q1);
  CVector w = q.a;
  for (std::size_t i = 0; i < n_t; ++i) {
    if (i > 0) w = P2 * w;
    auto r = u.row(i);
    std::copy(w.begin(), w.end(), r.begin());
  }
  w = q.b;
  for (std::size_t i = n_t; i-- > 0;) {
    if (i + 1 < n_t) w = P1 * w;
    axpy(1.0, w, u.row(i));
  }
  if (!u.all_finite()) throw Overflow("homogeneous_solution: non-finite values while stepping the modes");
  return u;
}

GridFunction direct_solve(const ProblemSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n();
  const std::size_t n_t = effective_n_t(spec);
  const std::size_t N = n_t - 1;
  const double h = spec.T / static_cast<double>(N);
  const double eps = spec.eps;
  const Complex s = std::sqrt(eps);
  const auto& bc = spec.bc;
  const ComplexMatrix& B = spec.pair->B();

  // Interior row at node k: Cm u_{k-1} + D u_k + Cp u_{k+1} = f(t_k).
  ComplexMatrix Cm = Complex(-1.0 / (2.0 * h)) * B;
  Cm.add_identity(-eps / (h * h));
  ComplexMatrix Cp = Complex(1.0 / (2.0 * h)) * B;
  Cp.add_identity(-eps / (h * h));
  ComplexMatrix D = spec.pair->A_lambda(spec.lambda);
  D.add_identity(2.0 * eps / (h * h));
  const ComplexMatrix I = ComplexMatrix::identity(n);

  // Blocks: {0,1}, {2}, ..., {N-2}, {N-1,N}.
  const std::size_t nb = N - 1;
  std::vector<ComplexMatrix> lower(nb), diag(nb), upper(nb);
  std::vector<CVector> rhs(nb);
  auto f_at = [&](std::size_t k) { return spec.f(static_cast<double>(k) * h, n); };
  const Complex c2h = s / (2.0 * h);

  {
    ComplexMatrix d0(2 * n, 2 * n);
    d0.set_block(0, 0, Complex(bc.alpha0 - 3.0 * bc.alpha1 * c2h) * I);
    d0.set_block(0, n, Complex(4.0 * bc.alpha1 * c2h) * I);
    d0.set_block(n, 0, Cm);
    d0.set_block(n, n, D);
    diag[0] = std::move(d0);
    ComplexMatrix u0(2 * n, n);
    u0.set_block(0, 0, Complex(-bc.alpha1 * c2h) * I);
    u0.set_block(n, 0, Cp);
    upper[0] = std::move(u0);
    CVector r(2 * n);
    std::copy(bc.f1.begin(), bc.f1.end(), r.begin());
    const CVector f1 = f_at(1);
    std::copy(f1.begin(), f1.end(), r.begin() + static_cast<std::ptrdiff_t>(n));
    rhs[0] = std::move(r);
  }
  for (std::size_t blk = 1; blk + 1 < nb; ++blk) {
    const std::size_t k = blk + 1;
    if (blk == 1) {
      ComplexMatrix l(n, 2 * n);
      l.set_block(0, n, Cm);
      lower[blk] = std::move(l);
    } else {
      lower[blk] = Cm;
    }
    diag[blk] = D;
    if (blk + 2 == nb) {
      ComplexMatrix up(n, 2 * n);
      up.set_block(0, 0, Cp);
      upper[blk] = std::move(up);
    } else {
      upper[blk] = Cp;
    }
    rhs[blk] = f_at(k);
  }
  {
    const std::size_t blk = nb - 1;
    ComplexMatrix l(2 * n, n);
    l.set_block(0, 0, Cm);
    l.set_block(n, 0, Complex(bc.beta1 * c2h) * I);
    lower[blk] = std::move(l);
    ComplexMatrix d(2 * n, 2 * n);
    d.set_block(0, 0, D);
    d.set_block(0, n, Cp);
    d.set_block(n, 0, Complex(-4.0 * bc.beta1 * c2h) * I);
    d.set_block(n, n, Complex(bc.beta0 + 3.0 * bc.beta1 * c2h) * I);
    diag[blk] = std::move(d);
    CVector r(2 * n);
    const CVector fN = f_at(N - 1);
    std::copy(fN.begin(), fN.end(), r.begin());
    std::copy(bc.f2.begin(), bc.f2.end(), r.begin() + static_cast<std::ptrdiff_t>(n));
    rhs[blk] = std::move(r);
  }

  const auto x = solve_block_tridiagonal(lower, diag, upper, rhs);
  GridFunction u(spec.T, n_t, n);
  auto put = [&](std::size_t node, const CVector& v, std::size_t off) {
    auto r = u.row(node);
    std::copy(v.begin() + static_cast<std::ptrdiff_t>(off), v.begin() + static_cast<std::ptrdiff_t>(off + n),
              r.begin());
  };
  put(0, x[0], 0);
  put(1, x[0], n);
  for (std::size_t blk = 1; blk + 1 < nb; ++blk) put(blk + 1, x[blk], 0);
  put(N - 1, x[nb - 1], 0);
  put(N, x[nb - 1], n);
  if (!u.all_finite()) throw SingularMatrix(0.0, 0.0, "direct_solve produced non-finite values");
  return u;
}

std::string to_string(SolvePath p) { return p == SolvePath::Semigroup ? "semigroup" : "direct"; }

FullSolveResult full_solve(const ProblemSpec& spec) {
  spec.validate();
  FullSolveResult out;
  if (!spec.pair->commutes()) {
    out.path = SolvePath::Direct;
    out.u = direct_solve(spec);
    return out;
  }
  const std::size_t n = spec.n();
  QSystem q = compute_q_system(spec);
  const std::size_t n_t = effective_n_t(spec, q);
  if (spec.f.is_zero()) {
    q = solve_boundary_system(spec, std::move(q));
    out.u = homogeneous_solution(spec, q, n_t);
    return out;
  }

  const LineGrid grid = LineGrid::make(spec.n_x, spec.line_half_width());
  if (grid.x(0) > 0.0 || grid.x(grid.n_x - 1) < spec.T)
    throw InvalidArgument("full_solve: the line box does not contain [0, T]");
  const auto line = whole_line_solve(grid, sample_zero_extension(grid, spec.f, spec.T, n), spec.eps, spec.lambda,
                                     *spec.pair);
  out.alias_fraction = line.alias_fraction;
  out.alias_warning = line.alias_warning;

  const Complex s = std::sqrt(spec.eps);
  const auto& bc = spec.bc;
  const CVector u0 = line.value_exact(0.0), du0 = line.derivative_exact(0.0);
  const CVector uT = line.value_exact(spec.T), duT = line.derivative_exact(spec.T);
  CVector g1 = bc.f1, g2 = bc.f2;
  for (std::size_t j = 0; j < n; ++j) {
    g1[j] -= bc.alpha0 * u0[j] + s * bc.alpha1 * du0[j];
    g2[j] -= bc.beta0 * uT[j] + s * bc.beta1 * duT[j];
  }
  q = solve_boundary_system(spec, std::move(q), g1, g2);
  out.u = homogeneous_solution(spec, q, n_t);
  for (std::size_t i = 0; i < n_t; ++i) {
    const CVector v = line.value(out.u.t(i));
    axpy(1.0, v, out.u.row(i));
  }
  return out;
}

std::pair<CVector, CVector> apply_boundary_operators(const ProblemSpec& spec, const GridFunction& u) {
  const std::size_t n = u.n_y(), N = u.n_t() - 1;
  const double h = u.dt();
  const Complex s = std::sqrt(spec.eps);
  const auto& bc = spec.bc;
  CVector l1(n), l2(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex d0 = (-3.0 * u(0, j) + 4.0 * u(1, j) - u(2, j)) / (2.0 * h);
    const Complex dT = (3.0 * u(N, j) - 4.0 * u(N - 1, j) + u(N - 2, j)) / (2.0 * h);
    l1[j] = bc.alpha0 * u(0, j) + s * bc.alpha1 * d0;
    l2[j] = bc.beta0 * u(N, j) + s * bc.beta1 * dT;
  }
  return {l1, l2};
}

EpsilonDerivative epsilon_derivative(const ProblemSpec& spec, double delta) {
  if (!(delta > 0.0) || !(spec.eps - delta > 0.0) || spec.eps + delta > spec.eps0 * (1.0 + 1e-12))
    throw InvalidArgument("epsilon_derivative: eps +- delta must stay in (0, eps0]");
  // The smallest eps needs the finest grid; all three solves share it.
  ProblemSpec lo = spec, mid = spec, hi = spec;
  lo.eps = spec.eps - delta;
  hi.eps = spec.eps + delta;
  const std::size_t n_t = effective_n_t(lo);
  for (auto* p : {&lo, &mid, &hi}) {
    p->n_t = n_t;
    p->layer_points = 0.0;
  }
  const GridFunction um = full_solve(lo).u, u0 = full_solve(mid).u, up = full_solve(hi).u;
  EpsilonDerivative d;
  d.first = up - um;
  d.first *= 1.0 / (2.0 * delta);
  d.second = up + um;
  GridFunction two = u0;
  two *= 2.0;
  d.second -= two;
  d.second *= 1.0 / (delta * delta);
  return d;
}

}  // namespace epslab
