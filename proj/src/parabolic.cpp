#include "epslab/parabolic.hpp"

#include <cmath>
#include <cstdio>

namespace epslab {

void CauchySpec::validate() const {
  if (!pair) throw InvalidArgument("CauchySpec: no operator pair");
  if (u0.size() != pair->n()) throw InvalidArgument("CauchySpec: u0 has the wrong size");
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("CauchySpec: T must be positive");
  if (n_t < 3) throw InvalidArgument("CauchySpec: n_t must be at least 3");
}

GridFunction cauchy_solve(const CauchySpec& spec) {
  spec.validate();
  const std::size_t n = spec.pair->n();
  const LuFactorization lu_b(spec.pair->B());
  const ComplexMatrix G = lu_b.solve(spec.pair->A_lambda(spec.lambda));
  const double growth = op_norm(expm(Complex(-spec.T) * G));
  if (!(growth <= 1e8)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "cauchy_solve: ||exp(-T B^{-1}A)|| = %.3e, the generator is unstable", growth);
    throw Overflow(buf);
  }

  GridFunction u(spec.T, spec.n_t, n);
  const double h = u.dt();
  const ComplexMatrix P = expm(Complex(-h) * G);
  const ComplexMatrix Ph = expm(Complex(-0.5 * h) * G);
  CVector w = spec.u0;
  std::copy(w.begin(), w.end(), u.row(0).begin());
  for (std::size_t i = 0; i + 1 < spec.n_t; ++i) {
    CVector next = P * w;
    if (!spec.f0.is_zero()) {
      const CVector src = Ph * lu_b.solve(spec.f0(u.t(i) + 0.5 * h, n));
      axpy(h, src, next);
    }
    w = std::move(next);
    std::copy(w.begin(), w.end(), u.row(i + 1).begin());
  }
  if (!u.all_finite()) throw Overflow("cauchy_solve: non-finite values");
  return u;
}

std::vector<PropagatorSample> compare_propagators(const OperatorPair& pair, Complex lambda,
                                                  std::span<const double> t_samples) {
  const ComplexMatrix Al = pair.A_lambda(lambda);
  const ComplexMatrix binv = inverse(pair.B());
  const ComplexMatrix left = binv * Al, right = Al * binv;
  std::vector<PropagatorSample> out;
  for (double t : t_samples) {
    PropagatorSample s;
    s.t = t;
    s.left = pair.op_norm_E(expm(Complex(-t) * left));
    s.right = pair.op_norm_E(expm(Complex(-t) * right));
    out.push_back(s);
  }
  return out;
}

BoundaryPropagators::BoundaryPropagators(const ProblemSpec& spec, const QSystem& q)
    : T_(spec.T), n_(spec.n()), Q1_(q.Q1), Q2_(q.Q2) {
  layer_at_end_ = spec.pair->B().trace().real() > 0.0;
  // Columns of the inverse boundary system are the responses of (a, b) to
  // unit data; reuse solve_boundary_system column by column.
  inv_ = ComplexMatrix(2 * n_, 2 * n_);
  CVector e1(n_), e2(n_);
  for (std::size_t k = 0; k < 2 * n_; ++k) {
    std::fill(e1.begin(), e1.end(), Complex(0.0));
    std::fill(e2.begin(), e2.end(), Complex(0.0));
    (k < n_ ? e1[k] : e2[k - n_]) = 1.0;
    const QSystem s = solve_boundary_system(spec, q, e1, e2);
    for (std::size_t i = 0; i < n_; ++i) {
      inv_(i, k) = s.a[i];
      inv_(n_ + i, k) = s.b[i];
    }
  }
}

ComplexMatrix BoundaryPropagators::response(double t, bool first) const {
  const std::size_t c0 = first ? 0 : n_;
  const ComplexMatrix X_a = inv_.block(0, c0, n_, n_), X_b = inv_.block(n_, c0, n_, n_);
  return expm(Complex(t) * Q2_) * X_a + expm(Complex(-(T_ - t)) * Q1_) * X_b;
}

ComplexMatrix BoundaryPropagators::M(double t) const { return response(t, !layer_at_end_); }
ComplexMatrix BoundaryPropagators::N(double t) const { return response(t, layer_at_end_); }

CVector BoundaryPropagators::apply(double t, std::span<const Complex> f1, std::span<const Complex> f2) const {
  CVector u = response(t, true) * f1;
  axpy(1.0, response(t, false) * f2, u);
  return u;
}

BoundaryPropagators build_MN(const ProblemSpec& spec, const QSystem& q) { return BoundaryPropagators(spec, q); }

}  // namespace epslab
