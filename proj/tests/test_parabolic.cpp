#include <cmath>

#include "doctest.h"
#include "epslab/parabolic.hpp"

using namespace epslab;
using expr::parse;

namespace {

std::shared_ptr<const OperatorPair> scalar_pair(double a, double b) {
  ComplexMatrix am(1), bm(1);
  am(0, 0) = a;
  bm(0, 0) = b;
  return std::make_shared<const OperatorPair>(am, bm, SpaceGrid::uniform(1), 2.0, "scalar");
}

std::shared_ptr<const OperatorPair> commuting_pair(std::size_t n_y) {
  const auto g = SpaceGrid::uniform(n_y);
  const std::vector<double> c{0.3, 0.05};
  auto [a, b] = build_commuting_operators(parse("1 + 9*y"), c, g);
  return std::make_shared<const OperatorPair>(a, b, g, 2.0, "commuting");
}

CauchySpec scalar_cauchy(double a, double T, std::size_t n_t) {
  CauchySpec c;
  c.pair = scalar_pair(a, 1.0);
  c.u0 = {1.0};
  c.T = T;
  c.n_t = n_t;
  return c;
}

ProblemSpec dn_spec(std::shared_ptr<const OperatorPair> pair, double eps, CVector f1, CVector f2) {
  ProblemSpec s;
  s.pair = std::move(pair);
  s.eps = eps;
  s.bc = BoundaryData::make(0, 1, 1.0, 0.0, 0.0, 1.0, std::move(f1), std::move(f2), 2.0);
  return s;
}

}  // namespace

TEST_CASE("Cauchy problem: scalar exponential and zero data") {
  const auto u = cauchy_solve(scalar_cauchy(2.5, 2.0, 201));
  for (std::size_t i = 0; i < u.n_t(); ++i) CHECK(std::abs(u(i, 0) - std::exp(-2.5 * u.t(i))) < 1e-10);
  auto z = scalar_cauchy(2.5, 2.0, 51);
  z.u0 = {0.0};
  const auto uz = cauchy_solve(z);
  for (const auto& v : uz.values()) CHECK(v == Complex(0.0));
}

TEST_CASE("Cauchy problem: steady state under a constant source") {
  auto pair = commuting_pair(6);
  CauchySpec c;
  c.pair = pair;
  c.u0 = CVector(6);
  c.f0 = Forcing([](double) { return CVector(6, 2.0); });
  c.T = 20.0;
  c.n_t = 100001;
  const auto u = cauchy_solve(c);
  const CVector steady = mat_solve(pair->A(), CVector(6, 2.0));
  const CVector end = u.row_copy(u.n_t() - 1);
  for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(end[j] - steady[j]) < 1e-6);
}

TEST_CASE("Cauchy problem: second order with a source, residual, semigroup law") {
  const double a = 3.0;
  auto exact = [a](double t) {
    const double up = (a * std::cos(t) + std::sin(t)) / (a * a + 1);
    return up + (1.0 - a / (a * a + 1)) * std::exp(-a * t);
  };
  std::vector<double> errs, res;
  for (std::size_t n_t : {41u, 81u, 161u}) {
    auto c = scalar_cauchy(a, 2.0, n_t);
    c.f0 = Forcing([](double t) { return CVector{std::cos(t)}; });
    const auto u = cauchy_solve(c);
    double e = 0.0;
    for (std::size_t i = 0; i < n_t; ++i) e = std::max(e, std::abs(u(i, 0) - exact(u.t(i))));
    errs.push_back(e);
    const auto du = derivative_t(u);
    double r = 0.0;
    for (std::size_t i = 1; i + 1 < n_t; ++i) r = std::max(r, std::abs(du(i, 0) + a * u(i, 0) - std::cos(u.t(i))));
    res.push_back(r);
  }
  for (std::size_t k = 1; k < errs.size(); ++k) {
    CHECK(std::log2(errs[k - 1] / errs[k]) > 1.8);
    CHECK(std::log2(res[k - 1] / res[k]) > 1.8);
  }

  auto pair = commuting_pair(8);
  const ComplexMatrix G = mat_solve(pair->B(), pair->A());
  const ComplexMatrix full = expm(Complex(-0.05) * G), half = expm(Complex(-0.025) * G);
  ComplexMatrix p1 = ComplexMatrix::identity(8), p2 = ComplexMatrix::identity(8);
  for (int k = 0; k < 10; ++k) p1 = p1 * full;
  for (int k = 0; k < 20; ++k) p2 = p2 * half;
  CHECK((p1 - p2).max_abs() < 1e-9);
}

TEST_CASE("Cauchy problem: singular B and unstable generator") {
  auto c = scalar_cauchy(1.0, 1.0, 11);
  c.pair = scalar_pair(1.0, 0.0);
  CHECK_THROWS_AS(cauchy_solve(c), SingularMatrix);
  auto g = scalar_cauchy(1.0, 1.0, 11);
  g.pair = scalar_pair(1.0, 0.0);
  ComplexMatrix am(1), bm(1);
  am(0, 0) = 1.0;
  bm(0, 0) = -0.02;
  PositivityOptions po;
  g.pair = std::make_shared<const OperatorPair>(am, bm, SpaceGrid::uniform(1), 2.0, "scalar", po);
  CHECK_THROWS_AS(cauchy_solve(g), Overflow);
}

TEST_CASE("propagator comparison: similar generators") {
  const auto g = SpaceGrid::uniform(8);
  ComplexMatrix b = ComplexMatrix::identity(8);
  for (std::size_t i = 0; i + 1 < 8; ++i) b(i, i + 1) = 0.3;
  auto [a, unused] = build_commuting_operators(parse("1+y"), std::vector<double>{1.0}, g);
  const OperatorPair pair(a, b, g, 2.0, "test");
  const std::vector<double> ts{0.0, 0.5, 2.0};
  const auto cmp = compare_propagators(pair, 1.0, ts);
  CHECK(cmp[0].left == doctest::Approx(1.0));
  for (const auto& s : cmp) {
    CHECK(s.left > 0.0);
    CHECK(s.right > 0.0);
  }
  // Commuting pair: the two orders coincide.
  const auto c2 = compare_propagators(*commuting_pair(6), 0.0, ts);
  for (const auto& s : c2) CHECK(s.left == doctest::Approx(s.right).epsilon(1e-10));
}

TEST_CASE("boundary propagators") {
  auto pair = commuting_pair(6);
  auto s = dn_spec(pair, 0.01, CVector(6, 1.0), CVector(6, Complex(0.5, -1.0)));
  const auto q = solve_boundary_system(s, compute_q_system(s));
  const auto mn = build_MN(s, q);
  CHECK(mn.layer_at_end());
  const auto u = homogeneous_solution(s, q, 101);
  for (std::size_t i : {0u, 17u, 50u, 100u}) {
    const CVector v = mn.apply(u.t(i), s.bc.f1, s.bc.f2);
    for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(v[j] - u(i, j)) < 1e-10);
  }
  const CVector z = mn.apply(0.3, CVector(6), CVector(6));
  for (const auto& v : z) CHECK(v == Complex(0.0));

  // Scalar, B = 0: layer at t = 0 with ||M(t)|| ~ exp(-t/sqrt(eps)).
  auto sc = dn_spec(scalar_pair(1.0, 0.0), 1e-3, {1.0}, {0.0});
  const auto qs = compute_q_system(sc);
  const auto ms = build_MN(sc, qs);
  CHECK_FALSE(ms.layer_at_end());
  const double k = 1.0 / std::sqrt(sc.eps);
  for (double t : {0.05, 0.1, 0.2})
    CHECK(std::abs(ms.M(t)(0, 0)) == doctest::Approx(std::exp(-k * t)).epsilon(1e-6));

  // N stays bounded as eps decreases.
  double nmax = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    auto se = dn_spec(pair, eps, CVector(6), CVector(6));
    const auto be = build_MN(se, compute_q_system(se));
    nmax = std::max(nmax, pair->op_norm_E(be.N(0.5)));
  }
  CHECK(nmax < 10.0);
}
