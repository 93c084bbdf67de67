#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "epslab/discretize.hpp"

using namespace epslab;
using expr::parse;

namespace {

Eigen::VectorXcd eigenvalues(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(e).eigenvalues();
}

OperatorPair scalar_pair(double a, double b) {
  ComplexMatrix am(1), bm(1);
  am(0, 0) = a;
  bm(0, 0) = b;
  return OperatorPair(am, bm, SpaceGrid::uniform(1), 2.0, "scalar");
}

}  // namespace

TEST_CASE("space grid weights") {
  for (std::size_t n : {1u, 2u, 7u, 64u}) {
    const auto g = SpaceGrid::uniform(n);
    double s = 0.0;
    for (double w : g.weights) s += w;
    CHECK(std::abs(s - 1.0) < 1e-12);
    CHECK(g.nodes.front() > 0.0);
    CHECK(g.nodes.back() < 1.0);
  }
  // Second-order quadrature: integral of y^2 on (0,1).
  double err[2];
  int k = 0;
  for (std::size_t n : {31u, 63u}) {
    const auto g = SpaceGrid::uniform(n);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += g.weights[j] * g.nodes[j] * g.nodes[j];
    err[k++] = std::abs(s - 1.0 / 3.0);
  }
  CHECK(std::log2(err[0] / err[1]) > 1.8);
}

TEST_CASE("Wentzell operator, constant coefficients") {
  const auto g = SpaceGrid::uniform(3);
  const auto a = build_wentzell_operator(parse("1"), parse("0"), g);
  const double s = g.h * g.h;
  CHECK(std::abs(a(1, 0) * s + 1.0) < 1e-12);
  CHECK(std::abs(a(1, 1) * s - 2.0) < 1e-12);
  CHECK(std::abs(a(1, 2) * s + 1.0) < 1e-12);
  // First row after eliminating u_0 = (5u_1 - 4u_2 + u_3)/2.
  CHECK(std::abs(a(0, 0) * s + 0.5) < 1e-12);
  CHECK(std::abs(a(0, 1) * s - 1.0) < 1e-12);
  CHECK(std::abs(a(0, 2) * s + 0.5) < 1e-12);
}

TEST_CASE("Wentzell operator spectrum: real, nonnegative, kernel of linear functions") {
  const auto g = SpaceGrid::uniform(16);
  const auto a = build_wentzell_operator(parse("1"), parse("0"), g);
  const auto ev = eigenvalues(a);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    CHECK(std::abs(ev(i).imag()) < 1e-8 * a.max_abs());
    CHECK(ev(i).real() > -1e-8 * a.max_abs());
  }
  CVector one(g.n_y, 1.0), lin(g.n_y);
  for (std::size_t j = 0; j < g.n_y; ++j) lin[j] = g.nodes[j];
  CHECK(norm2(a * one) < 1e-9 * a.max_abs());
  CHECK(norm2(a * lin) < 1e-9 * a.max_abs());
  // Shifted by lambda >= 1 the operator is positive.
  PositivityOptions po;
  po.min_decade = 0;
  po.include_zero = false;
  po.phi = 0.25 * std::numbers::pi;
  const auto rep = check_positivity(a, po.phi, sector_samples(po.phi, 0, 4, false), 100.0);
  CHECK(rep.passed);
}

TEST_CASE("Wentzell operator consistency on a function in its domain") {
  // y^3 (1-y)^3 has u' = u'' = 0 at both ends, so it satisfies the boundary
  // relation for any a, b.
  auto u = [](double y) { return std::pow(y * (1 - y), 3); };
  auto du = [](double y) { return 3 * std::pow(y * (1 - y), 2) * (1 - 2 * y); };
  auto d2u = [](double y) {
    const double q = y * (1 - y);
    return 6 * q * (1 - 2 * y) * (1 - 2 * y) - 6 * q * q;
  };
  std::vector<double> errs;
  for (std::size_t n : {31u, 63u, 127u, 255u}) {
    const auto g = SpaceGrid::uniform(n);
    const auto a = build_wentzell_operator(parse("1+y"), parse("y"), g);
    CVector v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = u(g.nodes[j]);
    const auto av = a * v;
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double y = g.nodes[j];
      e = std::max(e, std::abs(av[j] + ((1 + y) * d2u(y) + y * du(y))));
    }
    errs.push_back(e);
  }
  for (std::size_t k = 1; k < errs.size(); ++k) CHECK(std::log2(errs[k - 1] / errs[k]) > 1.8);
}

TEST_CASE("Wentzell operator rejects nonpositive a") {
  CHECK_THROWS_AS(build_wentzell_operator(parse("y - 0.5"), parse("0"), SpaceGrid::uniform(9)),
                  NonPositiveCoefficient);
}

TEST_CASE("integral operator") {
  const auto g = SpaceGrid::uniform(40);
  CHECK(build_integral_operator(parse("0"), g).max_abs() == 0.0);
  const auto b1 = build_integral_operator(parse("1"), g);
  const auto ones = b1 * CVector(g.n_y, 1.0);
  for (const auto& v : ones) CHECK(std::abs(v - 1.0) < 1e-12);

  double prev = 0.0;
  for (std::size_t n : {20u, 40u, 80u}) {
    const auto gg = SpaceGrid::uniform(n);
    const auto b = build_integral_operator(parse("y*tau"), gg);
    CVector tau(n);
    for (std::size_t j = 0; j < n; ++j) tau[j] = gg.nodes[j];
    const auto bu = b * tau;
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j) e = std::max(e, std::abs(bu[j] - gg.nodes[j] / 3.0));
    if (prev > 0.0) CHECK(std::log2(prev / e) > 1.8);
    prev = e;
  }
  const auto pair = OperatorPair(ComplexMatrix::identity(40), build_integral_operator(parse("cos(y-tau)"), g), g, 2.0,
                                 "test");
  CHECK(pair.op_norm_E(pair.B()) <= 1.0 + 1e-2);
}

TEST_CASE("B bounded by the resolvent of A") {
  const std::vector<double> ts{0.0, 0.1, 1.0, 10.0, 100.0};
  auto ok = check_condition_2_1(scalar_pair(1.0, 0.5), ts);
  CHECK(ok.lhs == doctest::Approx(0.5));
  CHECK(ok.rhs == doctest::Approx(1.0));
  CHECK(ok.passed);
  CHECK(check_condition_2_1(scalar_pair(1.0, 0.0), ts).passed);
  CHECK_FALSE(check_condition_2_1(scalar_pair(1.0, 2.0), ts).passed);
}

TEST_CASE("boundary data") {
  const CVector one{1.0}, zero{0.0};
  const auto bc = BoundaryData::make(0, 1, 1.0, 0.0, 0.0, 1.0, one, zero, 2.0);
  CHECK(bc.d == Complex(1.0));
  CHECK(bc.recompute_d() == bc.d);
  CHECK(bc.theta1 == doctest::Approx(0.25));
  CHECK(bc.theta2 == doctest::Approx(0.75));
  CHECK_THROWS_AS(BoundaryData::make(0, 0, 1.0, 0.0, 1.0, 0.0, one, zero, 2.0), InvalidArgument);
  CHECK_THROWS_AS(BoundaryData::make(0, 1, 1.0, 0.5, 0.0, 1.0, one, zero, 2.0), InvalidArgument);
  const auto c1 = check_condition_1(bc);
  CHECK(c1.passed);
  CHECK(c1.d1 == Complex(1.0));
  const auto robin = BoundaryData::make(1, 1, 2.0, 3.0, 1.0, 1.0, one, zero, 2.0);
  CHECK(check_condition_1(robin).d1 == Complex(-3.0));
}

TEST_CASE("Wentzell integrability check") {
  const auto g = SpaceGrid::uniform(16);
  const auto r = check_condition_4_1(parse("1+y"), parse("y"), parse("y*tau"), g);
  CHECK(r.passed);
  // exp(-int_0^y s/(1+s) ds) = (1+y) e^{-y}; its integral is 2 - 3/e.
  CHECK(r.integrability == doctest::Approx(2.0 - 3.0 / std::numbers::e).epsilon(1e-6));
  CHECK_FALSE(check_condition_4_1(parse("y"), parse("0"), parse("1"), g).passed);
}

TEST_CASE("K-functional norm") {
  const auto g = SpaceGrid::uniform(1);
  const double p = 2.0, theta = 0.25, lo = 1e-4, hi = 1e4;
  for (double a : {0.5, 1.0, 30.0}) {
    ComplexMatrix am(1);
    am(0, 0) = a;
    const CVector f{Complex(0.7, -0.2)};
    const double c = std::pow(1.0 + std::pow(a, p), 1.0 / p);
    const double fa = std::abs(f[0]);
    // Truncated integral of (t^-theta |f| min(c, t))^p dt/t over [lo, hi].
    const double q1 = (1 - theta) * p, q2 = theta * p;
    const double exact =
        fa * std::pow((std::pow(c, q1) - std::pow(lo, q1)) / q1 + std::pow(c, p) * (std::pow(c, -q2) - std::pow(hi, -q2)) / q2,
                      1.0 / p);
    CHECK(kfunctional_norm(f, am, g, theta, p) == doctest::Approx(exact).epsilon(0.01));
    const auto t = log_grid(lo, hi, 50);
    const auto k = kfunctional_values(f, am, g, p, t);
    for (std::size_t j = 0; j < t.size(); ++j) CHECK(k[j] == doctest::Approx(fa * std::min(c, t[j])).epsilon(1e-12));
  }
  const auto gg = SpaceGrid::uniform(12);
  const auto a = build_wentzell_operator(parse("1"), parse("0.5"), gg);
  CVector f(12), f2(12), z(12);
  for (std::size_t j = 0; j < 12; ++j) {
    f[j] = std::sin(3.0 * gg.nodes[j]);
    f2[j] = 2.0 * f[j];
  }
  CHECK(kfunctional_norm(z, a, gg, 0.25, 2.0) == 0.0);
  CHECK(kfunctional_norm(f2, a, gg, 0.25, 2.0) == doctest::Approx(2.0 * kfunctional_norm(f, a, gg, 0.25, 2.0)).epsilon(1e-10));
}

TEST_CASE("mixed norm") {
  const auto g = SpaceGrid::uniform(5);
  auto one = GridFunction::sample(1.0, 101, 5, [](double) { return CVector(5, 1.0); });
  CHECK(mixed_norm(one, g, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mixed_norm(one, g, 3.0) == doctest::Approx(1.0).epsilon(1e-12));
  auto lin = GridFunction::sample(1.0, 1001, 5, [](double t) { return CVector(5, t); });
  CHECK(mixed_norm(lin, g, 2.0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));
  auto scaled = lin;
  scaled *= Complex(0.0, -3.0);
  CHECK(mixed_norm(scaled, g, 2.0) == doctest::Approx(3.0 * mixed_norm(lin, g, 2.0)).epsilon(1e-14));
  CHECK(sup_norm(lin, g, 0.1, 0.9) == doctest::Approx(0.9).epsilon(1e-12));
}
