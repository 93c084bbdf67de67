#include <cmath>
#include <numbers>

#include "doctest.h"
#include "epslab/elliptic.hpp"

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

// Dirichlet at 0, eps^{1/2} u'(T) at T.
ProblemSpec dn_spec(std::shared_ptr<const OperatorPair> pair, double eps, Complex lambda, CVector f1, CVector f2) {
  ProblemSpec s;
  s.pair = std::move(pair);
  s.eps = eps;
  s.lambda = lambda;
  s.T = 1.0;
  s.bc = BoundaryData::make(0, 1, 1.0, 0.0, 0.0, 1.0, std::move(f1), std::move(f2), 2.0);
  return s;
}

double rel_diff(const GridFunction& a, const GridFunction& b, const SpaceGrid& g) {
  return mixed_norm(a - b, g, 2.0) / mixed_norm(b, g, 2.0);
}

double scalar_closed_form(double x, double k) {
  return (std::exp(-k * x) + std::exp(k * (x - 2.0))) / (1.0 + std::exp(-2.0 * k));
}

}  // namespace

TEST_CASE("Q system: worked values and identities") {
  {
    auto s = dn_spec(scalar_pair(1.0, 0.0), 1.0, 0.0, {1.0}, {0.0});
    const auto q = compute_q_system(s);
    CHECK(std::abs(q.Qlam(0, 0) - 2.0) < 1e-12);
    CHECK(std::abs(q.Q1(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(q.Q2(0, 0) + 1.0) < 1e-12);
  }
  {
    auto s = dn_spec(scalar_pair(1.0, 3.0), 0.25, 0.0, {1.0}, {0.0});
    const auto q = compute_q_system(s);
    CHECK(std::abs(q.Qlam(0, 0) - std::sqrt(10.0)) < 1e-12);
    CHECK(std::abs(q.Q1(0, 0) - 12.32455532033676) < 1e-10);
    CHECK(std::abs(q.Q2(0, 0) + 0.32455532033676) < 1e-10);
  }
  {
    const auto g = SpaceGrid::uniform(2);
    auto pair = std::make_shared<const OperatorPair>(ComplexMatrix::identity(2), ComplexMatrix(2), g, 2.0, "test");
    auto s = dn_spec(pair, 1.0, 3.0, CVector(2), CVector(2));
    const auto q = compute_q_system(s);
    CHECK((q.Qlam - Complex(4.0) * ComplexMatrix::identity(2)).max_abs() < 1e-12);
    CHECK((q.Q1 - Complex(2.0) * ComplexMatrix::identity(2)).max_abs() < 1e-12);
    CHECK((q.Q2 + Complex(2.0) * ComplexMatrix::identity(2)).max_abs() < 1e-12);
  }
  for (double eps : {1.0, 1e-2, 1e-4}) {
    auto s = dn_spec(commuting_pair(16), eps, Complex(2.0, 1.0), CVector(16), CVector(16));
    const auto q = compute_q_system(s);
    const auto& B = s.pair->B();
    CHECK((Complex(eps) * (q.Q1 + q.Q2) - B).max_abs() <= 1e-9 * B.max_abs());
    CHECK((Complex(eps) * (q.Q1 - q.Q2) - q.Qlam).max_abs() <= 1e-9 * q.Qlam.max_abs());
    // eps Q^2 - B Q - A_lambda = 0 for both roots when A and B commute.
    const auto Al = s.pair->A_lambda(s.lambda);
    for (const auto* Q : {&q.Q1, &q.Q2}) {
      const ComplexMatrix r = Complex(eps) * (*Q * *Q) - B * *Q - Al;
      CHECK(op_norm(r) <= 1e-8 * op_norm(Al));
    }
  }
}

TEST_CASE("boundary system: scalar Dirichlet-Neumann closed form") {
  auto s = dn_spec(scalar_pair(1.0, 0.0), 1.0, 0.0, {1.0}, {0.0});
  auto q = solve_boundary_system(s, compute_q_system(s));
  const double g1 = 1.0 / (1.0 + std::exp(-2.0));
  CHECK(std::abs(q.g1[0] - g1) < 1e-12);
  CHECK(std::abs(q.g2[0] - (1.0 - g1)) < 1e-12);
  const auto u = homogeneous_solution(s, q);
  CHECK(std::abs(u(0, 0) - 1.0) < 1e-10);
  for (std::size_t i = 0; i < u.n_t(); ++i)
    CHECK(std::abs(u(i, 0) - (g1 * std::exp(-u.t(i)) + (1 - g1) * std::exp(u.t(i)))) < 1e-10);
  // u'(1) = -g1/e + g2 e
  CHECK(std::abs(-q.g1[0] * std::exp(-1.0) + q.g2[0] * std::exp(1.0)) < 1e-10);

  auto z = dn_spec(scalar_pair(1.0, 0.0), 1.0, 0.0, {0.0}, {0.0});
  const auto qz = solve_boundary_system(z, compute_q_system(z));
  CHECK(qz.g1[0] == Complex(0.0));
  CHECK(qz.g2[0] == Complex(0.0));
  const auto uz = homogeneous_solution(z, qz);
  for (const auto& v : uz.values()) CHECK(v == Complex(0.0));
}

TEST_CASE("homogeneous solution stays finite for thin layers") {
  auto s = dn_spec(commuting_pair(8), 1e-6, 1.0, CVector(8, 1.0), CVector(8, 1.0));
  const auto q = solve_boundary_system(s, compute_q_system(s));
  const auto u = homogeneous_solution(s, q);
  CHECK(u.all_finite());
  for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(u(0, j) - 1.0) < 1e-10);
}

TEST_CASE("homogeneous solution solves the ODE to second order") {
  auto pair = commuting_pair(8);
  auto s = dn_spec(pair, 0.05, Complex(1.0, 0.5), CVector(8, 1.0), CVector(8, Complex(0.0, 2.0)));
  const auto q = solve_boundary_system(s, compute_q_system(s));
  std::vector<double> res;
  for (std::size_t n_t : {101u, 201u, 401u}) {
    const auto u = homogeneous_solution(s, q, n_t);
    const auto d1 = derivative_t(u), d2 = second_derivative_t(u);
    const auto Al = pair->A_lambda(s.lambda);
    double r = 0.0;
    for (std::size_t i = 1; i + 1 < n_t; ++i) {
      const CVector bu = pair->B() * d1.row_copy(i), au = Al * u.row_copy(i);
      CVector v(8);
      for (std::size_t j = 0; j < 8; ++j) v[j] = -s.eps * d2(i, j) + bu[j] + au[j];
      r = std::max(r, pair->e_norm(v));
    }
    res.push_back(r);
  }
  CHECK(std::log2(res[0] / res[1]) > 1.8);
  CHECK(std::log2(res[1] / res[2]) > 1.8);
}

TEST_CASE("direct solve: zero data and scalar closed form") {
  auto z = dn_spec(scalar_pair(1.0, 0.0), 1.0, 0.0, {0.0}, {0.0});
  const auto uz = direct_solve(z);
  for (const auto& v : uz.values()) CHECK(v == Complex(0.0));

  auto s = dn_spec(scalar_pair(1.0, 0.0), 1.0, 0.0, {1.0}, {0.0});
  const auto u = direct_solve(s);
  REQUIRE(u.n_t() == 400);
  double err = 0.0;
  for (std::size_t i = 0; i < u.n_t(); ++i) err = std::max(err, std::abs(u(i, 0) - scalar_closed_form(u.t(i), 1.0)));
  CHECK(err < 1e-6);
}

TEST_CASE("direct solve: manufactured solution, second order in t") {
  const std::size_t n_y = 8;
  auto pair = commuting_pair(n_y);
  const auto& g = pair->grid();
  const double eps = 0.1, pi = std::numbers::pi;
  const Complex lambda(1.0, -1.0);
  CVector Y(n_y);
  for (std::size_t j = 0; j < n_y; ++j) Y[j] = std::pow(g.nodes[j] * (1 - g.nodes[j]), 2);
  const CVector BY = pair->B() * Y, AY = pair->A_lambda(lambda) * Y;
  auto s = dn_spec(pair, eps, lambda, CVector(n_y), CVector(n_y));
  // u* = sin(pi t) Y: u*(0) = 0 and eps^{1/2} u*'(1) = -eps^{1/2} pi Y.
  for (std::size_t j = 0; j < n_y; ++j) s.bc.f2[j] = -std::sqrt(eps) * pi * Y[j];
  s.f = Forcing([=](double t) {
    CVector v(n_y);
    for (std::size_t j = 0; j < n_y; ++j)
      v[j] = eps * pi * pi * std::sin(pi * t) * Y[j] + pi * std::cos(pi * t) * BY[j] + std::sin(pi * t) * AY[j];
    return v;
  });
  std::vector<double> errs;
  for (std::size_t n_t : {41u, 81u, 161u, 321u}) {
    s.n_t = n_t;
    const auto u = direct_solve(s);
    double e = 0.0;
    for (std::size_t i = 0; i < n_t; ++i) {
      CVector d(n_y);
      for (std::size_t j = 0; j < n_y; ++j) d[j] = u(i, j) - std::sin(pi * u.t(i)) * Y[j];
      e = std::max(e, g.e_norm(d));
    }
    errs.push_back(e);
  }
  for (std::size_t k = 1; k < errs.size(); ++k) CHECK(std::log2(errs[k - 1] / errs[k]) > 1.8);
}

TEST_CASE("full solve: scalar closed form through the semigroup path") {
  auto s = dn_spec(scalar_pair(1.0, 0.0), 1.0, 0.0, {1.0}, {0.0});
  const auto r = full_solve(s);
  CHECK(r.path == SolvePath::Semigroup);
  double err = 0.0;
  for (std::size_t i = 0; i < r.u.n_t(); ++i)
    err = std::max(err, std::abs(r.u(i, 0) - scalar_closed_form(r.u.t(i), 1.0)));
  CHECK(err < 1e-8);
}

TEST_CASE("full solve agrees with direct solve on the commuting preset") {
  const std::size_t n_y = 8;
  auto pair = commuting_pair(n_y);
  auto s = dn_spec(pair, 0.05, 1.0, CVector(n_y), CVector(n_y));
  const auto& g = pair->grid();
  s.f = Forcing([g](double t) {
    CVector v(g.n_y);
    const double w = std::pow(std::sin(std::numbers::pi * t), 4);
    for (std::size_t j = 0; j < g.n_y; ++j) v[j] = w * (1.0 + g.nodes[j]);
    return v;
  });
  const auto a = full_solve(s);
  CHECK(a.path == SolvePath::Semigroup);
  CHECK_FALSE(a.alias_warning);
  const auto b = direct_solve(s);
  CHECK(rel_diff(a.u, b, g) <= 1e-4);

  // Boundary rows hold discretely for both.
  for (const auto* u : {&a.u, &b}) {
    const auto [l1, l2] = apply_boundary_operators(s, *u);
    CHECK(g.e_norm(l1) < 1e-4);
    CHECK(g.e_norm(l2) < 1e-4);
  }

  // With boundary data as well.
  s.bc.f1 = CVector(n_y, 1.0);
  s.bc.f2 = CVector(n_y, Complex(0.0, 0.5));
  CHECK(rel_diff(full_solve(s).u, direct_solve(s), g) <= 1e-3);
}

TEST_CASE("full solve: f = 0 reduces to the homogeneous solution; linearity") {
  const std::size_t n_y = 6;
  auto pair = commuting_pair(n_y);
  auto s = dn_spec(pair, 0.2, Complex(3.0, 1.0), CVector(n_y, 1.0), CVector(n_y, -2.0));
  const auto h = homogeneous_solution(s, solve_boundary_system(s, compute_q_system(s)));
  const auto r = full_solve(s);
  CHECK((r.u - h).values() == GridFunction(s.T, s.n_t, n_y).values());

  const auto& g = pair->grid();
  auto f = Forcing([g](double t) {
    CVector v(g.n_y);
    for (std::size_t j = 0; j < g.n_y; ++j) v[j] = std::pow(std::sin(std::numbers::pi * t), 3) * g.nodes[j];
    return v;
  });
  auto gf = Forcing([g](double t) {
    CVector v(g.n_y);
    for (std::size_t j = 0; j < g.n_y; ++j) v[j] = Complex(0.0, 1.0) * std::pow(t * (1 - t), 3);
    return v;
  });
  auto sf = s, sg = s, sfg = s;
  sf.f = f;
  sg.f = gf;
  sg.bc.f1 = sg.bc.f2 = CVector(n_y);
  sfg.f = f.plus(gf);
  const auto uf = full_solve(sf).u, ug = full_solve(sg).u, ufg = full_solve(sfg).u;
  CHECK(mixed_norm(ufg - (uf + ug), g, 2.0) <= 1e-9 * mixed_norm(ufg, g, 2.0));
}

TEST_CASE("full solve falls back to the direct path for non-commuting pairs") {
  const auto g = SpaceGrid::uniform(12);
  PositivityOptions po;
  po.min_decade = 0;
  po.include_zero = false;
  po.phi = 0.25 * std::numbers::pi;
  auto pair = std::make_shared<const OperatorPair>(build_wentzell_operator(parse("1+y"), parse("0.5"), g),
                                                   build_integral_operator(parse("1 + 0.5*y*tau"), g), g, 2.0,
                                                   "wentzell", po);
  REQUIRE_FALSE(pair->commutes());
  auto s = dn_spec(pair, 0.1, 1.0, CVector(12, 1.0), CVector(12));
  const auto r = full_solve(s);
  CHECK(r.path == SolvePath::Direct);
  CHECK(rel_diff(r.u, direct_solve(s), g) == 0.0);
}

TEST_CASE("eps-derivative") {
  auto z = dn_spec(scalar_pair(1.0, 0.0), 0.5, 0.0, {0.0}, {0.0});
  z.n_t = 101;
  const auto dz = epsilon_derivative(z, 1e-3);
  for (const auto& v : dz.first.values()) CHECK(v == Complex(0.0));

  auto s = dn_spec(scalar_pair(1.0, 0.0), 0.5, 0.0, {1.0}, {0.0});
  s.n_t = 101;
  const double eps = s.eps, k = 1.0 / std::sqrt(eps), dk = -0.5 * std::pow(eps, -1.5);
  auto du_deps = [&](double x) {
    const double N = std::exp(-k * x) + std::exp(k * (x - 2.0));
    const double Np = -x * std::exp(-k * x) + (x - 2.0) * std::exp(k * (x - 2.0));
    const double Dn = 1.0 + std::exp(-2.0 * k), Dp = -2.0 * std::exp(-2.0 * k);
    return (Np * Dn - N * Dp) / (Dn * Dn) * dk;
  };
  const auto d = epsilon_derivative(s, 1e-3);
  double err = 0.0;
  for (std::size_t i = 0; i < d.first.n_t(); ++i)
    err = std::max(err, std::abs(d.first(i, 0) - du_deps(d.first.t(i))));
  CHECK(err < 1e-5);

  // Richardson: error of D(delta) against the extrapolated value drops ~4x.
  const double delta = 0.04;
  const auto d1 = epsilon_derivative(s, delta).first, d2 = epsilon_derivative(s, delta / 2).first;
  const auto d4 = epsilon_derivative(s, delta / 4).first;
  const std::size_t i = 60;
  const Complex x1 = (4.0 * d2(i, 0) - d1(i, 0)) / 3.0, x2 = (4.0 * d4(i, 0) - d2(i, 0)) / 3.0;
  const double ratio = std::abs(d1(i, 0) - x1) / std::abs(d2(i, 0) - x2);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}
