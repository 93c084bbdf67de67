#include "epslab/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace epslab {

GridFunction::GridFunction(double T, std::size_t n_t, std::size_t n_y)
    : T_(T), n_t_(n_t), n_y_(n_y), values_(n_t * n_y) {
  if (n_t < 3) throw InvalidArgument("GridFunction: n_t must be at least 3");
  if (!(T > 0.0)) throw InvalidArgument("GridFunction: T must be positive");
}

bool GridFunction::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  if (o.n_t_ != n_t_ || o.n_y_ != n_y_) throw InvalidArgument("GridFunction: shape mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  if (o.n_t_ != n_t_ || o.n_y_ != n_y_) throw InvalidArgument("GridFunction: shape mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

GridFunction& GridFunction::operator*=(Complex s) {
  for (auto& v : values_) v *= s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }

GridFunction GridFunction::sample(double T, std::size_t n_t, std::size_t n_y,
                                  const std::function<CVector(double)>& f) {
  GridFunction g(T, n_t, n_y);
  for (std::size_t i = 0; i < n_t; ++i) {
    const CVector v = f(g.t(i));
    if (v.size() != n_y) throw InvalidArgument("GridFunction::sample: wrong vector size");
    std::copy(v.begin(), v.end(), g.row(i).begin());
  }
  return g;
}

GridFunction GridFunction::restrict_to(std::size_t coarse_n_t) const {
  if (coarse_n_t < 3 || (n_t_ - 1) % (coarse_n_t - 1) != 0)
    throw InvalidArgument("GridFunction::restrict_to: grids are not nested");
  const std::size_t k = (n_t_ - 1) / (coarse_n_t - 1);
  GridFunction c(T_, coarse_n_t, n_y_);
  for (std::size_t i = 0; i < coarse_n_t; ++i) std::copy(row(i * k).begin(), row(i * k).end(), c.row(i).begin());
  return c;
}

GridFunction derivative_t(const GridFunction& u) {
  const std::size_t n = u.n_t(), m = u.n_y();
  const double h = u.dt();
  GridFunction d(u.T(), n, m);
  for (std::size_t j = 0; j < m; ++j) {
    d(0, j) = (-3.0 * u(0, j) + 4.0 * u(1, j) - u(2, j)) / (2.0 * h);
    d(n - 1, j) = (3.0 * u(n - 1, j) - 4.0 * u(n - 2, j) + u(n - 3, j)) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d(i, j) = (u(i + 1, j) - u(i - 1, j)) / (2.0 * h);
  }
  return d;
}

GridFunction second_derivative_t(const GridFunction& u) {
  const std::size_t n = u.n_t(), m = u.n_y();
  if (n < 4) throw InvalidArgument("second_derivative_t: need at least 4 nodes");
  const double h2 = u.dt() * u.dt();
  GridFunction d(u.T(), n, m);
  for (std::size_t j = 0; j < m; ++j) {
    d(0, j) = (2.0 * u(0, j) - 5.0 * u(1, j) + 4.0 * u(2, j) - u(3, j)) / h2;
    d(n - 1, j) = (2.0 * u(n - 1, j) - 5.0 * u(n - 2, j) + 4.0 * u(n - 3, j) - u(n - 4, j)) / h2;
    for (std::size_t i = 1; i + 1 < n; ++i) d(i, j) = (u(i + 1, j) - 2.0 * u(i, j) + u(i - 1, j)) / h2;
  }
  return d;
}

Forcing Forcing::from_grid(GridFunction g) {
  auto shared = std::make_shared<const GridFunction>(std::move(g));
  return Forcing([shared](double t) {
    const GridFunction& s = *shared;
    const double pos = std::clamp(t / s.dt(), 0.0, static_cast<double>(s.n_t() - 1));
    const std::size_t i = std::min(static_cast<std::size_t>(pos), s.n_t() - 2);
    const double w = pos - static_cast<double>(i);
    CVector v(s.n_y());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = (1.0 - w) * s(i, j) + w * s(i + 1, j);
    return v;
  });
}

Forcing Forcing::scaled(Complex s) const {
  if (!f_) return {};
  auto f = f_;
  return Forcing([f, s](double t) {
    CVector v = f(t);
    for (auto& z : v) z *= s;
    return v;
  });
}

Forcing Forcing::plus(const Forcing& o) const {
  if (!f_) return o;
  if (!o.f_) return *this;
  auto a = f_, b = o.f_;
  return Forcing([a, b](double t) {
    CVector v = a(t);
    const CVector w = b(t);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += w[k];
    return v;
  });
}

}  // namespace epslab
