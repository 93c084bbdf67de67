#include "epslab/multiplier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace epslab {

LineGrid LineGrid::make(std::size_t n_x, double L) {
  if (n_x < 4 || (n_x & (n_x - 1)) != 0) throw InvalidArgument("LineGrid: n_x must be a power of two >= 4");
  if (!(L > 0.0)) throw InvalidArgument("LineGrid: L must be positive");
  LineGrid g;
  g.n_x = n_x;
  g.L = L;
  g.dx = 2.0 * L / static_cast<double>(n_x);
  return g;
}

double LineGrid::xi(std::size_t k) const noexcept {
  const double base = 2.0 * std::numbers::pi / (static_cast<double>(n_x) * dx);
  const auto kk = static_cast<double>(k);
  return k <= n_x / 2 ? base * kk : base * (kk - static_cast<double>(n_x));
}

std::vector<double> LineGrid::frequencies() const {
  std::vector<double> f(n_x);
  for (std::size_t k = 0; k < n_x; ++k) f[k] = xi(k);
  return f;
}

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Plans are created once per (size, direction) and reused through the
// new-array execute interface, which is safe to call concurrently.
fftw_plan plan_for(std::size_t n, int sign) {
  static std::map<std::pair<std::size_t, int>, fftw_plan> plans;
  std::lock_guard lock(plan_mutex());
  auto it = plans.find({n, sign});
  if (it != plans.end()) return it->second;
  std::vector<Complex> tmp(n);
  auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.emplace(std::make_pair(n, sign), plan);
  return plan;
}

void fft_columns(std::vector<Complex>& data, std::size_t n_x, std::size_t n, bool inverse) {
  std::vector<Complex> col(n_x);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n_x; ++k) col[k] = data[k * n + j];
    line_fft(col, inverse);
    for (std::size_t k = 0; k < n_x; ++k) data[k * n + j] = col[k];
  }
}

bool is_diagonal(const ComplexMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != Complex(0.0)) return false;
  return true;
}

}  // namespace

void line_fft(std::vector<Complex>& data, bool inverse) {
  const std::size_t n = data.size();
  // e^{+i xi x} forward is FFTW's backward sign.
  fftw_plan plan = plan_for(n, inverse ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
  if (inverse) {
    const double s = 1.0 / static_cast<double>(n);
    for (auto& v : data) v *= s;
  }
}

CVector LineSolution::value(double x) const {
  const double pos = (x - grid.x(0)) / grid.dx;
  if (pos < 0.0 || pos > static_cast<double>(grid.n_x - 1))
    throw InvalidArgument("LineSolution::value: x outside the sampled box");
  std::size_t k = std::min(static_cast<std::size_t>(pos), grid.n_x - 2);
  const double s = pos - static_cast<double>(k);
  CVector v(n);
  if (s == 0.0) {
    std::copy(u.begin() + static_cast<std::ptrdiff_t>(k * n), u.begin() + static_cast<std::ptrdiff_t>((k + 1) * n),
              v.begin());
    return v;
  }
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  for (std::size_t j = 0; j < n; ++j)
    v[j] = h00 * u[k * n + j] + h10 * grid.dx * du[k * n + j] + h01 * u[(k + 1) * n + j] +
           h11 * grid.dx * du[(k + 1) * n + j];
  return v;
}

CVector LineSolution::value_exact(double x) const {
  CVector v(n);
  const double r = x - grid.x(0);
  const std::size_t nyq = grid.n_x / 2;
  for (std::size_t k = 0; k < grid.n_x; ++k) {
    const double xi = grid.xi(k);
    const Complex ph = k == nyq ? Complex(std::cos(xi * r)) : std::polar(1.0, -xi * r);
    for (std::size_t j = 0; j < n; ++j) v[j] += u_hat[k * n + j] * ph;
  }
  for (auto& z : v) z /= static_cast<double>(grid.n_x);
  return v;
}

CVector LineSolution::derivative_exact(double x) const {
  CVector v(n);
  const double r = x - grid.x(0);
  const std::size_t nyq = grid.n_x / 2;
  for (std::size_t k = 0; k < grid.n_x; ++k) {
    const double xi = grid.xi(k);
    const Complex ph = k == nyq ? Complex(-xi * std::sin(xi * r)) : Complex(0.0, -xi) * std::polar(1.0, -xi * r);
    for (std::size_t j = 0; j < n; ++j) v[j] += u_hat[k * n + j] * ph;
  }
  for (auto& z : v) z /= static_cast<double>(grid.n_x);
  return v;
}

std::vector<Complex> sample_zero_extension(const LineGrid& grid, const Forcing& f, double T, std::size_t n) {
  std::vector<Complex> out(grid.n_x * n);
  if (f.is_zero()) return out;
  const double tol = 1e-9 * grid.dx;
  for (std::size_t k = 0; k < grid.n_x; ++k) {
    const double x = grid.x(k);
    if (x < -tol || x > T + tol) continue;
    const bool edge = std::abs(x) <= tol || std::abs(x - T) <= tol;
    const CVector v = f(std::clamp(x, 0.0, T), n);
    for (std::size_t j = 0; j < n; ++j) out[k * n + j] = edge ? 0.5 * v[j] : v[j];
  }
  return out;
}

ComplexMatrix multiplier_symbol(const OperatorPair& pair, double eps, Complex lambda, double xi) {
  ComplexMatrix m = pair.A() + pair.B() * Complex(0.0, -xi);
  m.add_identity(eps * xi * xi + lambda);
  return inverse(m);
}

LineSolution whole_line_solve(const LineGrid& grid, const std::vector<Complex>& fbar, double eps, Complex lambda,
                              const OperatorPair& pair) {
  const std::size_t n = pair.n();
  if (fbar.size() != grid.n_x * n) throw InvalidArgument("whole_line_solve: sample array has the wrong size");
  LineSolution sol;
  sol.grid = grid;
  sol.n = n;
  std::vector<Complex> fhat = fbar;
  fft_columns(fhat, grid.n_x, n, false);

  double total = 0.0, top = 0.0;
  const double xi_max = std::abs(grid.xi(grid.n_x / 2));
  for (std::size_t k = 0; k < grid.n_x; ++k) {
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j) e += std::norm(fhat[k * n + j]);
    total += e;
    if (std::abs(grid.xi(k)) >= 0.95 * xi_max) top += e;
  }
  sol.alias_fraction = total > 0.0 ? top / total : 0.0;
  sol.alias_warning = sol.alias_fraction > 1e-6;

  const bool diag = is_diagonal(pair.A()) && is_diagonal(pair.B());
  sol.u_hat.assign(grid.n_x * n, Complex(0.0));
  sol.du.assign(grid.n_x * n, Complex(0.0));
  for (std::size_t k = 0; k < grid.n_x; ++k) {
    const double xi = grid.xi(k);
    const Complex shift = eps * xi * xi + lambda;
    std::span<const Complex> rhs(fhat.data() + k * n, n);
    CVector uk(n);
    if (diag) {
      for (std::size_t j = 0; j < n; ++j) {
        const Complex den = pair.A()(j, j) + Complex(0.0, -xi) * pair.B()(j, j) + shift;
        if (den == Complex(0.0)) throw SingularMatrix(0.0, 0.0, "whole_line_solve at xi = " + std::to_string(xi));
        uk[j] = rhs[j] / den;
      }
    } else {
      ComplexMatrix m = pair.A() + pair.B() * Complex(0.0, -xi);
      m.add_identity(shift);
      uk = mat_solve(m, rhs);
    }
    const Complex dfac = k == grid.n_x / 2 ? Complex(0.0) : Complex(0.0, -xi);
    for (std::size_t j = 0; j < n; ++j) {
      sol.u_hat[k * n + j] = uk[j];
      sol.du[k * n + j] = dfac * uk[j];
    }
  }
  sol.u = sol.u_hat;
  fft_columns(sol.u, grid.n_x, n, true);
  fft_columns(sol.du, grid.n_x, n, true);
  return sol;
}

std::vector<double> default_xi_grid(double lo_decade, double hi_decade, std::size_t per_side) {
  std::vector<double> xi{0.0};
  for (std::size_t i = 0; i < per_side; ++i) {
    const double v = std::pow(10.0, lo_decade + (hi_decade - lo_decade) * static_cast<double>(i) / (per_side - 1));
    xi.push_back(v);
    xi.push_back(-v);
  }
  std::sort(xi.begin(), xi.end());
  return xi;
}

MultiplierTable multiplier_bound_scan(std::span<const double> eps_list, std::span<const Complex> lambda_list,
                                      const OperatorPair& pair, std::span<const double> xi_grid) {
  MultiplierTable table;
  for (double eps : eps_list) {
    if (!(eps >= 0.0)) throw InvalidArgument("multiplier_bound_scan: eps must be nonnegative");
    for (const Complex& lambda : lambda_list) {
      MultiplierCell cell;
      cell.eps = eps;
      cell.lambda = lambda;
      const double lam = std::abs(lambda);
      try {
        for (double xi : xi_grid) {
          const ComplexMatrix phi = multiplier_symbol(pair, eps, lambda, xi);
          const double nphi = pair.op_norm_E(phi);
          cell.phi_bound = std::max(cell.phi_bound, (1.0 + std::abs(eps * xi * xi + lambda)) * nphi);
          cell.aphi_bound = std::max(cell.aphi_bound, pair.op_norm_E(pair.A() * phi));
          // sigma is a scalar multiple of Phi.
          const double s = lam + std::sqrt(eps * lam) * std::abs(xi) + eps * xi * xi;
          cell.sigma_bound = std::max(cell.sigma_bound, s * nphi);
        }
      } catch (const Error& e) {
        cell.ok = false;
        cell.error = e.what();
      }
      table.cells.push_back(cell);
    }
  }
  const std::size_t nl = lambda_list.size();
  for (std::size_t l = 0; l < nl; ++l) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
      const auto& c = table.cells[e * nl + l];
      if (!c.ok) continue;
      lo = std::min(lo, c.phi_bound);
      hi = std::max(hi, c.phi_bound);
    }
    table.phi_uniformity.push_back(hi > 0.0 ? hi / lo : std::numeric_limits<double>::quiet_NaN());
  }
  return table;
}

}  // namespace epslab
