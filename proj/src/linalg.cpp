#include "epslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

namespace epslab {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, Complex fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> d) {
  ComplexMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  ComplexMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw InvalidArgument("from_rows: ragged rows");
    std::size_t j = 0;
    for (const auto& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

CVector ComplexMatrix::column(std::size_t j) const {
  CVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void ComplexMatrix::set_column(std::size_t j, std::span<const Complex> v) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

void ComplexMatrix::set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b) {
  for (std::size_t i = 0; i < b.rows(); ++i)
    std::copy(b.row(i).begin(), b.row(i).end(), data_.begin() + static_cast<std::ptrdiff_t>((r0 + i) * cols_ + c0));
}

ComplexMatrix ComplexMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  ComplexMatrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = std::conj((*this)(i, j));
  return t;
}

Complex ComplexMatrix::trace() const {
  Complex s = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

double ComplexMatrix::norm_1() const {
  double best = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double ComplexMatrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (const auto& v : row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double ComplexMatrix::norm_fro() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw InvalidArgument("matrix sum: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw InvalidArgument("matrix difference: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexMatrix& ComplexMatrix::add_identity(Complex s) {
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) (*this)(i, i) += s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("matrix product: shape mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  const std::size_t nb = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex* ci = c.data() + i * nb;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex(0.0)) continue;
      const Complex* bk = b.data() + k * nb;
      for (std::size_t j = 0; j < nb; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

CVector operator*(const ComplexMatrix& a, std::span<const Complex> x) {
  if (a.cols() != x.size()) throw InvalidArgument("matrix-vector product: shape mismatch");
  CVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s = 0.0;
    const Complex* ai = a.data() + i * a.cols();
    for (std::size_t j = 0; j < x.size(); ++j) s += ai[j] * x[j];
    y[i] = s;
  }
  return y;
}

double norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

void axpy(Complex a, std::span<const Complex> x, std::span<Complex> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

// ---------------------------------------------------------------- LU

LuFactorization::LuFactorization(ComplexMatrix m, double pivot_tol) : lu_(std::move(m)) {
  if (!lu_.is_square()) throw InvalidArgument("LU: matrix must be square");
  const std::size_t n = lu_.rows();
  const double scale = lu_.norm_inf();
  const double threshold = pivot_tol * scale;
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  min_pivot_ = n ? std::numeric_limits<double>::infinity() : 0.0;
  if (!lu_.all_finite()) throw SingularMatrix(std::nan(""), threshold, "LU: non-finite entries");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    min_pivot_ = std::min(min_pivot_, best);
    if (!(best > threshold) || best == 0.0) throw SingularMatrix(best, threshold);
    if (p != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
      std::swap(perm_[k], perm_[p]);
    }
    const Complex inv = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      Complex& lik = lu_(i, k);
      if (lik == Complex(0.0)) continue;
      lik *= inv;
      const Complex f = lik;
      Complex* ri = lu_.data() + i * n;
      const Complex* rk = lu_.data() + k * n;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= f * rk[j];
    }
  }
}

CVector LuFactorization::solve(std::span<const Complex> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw InvalidArgument("LU solve: size mismatch");
  CVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    Complex s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    Complex s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

ComplexMatrix LuFactorization::solve(const ComplexMatrix& b) const {
  const std::size_t n = lu_.rows();
  if (b.rows() != n) throw InvalidArgument("LU solve: size mismatch");
  const std::size_t m = b.cols();
  ComplexMatrix x(n, m);
  for (std::size_t i = 0; i < n; ++i) std::copy(b.row(perm_[i]).begin(), b.row(perm_[i]).end(), x.row(i).begin());
  for (std::size_t i = 0; i < n; ++i) {
    Complex* xi = x.data() + i * m;
    for (std::size_t j = 0; j < i; ++j) {
      const Complex l = lu_(i, j);
      if (l == Complex(0.0)) continue;
      const Complex* xj = x.data() + j * m;
      for (std::size_t c = 0; c < m; ++c) xi[c] -= l * xj[c];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    Complex* xi = x.data() + i * m;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex u = lu_(i, j);
      if (u == Complex(0.0)) continue;
      const Complex* xj = x.data() + j * m;
      for (std::size_t c = 0; c < m; ++c) xi[c] -= u * xj[c];
    }
    const Complex inv = 1.0 / lu_(i, i);
    for (std::size_t c = 0; c < m; ++c) xi[c] *= inv;
  }
  return x;
}

ComplexMatrix LuFactorization::inverse() const { return solve(ComplexMatrix::identity(lu_.rows())); }

double LuFactorization::log_abs_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < lu_.rows(); ++i) s += std::log(std::abs(lu_(i, i)));
  return s;
}

ComplexMatrix mat_solve(const ComplexMatrix& m, const ComplexMatrix& rhs) { return LuFactorization(m).solve(rhs); }
CVector mat_solve(const ComplexMatrix& m, std::span<const Complex> rhs) { return LuFactorization(m).solve(rhs); }
ComplexMatrix inverse(const ComplexMatrix& m) { return LuFactorization(m).inverse(); }

// ---------------------------------------------------------------- sqrtm

ComplexMatrix sqrtm(const ComplexMatrix& m, const SqrtmOptions& opts) {
  if (!m.is_square()) throw InvalidArgument("sqrtm: matrix must be square");
  const std::size_t n = m.rows();
  const double mnorm = m.norm_fro();
  if (n == 0 || mnorm == 0.0) return ComplexMatrix(n);
  if (n == 1) {
    const Complex v = m(0, 0);
    if (v.imag() == 0.0 && v.real() < 0.0) throw SqrtNotConverged(0, std::abs(v));
    ComplexMatrix r(1);
    r(0, 0) = std::sqrt(v);
    return r;
  }

  ComplexMatrix y = m;
  ComplexMatrix z = ComplexMatrix::identity(n);
  bool scaling = true;
  double prev_change = std::numeric_limits<double>::infinity();
  int it = 0;
  auto residual_of = [&](const ComplexMatrix& s) { return (s * s - m).norm_fro() / mnorm; };
  try {
    for (; it < opts.max_iterations; ++it) {
      LuFactorization luy(y, 1e-15);
      LuFactorization luz(z, 1e-15);
      double mu = 1.0;
      if (scaling) {
        mu = std::exp(-(luy.log_abs_det() + luz.log_abs_det()) / (2.0 * static_cast<double>(n)));
        if (!std::isfinite(mu) || mu <= 0.0) mu = 1.0;
      }
      ComplexMatrix yinv = luy.inverse();
      ComplexMatrix zinv = luz.inverse();
      ComplexMatrix y_next = 0.5 * (mu * y + (1.0 / mu) * zinv);
      ComplexMatrix z_next = 0.5 * (mu * z + (1.0 / mu) * yinv);
      const double change = (y_next - y).norm_fro() / y_next.norm_fro();
      y = std::move(y_next);
      z = std::move(z_next);
      if (!y.all_finite()) break;
      if (change < 1e-2) scaling = false;
      if (change < 1e-15 * std::sqrt(static_cast<double>(n))) break;
      // Quadratic convergence stalls at round-off; stop once the step no
      // longer shrinks.
      if (!scaling && change < 1e-10 && change >= prev_change) break;
      prev_change = scaling ? std::numeric_limits<double>::infinity() : change;
    }
  } catch (const SingularMatrix&) {
    throw SqrtNotConverged(it, std::numeric_limits<double>::infinity());
  }
  const double res = y.all_finite() ? residual_of(y) : std::numeric_limits<double>::infinity();
  if (!(res <= opts.residual_tol)) throw SqrtNotConverged(it, res);
  return y;
}

// ---------------------------------------------------------------- expm

namespace {

constexpr double kTheta[] = {1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
                             2.097847961257068e0, 5.371920351148152e0};

ComplexMatrix pade_low(const ComplexMatrix& a, const std::vector<double>& b, const ComplexMatrix& a2) {
  // U = A * sum b[odd] A^(k-1), V = sum b[even] A^k, powers of A2.
  const std::size_t n = a.rows();
  const std::size_t m = b.size() - 1;
  ComplexMatrix u = ComplexMatrix::identity(n) * b[1];
  ComplexMatrix v = ComplexMatrix::identity(n) * b[0];
  ComplexMatrix p = ComplexMatrix::identity(n);
  for (std::size_t k = 2; k <= m; k += 2) {
    p = p * a2;
    u += p * b[k + 1];
    v += p * b[k];
  }
  u = a * u;
  return LuFactorization(v - u).solve(v + u);
}

}  // namespace

ComplexMatrix expm(const ComplexMatrix& m, const ExpmOptions& opts) {
  if (!m.is_square()) throw InvalidArgument("expm: matrix must be square");
  const std::size_t n = m.rows();
  if (!m.all_finite()) throw Overflow("expm: non-finite input");
  const double norm = m.norm_1();
  if (norm > opts.norm_cap) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "expm: ||M||_1 = %.3e exceeds cap %.3e", norm, opts.norm_cap);
    throw Overflow(buf);
  }
  if (n == 0) return m;
  const ComplexMatrix a2 = m * m;
  if (norm <= kTheta[0]) return pade_low(m, {120., 60., 12., 1.}, a2);
  if (norm <= kTheta[1]) return pade_low(m, {30240., 15120., 3360., 420., 30., 1.}, a2);
  if (norm <= kTheta[2])
    return pade_low(m, {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.}, a2);
  if (norm <= kTheta[3])
    return pade_low(m,
                    {17643225600., 8821612800., 2075673600., 302702400., 30270240., 2162160., 110880.,
                     3960., 90., 1.},
                    a2);

  static constexpr double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                                 1187353796428800.,  129060195264000.,   10559470521600.,
                                 670442572800.,      33522128640.,       1323241920.,
                                 40840800.,          960960.,            16380.,
                                 182.,               1.};
  int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta[4]))));
  const double scale = std::ldexp(1.0, -s);
  ComplexMatrix a = m * scale;
  const ComplexMatrix A2 = a * a;
  const ComplexMatrix A4 = A2 * A2;
  const ComplexMatrix A6 = A4 * A2;
  const ComplexMatrix I = ComplexMatrix::identity(n);
  ComplexMatrix u = A6 * (A6 * b[13] + A4 * b[11] + A2 * b[9]) + A6 * b[7] + A4 * b[5] + A2 * b[3] + I * b[1];
  u = a * u;
  ComplexMatrix v = A6 * (A6 * b[12] + A4 * b[10] + A2 * b[8]) + A6 * b[6] + A4 * b[4] + A2 * b[2] + I * b[0];
  ComplexMatrix r = LuFactorization(v - u).solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  if (!r.all_finite()) throw Overflow("expm: result overflowed");
  return r;
}

// ---------------------------------------------------------------- op_norm

double op_norm(const ComplexMatrix& m, const OpNormOptions& opts) {
  const std::size_t n = m.cols();
  if (n == 0 || m.rows() == 0) return 0.0;
  if (m.rows() == 1 || n == 1) return m.norm_fro();
  if (m.norm_fro() == 0.0) return 0.0;
  // Deterministic start vector with no special alignment.
  CVector v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(i + 1);
    v[i] = Complex(1.0 + 0.5 * std::sin(1.3 * k), 0.3 * std::cos(0.7 * k));
  }
  double nv = norm2(v);
  for (auto& z : v) z /= nv;
  const ComplexMatrix mh = m.adjoint();
  double sigma = 0.0;
  // Plain power iteration on M^* M first; it stalls when the top singular
  // values cluster, and then we iterate with (M^* M)^{64} instead.
  constexpr int kPlain = 50;
  int it = 0;
  for (; it < std::min(kPlain, opts.max_iterations); ++it) {
    const CVector w = m * v;
    const double s_new = norm2(w);
    CVector z = mh * w;
    const double nz = norm2(z);
    if (nz == 0.0) return s_new;
    for (auto& c : z) c /= nz;
    v = std::move(z);
    if (it >= 2 && std::abs(s_new - sigma) <= opts.rel_tol * s_new) return std::max(s_new, sigma);
    sigma = s_new;
  }
  ComplexMatrix h = mh * m;
  for (int k = 0; k < 6; ++k) {
    h = h * h;
    const double nh = h.norm_fro();
    if (!(nh > 0.0) || !std::isfinite(nh)) break;
    h *= Complex(1.0 / nh);
  }
  for (; it < opts.max_iterations; ++it) {
    CVector z = h * v;
    const double nz = norm2(z);
    if (nz == 0.0 || !std::isfinite(nz)) break;
    for (auto& c : z) c /= nz;
    v = std::move(z);
    const double s_new = norm2(m * v);
    if (std::abs(s_new - sigma) <= opts.rel_tol * s_new) return std::max(s_new, sigma);
    sigma = std::max(sigma, s_new);
  }
  return sigma;
}

// ---------------------------------------------------------------- positivity

std::vector<Complex> sector_samples(double phi, int kmin, int kmax, bool include_zero) {
  std::vector<Complex> out;
  if (include_zero) out.emplace_back(0.0);
  const double angles[] = {0.0, 0.5 * phi, -0.5 * phi, phi, -phi};
  for (int k = kmin; k <= kmax; ++k) {
    const double r = std::pow(10.0, k);
    for (double a : angles) {
      if (a != 0.0 && phi == 0.0) continue;
      out.push_back(std::polar(r, a));
    }
  }
  return out;
}

SectorialityReport check_positivity(const ComplexMatrix& a, double phi, std::span<const Complex> lambda_samples,
                                    double cap) {
  if (!a.is_square()) throw InvalidArgument("check_positivity: matrix must be square");
  if (!(phi >= 0.0 && phi < std::numbers::pi)) throw InvalidArgument("check_positivity: phi must lie in [0, pi)");
  SectorialityReport rep;
  rep.phi = phi;
  rep.cap = cap;
  rep.passed = true;
  for (const Complex& lam : lambda_samples) {
    if (lam != Complex(0.0) && std::abs(std::arg(lam)) > phi + 1e-12)
      throw InvalidArgument("check_positivity: sample outside the sector");
    ComplexMatrix shifted = a;
    shifted.add_identity(lam);
    double value;
    try {
      value = (1.0 + std::abs(lam)) * op_norm(inverse(shifted));
    } catch (const SingularMatrix&) {
      value = std::numeric_limits<double>::infinity();
    }
    rep.samples.push_back({lam, value});
    rep.bound_M = std::max(rep.bound_M, value);
  }
  rep.passed = rep.bound_M <= cap;
  return rep;
}

// ---------------------------------------------------------------- block tridiagonal

std::vector<CVector> solve_block_tridiagonal(const std::vector<ComplexMatrix>& lower,
                                             const std::vector<ComplexMatrix>& diag,
                                             const std::vector<ComplexMatrix>& upper,
                                             const std::vector<CVector>& rhs) {
  const std::size_t m = diag.size();
  if (lower.size() != m || upper.size() != m || rhs.size() != m)
    throw InvalidArgument("block tridiagonal: inconsistent block counts");
  std::vector<ComplexMatrix> x_coupling(m);
  std::vector<CVector> y(m);
  ComplexMatrix d = diag[0];
  CVector r = rhs[0];
  for (std::size_t i = 0; i < m; ++i) {
    LuFactorization lu(d);
    y[i] = lu.solve(r);
    if (i + 1 == m) break;
    x_coupling[i] = lu.solve(upper[i]);
    d = diag[i + 1] - lower[i + 1] * x_coupling[i];
    r = rhs[i + 1];
    const CVector ly = lower[i + 1] * y[i];
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= ly[k];
  }
  std::vector<CVector> x(m);
  x[m - 1] = y[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) {
    x[i] = y[i];
    const CVector c = x_coupling[i] * x[i + 1];
    for (std::size_t k = 0; k < c.size(); ++k) x[i][k] -= c[k];
  }
  return x;
}

}  // namespace epslab
