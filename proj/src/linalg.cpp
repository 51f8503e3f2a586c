#include "dpbalm/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace dpbalm {

Mat Mat::identity(int n) {
  Mat I(n, n);
  for (int i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

bool Mat::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

double vdot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vdot: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double vnorm(const Vec& a) { return std::sqrt(vdot(a, a)); }

Vec vsub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vsub: size mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec vadd(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vadd: size mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec vscale(double a, const Vec& x) {
  Vec r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = a * x[i];
  return r;
}

void axpy(double a, const Vec& x, Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vec matvec(const Mat& A, const Vec& x) {
  if (static_cast<int>(x.size()) != A.cols)
    throw std::invalid_argument("matvec: size mismatch");
  Vec y(A.rows, 0.0);
  for (int i = 0; i < A.rows; ++i) {
    const double* row = &A.data[static_cast<size_t>(i) * A.cols];
    double s = 0.0;
    for (int j = 0; j < A.cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vec matTvec(const Mat& A, const Vec& x) {
  if (static_cast<int>(x.size()) != A.rows)
    throw std::invalid_argument("matTvec: size mismatch");
  Vec y(A.cols, 0.0);
  for (int i = 0; i < A.rows; ++i) {
    const double* row = &A.data[static_cast<size_t>(i) * A.cols];
    const double xi = x[i];
    for (int j = 0; j < A.cols; ++j) y[j] += row[j] * xi;
  }
  return y;
}

void add_scaled_gram_outer(Mat& M, const Mat& A, double scale) {
  if (M.rows != A.rows || M.cols != A.rows)
    throw std::invalid_argument("add_scaled_gram_outer: size mismatch");
  const int m = A.rows, n = A.cols;
  for (int i = 0; i < m; ++i) {
    const double* ri = &A.data[static_cast<size_t>(i) * n];
    for (int j = i; j < m; ++j) {
      const double* rj = &A.data[static_cast<size_t>(j) * n];
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += ri[k] * rj[k];
      M(i, j) += scale * s;
      if (j != i) M(j, i) = M(i, j);
    }
  }
}

CholFactor cholesky(const Mat& M) {
  if (M.rows != M.cols) throw std::invalid_argument("cholesky: not square");
  if (!M.all_finite()) throw std::invalid_argument("cholesky: non-finite entries");
  const int n = M.rows;
  Mat L(n, n);
  for (int j = 0; j < n; ++j) {
    double d = M(j, j);
    for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > 0.0))
      throw std::runtime_error("cholesky: matrix is not positive definite");
    const double ljj = std::sqrt(d);
    L(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = M(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / ljj;
    }
  }
  return CholFactor{std::move(L)};
}

Vec CholFactor::solve(const Vec& r) const {
  const int n = L.rows;
  if (static_cast<int>(r.size()) != n)
    throw std::invalid_argument("CholFactor::solve: size mismatch");
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    double s = r[i];
    for (int k = 0; k < i; ++k) s -= L(i, k) * y[k];
    y[i] = s / L(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= L(k, i) * y[k];
    y[i] = s / L(i, i);
  }
  return y;
}

Vec CholFactor::apply(const Vec& v) const {
  const int n = L.rows;
  if (static_cast<int>(v.size()) != n)
    throw std::invalid_argument("CholFactor::apply: size mismatch");
  Vec t(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) t[i] += L(k, i) * v[k];
  Vec y(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= i; ++k) y[i] += L(i, k) * t[k];
  return y;
}

CholFactor factor_metric(const Mat& A, double beta, double delta) {
  if (beta <= 0.0 || delta <= 0.0)
    throw std::invalid_argument("factor_metric: beta and delta must be positive");
  if (!A.all_finite())
    throw std::invalid_argument("factor_metric: non-finite entries in A");
  Mat M(A.rows, A.rows);
  add_scaled_gram_outer(M, A, 1.0 / beta);
  for (int i = 0; i < A.rows; ++i) M(i, i) += delta;
  return cholesky(M);
}

Vec metric_solve(const CholFactor& F, const Vec& r) { return F.solve(r); }

namespace {

SpectralEstimate power_iterate(int n, const auto& apply_op, double tol,
                               int max_iter) {
  Vec v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double rayleigh = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Vec av = apply_op(v);
    const double next = vdot(v, av);
    const double nn = vnorm(av);
    if (nn == 0.0) return {0.0, true, it};
    for (size_t i = 0; i < v.size(); ++i) v[i] = av[i] / nn;
    if (it > 1 && std::abs(next - rayleigh) <= tol * (1.0 + std::abs(next)))
      return {next, true, it};
    rayleigh = next;
  }
  return {rayleigh, false, max_iter};
}

}  // namespace

SpectralEstimate spectral_radius_gram(const Mat& A, double tol, int max_iter) {
  if (A.rows == 0 || A.cols == 0)
    throw std::invalid_argument("spectral_radius_gram: empty matrix");
  if (tol <= 0.0) throw std::invalid_argument("spectral_radius_gram: tol <= 0");
  return power_iterate(
      A.cols, [&](const Vec& v) { return matTvec(A, matvec(A, v)); }, tol,
      max_iter);
}

SpectralEstimate spectral_radius_sym(const Mat& M, double tol, int max_iter) {
  if (M.rows != M.cols)
    throw std::invalid_argument("spectral_radius_sym: not square");
  return power_iterate(
      M.rows, [&](const Vec& v) { return matvec(M, v); }, tol, max_iter);
}

uint64_t Rng::next_u64() {
  // SplitMix64
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::next_uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::next_normal() {
  if (cached_normal) {
    const double v = *cached_normal;
    cached_normal.reset();
    return v;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * M_PI * u2;
  cached_normal = rad * std::sin(ang);
  return rad * std::cos(ang);
}

Vec gauss_sample(Rng& rng, int count) {
  if (count < 0) throw std::invalid_argument("gauss_sample: negative count");
  Vec out(count);
  for (int i = 0; i < count; ++i) out[i] = rng.next_normal();
  return out;
}

}  // namespace dpbalm
