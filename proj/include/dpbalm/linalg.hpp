#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace dpbalm {

using Vec = std::vector<double>;

// Dense row-major matrix.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int i, int j) {
    return data[static_cast<size_t>(i) * cols + j];
  }
  double operator()(int i, int j) const {
    return data[static_cast<size_t>(i) * cols + j];
  }

  static Mat identity(int n);
  bool all_finite() const;
};

// Vector helpers.
double vdot(const Vec& a, const Vec& b);
double vnorm(const Vec& a);
Vec vsub(const Vec& a, const Vec& b);
Vec vadd(const Vec& a, const Vec& b);
Vec vscale(double a, const Vec& x);
void axpy(double a, const Vec& x, Vec& y);  // y += a*x

Vec matvec(const Mat& A, const Vec& x);
Vec matTvec(const Mat& A, const Vec& x);

// M += scale * A * A^T  (M must be rows(A) x rows(A))
void add_scaled_gram_outer(Mat& M, const Mat& A, double scale);

// Cholesky factor of an SPD matrix: M = L L^T, L lower triangular.
struct CholFactor {
  Mat L;

  // Solves M y = r by forward/back substitution.
  Vec solve(const Vec& r) const;
  // Applies M v = L (L^T v) without storing M.
  Vec apply(const Vec& v) const;
  int dim() const { return L.rows; }
};

// Throws std::runtime_error if M is not positive definite.
CholFactor cholesky(const Mat& M);

// Factor of the dual metric M = (1/beta) A A^T + delta I.
CholFactor factor_metric(const Mat& A, double beta, double delta);
Vec metric_solve(const CholFactor& F, const Vec& r);

struct SpectralEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Largest eigenvalue of A^T A by power iteration (all-ones start,
// relative Rayleigh-quotient tolerance).
SpectralEstimate spectral_radius_gram(const Mat& A, double tol = 1e-10,
                                      int max_iter = 10000);

// Largest eigenvalue of a symmetric matrix M by power iteration.
SpectralEstimate spectral_radius_sym(const Mat& M, double tol = 1e-10,
                                     int max_iter = 10000);

// SplitMix64 stream with a Box-Muller normal cache.
struct Rng {
  uint64_t state;
  std::optional<double> cached_normal;

  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next_u64();
  double next_uniform();  // strictly inside (0, 1)
  double next_normal();
};

Vec gauss_sample(Rng& rng, int count);

}  // namespace dpbalm
