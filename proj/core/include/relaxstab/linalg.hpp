#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace relaxstab {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr cplx I_unit{0.0, 1.0};

bool all_finite(const Mat& m);
bool all_finite(const CMat& m);

double spectral_norm(const CMat& m);
double min_singular_value(const CMat& m);
/// 2-norm condition number; +inf for numerically singular input.
double condition_number(const CMat& m);

/// Smallest eigenvalue of the Hermitian part (m + m*)/2.
double min_eig_hermitian_part(const CMat& m);
CMat hermitian_part(const CMat& m);

/// Solves A* X + X A = C for X by vectorization (small dimensions only).
CMat solve_lyapunov(const CMat& a, const CMat& c);

/// Orthonormal basis of the column span (thin QR).
CMat orthonormalize(const CMat& m);

/// Eigen-decomposition of a general complex matrix; columns of vectors are unit length.
struct EigenDecomposition {
  CVec values;
  CMat vectors;
};
EigenDecomposition eigen_decompose(const CMat& m);

/// Fourth-order finite-difference derivative of a uniformly sampled field
/// (central in the interior, one-sided at the two ends on each side).
template <class T>
std::vector<T> differentiate4(const std::vector<T>& f, double h) {
  const std::size_t n = f.size();
  std::vector<T> d(n);
  if (n < 5) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i + 1 < n ? i + 1 : n - 1;
      d[i] = (f[b] - f[a]) / (h * static_cast<double>(b - a));
    }
    return d;
  }
  const double c = 1.0 / (12.0 * h);
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c;
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * c;
  d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * c;
  d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * c;
  return d;
}

/// Cubic (four-point Lagrange) value at the midpoint between nodes i and i+1.
template <class T>
T midpoint4(const std::vector<T>& f, std::size_t i) {
  const std::size_t n = f.size();
  if (n < 4) return (f[i] + f[i + 1]) * 0.5;
  if (i == 0) return (5.0 * f[0] + 15.0 * f[1] - 5.0 * f[2] + f[3]) / 16.0;
  if (i + 2 >= n) return (f[n - 4] - 5.0 * f[n - 3] + 15.0 * f[n - 2] + 5.0 * f[n - 1]) / 16.0;
  return (-f[i - 1] + 9.0 * f[i] + 9.0 * f[i + 1] - f[i + 2]) / 16.0;
}

/// Composite trapezoid rule on a uniform grid.
double trapezoid(std::span<const double> y, double h);
/// Composite trapezoid rule on a general grid.
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Monotone piecewise-cubic (Fritsch-Carlson) interpolant of scalar data.
class PchipInterpolant {
 public:
  PchipInterpolant() = default;
  PchipInterpolant(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::size_t interval(double x) const;

  std::vector<double> x_, y_, slope_;
};

/// Deterministic generator for stream `stream` of a run seeded with `seed`.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

}  // namespace relaxstab
