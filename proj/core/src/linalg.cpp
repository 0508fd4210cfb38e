#include "relaxstab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relaxstab/error.hpp"

namespace relaxstab {

bool all_finite(const Mat& m) { return m.allFinite(); }
bool all_finite(const CMat& m) { return m.allFinite(); }

double spectral_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

double min_singular_value(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double condition_number(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > s(0) * std::numeric_limits<double>::epsilon())) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

CMat hermitian_part(const CMat& m) { return 0.5 * (m + m.adjoint()); }

double min_eig_hermitian_part(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

CMat solve_lyapunov(const CMat& a, const CMat& c) {
  const Eigen::Index n = a.rows();
  require(a.cols() == n && c.rows() == n && c.cols() == n, ErrorKind::argument,
          "Lyapunov equation needs square operands of equal size");
  // vec(A* X + X A) = (I kron A* + A^T kron I) vec(X), column-major vec.
  const Eigen::Index nn = n * n;
  CMat k = CMat::Zero(nn, nn);
  const CMat ah = a.adjoint();
  for (Eigen::Index col = 0; col < n; ++col) {
    for (Eigen::Index row = 0; row < n; ++row) {
      const Eigen::Index r = col * n + row;
      for (Eigen::Index l = 0; l < n; ++l) {
        k(r, col * n + l) += ah(row, l);
        k(r, l * n + row) += a(l, col);
      }
    }
  }
  CVec rhs = Eigen::Map<const CVec>(c.data(), nn);
  Eigen::PartialPivLU<CMat> lu(k);
  CVec x = lu.solve(rhs);
  require(x.allFinite() && (k * x - rhs).norm() <= 1e-8 * (1.0 + rhs.norm()), ErrorKind::numeric,
          "Lyapunov operator is singular (spectra of A* and -A intersect)");
  return Eigen::Map<CMat>(x.data(), n, n);
}

CMat orthonormalize(const CMat& m) {
  Eigen::HouseholderQR<CMat> qr(m);
  CMat q = qr.householderQ() * CMat::Identity(m.rows(), m.cols());
  // Fix the phase so the frame varies continuously with its input.
  const CMat r = q.adjoint() * m;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const cplx d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

EigenDecomposition eigen_decompose(const CMat& m) {
  Eigen::ComplexEigenSolver<CMat> es(m, true);
  require(es.info() == Eigen::Success, ErrorKind::numeric, "complex eigensolver failed");
  EigenDecomposition out{es.eigenvalues(), es.eigenvectors()};
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
    const double nrm = out.vectors.col(j).norm();
    if (nrm > 0.0) out.vectors.col(j) /= nrm;
  }
  return out;
}

double trapezoid(std::span<const double> y, double h) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * h;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return s;
}

PchipInterpolant::PchipInterpolant(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  require(n >= 2 && y_.size() == n, ErrorKind::argument, "PCHIP needs at least two matching samples");
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    require(h[i] > 0.0, ErrorKind::argument, "PCHIP nodes must be strictly increasing");
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  slope_.assign(n, 0.0);
  if (n == 2) {
    slope_[0] = slope_[1] = delta[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      slope_[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      slope_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3.0 * d0)) return 3.0 * d0;
    return d;
  };
  slope_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  slope_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

std::size_t PchipInterpolant::interval(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

double PchipInterpolant::operator()(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * slope_[i] +
         (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * slope_[i + 1];
}

double PchipInterpolant::derivative(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * y_[i] + (-6 * t2 + 6 * t) * y_[i + 1]) / h +
         (3 * t2 - 4 * t + 1) * slope_[i] + (3 * t2 - 2 * t) * slope_[i + 1];
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 of (seed, stream) so neighbouring streams are decorrelated.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return std::mt19937_64(z);
}

}  // namespace relaxstab
