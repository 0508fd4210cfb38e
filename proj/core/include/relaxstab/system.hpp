#pragma once

#include <functional>
#include <string>

#include "relaxstab/linalg.hpp"

namespace relaxstab {

/// A relaxation system  w_t + sum_j (f^j(w))_{x_j} = r(w)  with analytic Jacobians.
///
/// Flux indices are zero-based: direction j = 0 is the wave-normal direction x_1.
struct SystemSpec {
  std::string name;
  int n = 0;  // state dimension
  int d = 1;  // space dimension

  std::function<Vec(const Vec& w, int j)> flux;
  std::function<Mat(const Vec& w, int j)> flux_jac;
  std::function<Vec(const Vec& w)> relax;
  std::function<Mat(const Vec& w)> relax_jac;
  /// Optional equilibrium predicate; defaults to |r(w)| <= 1e-10.
  std::function<bool(const Vec& w)> equilibria;
  /// Optional Friedrichs symmetrizer candidate A0(w) used by the Kawashima check.
  std::function<Mat(const Vec& w)> symmetrizer;
  int smoothness_order = 3;

  /// A_j(w); throws an evaluation error naming j if an entry is not finite.
  Mat jacobian(const Vec& w, int j) const;
  /// A_1(w) - s Id, the wave-normal Jacobian in the frame moving with speed s.
  Mat comoving_jacobian(const Vec& w, double s) const;
  /// dr/dw(w), finiteness-checked.
  Mat relaxation_jacobian(const Vec& w) const;
  Vec source(const Vec& w) const;
  bool is_equilibrium(const Vec& w, double tol = 1e-10) const;
  /// Directional derivative (dA_j/dw)[dir], by central differences of the analytic Jacobian.
  Mat jacobian_derivative(const Vec& w, const Vec& dir, int j) const;
  /// Zero-order coefficient E = -dr/dw(w) + (d^2 f_1/dw^2)(., w_x) along a profile.
  Mat zero_order(const Vec& w, const Vec& wx) const;
};

}  // namespace relaxstab
