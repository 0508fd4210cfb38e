#pragma once

#include "relaxstab/resolvent.hpp"

namespace relaxstab::testing {

/// Field with constant G on a uniform grid over [-L, L] (A1 = Id).
inline ResolventField constant_field(const CMat& G, double L = 10.0, std::size_t nodes = 2001) {
  ResolventField f;
  const int n = static_cast<int>(G.rows());
  f.h = 2.0 * L / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) f.grid.push_back(-L + f.h * static_cast<double>(i));
  f.grid.back() = L;
  f.G.assign(nodes, G);
  f.G_mid.assign(nodes - 1, G);
  f.A1inv.assign(nodes, Mat::Identity(n, n));
  f.A1inv_mid.assign(nodes - 1, Mat::Identity(n, n));
  f.G_minus = G;
  f.G_plus = G;
  return f;
}

inline CMat diag2(double a, double b) {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace relaxstab::testing
