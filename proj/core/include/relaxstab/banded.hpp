#pragma once

#include <vector>

#include "relaxstab/linalg.hpp"

namespace relaxstab {

/// Complex banded matrix with LU factorization (partial pivoting, LAPACK gbtrf).
class BandedMatrix {
 public:
  BandedMatrix(int n, int kl, int ku);

  int size() const { return n_; }
  void add(int row, int col, cplx value);
  void set(int row, int col, cplx value);

  /// Factorizes in place; throws numeric error if singular.
  void factorize();
  bool factorized() const { return factorized_; }

  /// Solves A x = b (or A^H x = b when `adjoint`) for a factorized matrix.
  CVec solve(const CVec& rhs, bool adjoint = false) const;

 private:
  std::size_t index(int row, int col) const;

  int n_, kl_, ku_, ldab_;
  std::vector<cplx> ab_;
  std::vector<int> ipiv_;
  bool factorized_ = false;
};

}  // namespace relaxstab
