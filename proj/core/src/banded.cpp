#include "relaxstab/banded.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <cstdlib>

#include "relaxstab/error.hpp"

namespace relaxstab {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      ab_(static_cast<std::size_t>(ldab_) * static_cast<std::size_t>(n), cplx{0.0, 0.0}),
      ipiv_(static_cast<std::size_t>(n)) {
  require(n > 0 && kl >= 0 && ku >= 0, ErrorKind::argument, "invalid banded matrix shape");
}

std::size_t BandedMatrix::index(int row, int col) const {
  require(row >= 0 && row < n_ && col >= 0 && col < n_ && row - col <= kl_ && col - row <= ku_,
          ErrorKind::argument, "banded matrix entry outside the band");
  return static_cast<std::size_t>(col) * static_cast<std::size_t>(ldab_) +
         static_cast<std::size_t>(kl_ + ku_ + row - col);
}

void BandedMatrix::add(int row, int col, cplx value) { ab_[index(row, col)] += value; }
void BandedMatrix::set(int row, int col, cplx value) { ab_[index(row, col)] = value; }

void BandedMatrix::factorize() {
  auto* data = reinterpret_cast<lapack_complex_double*>(ab_.data());
  const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, data, ldab_, ipiv_.data());
  require(info == 0, ErrorKind::numeric,
          "banded LU failed (info=" + std::to_string(info) + "); collocation system is singular");
  factorized_ = true;
}

CVec BandedMatrix::solve(const CVec& rhs, bool adjoint) const {
  require(factorized_, ErrorKind::argument, "banded matrix must be factorized before solving");
  require(rhs.size() == n_, ErrorKind::argument, "right-hand side size mismatch");
  CVec x = rhs;
  auto* b = reinterpret_cast<lapack_complex_double*>(x.data());
  const auto* a = reinterpret_cast<const lapack_complex_double*>(ab_.data());
  const lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, adjoint ? 'C' : 'N', n_, kl_, ku_, 1, a, ldab_,
                                         ipiv_.data(), b, n_);
  require(info == 0, ErrorKind::numeric, "banded triangular solve failed");
  return x;
}

}  // namespace relaxstab
