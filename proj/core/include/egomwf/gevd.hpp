#pragma once

#include <Eigen/Core>
#include <cstddef>

#include "egomwf/stft.hpp"

namespace egomwf {

using RealVector = Eigen::VectorXd;

// Lower-triangular L with positive real diagonal and L L^H = a. Reads the
// lower triangle only. Throws NotPositiveDefinite on a non-positive pivot.
ComplexMatrix cholesky(const ComplexMatrix& a);

// L^{-1} b and L^{-H} b for lower-triangular L.
ComplexMatrix solve_lower(const ComplexMatrix& l, const ComplexMatrix& b);
ComplexMatrix solve_lower_adjoint(const ComplexMatrix& l, const ComplexMatrix& b);

struct HermitianEigen {
  RealVector values;     // descending
  ComplexMatrix vectors;  // unitary, columns match values
  std::size_t sweeps = 0;
};

// Cyclic complex Jacobi. Deterministic: fixed pair order, stable descending
// sort, and each eigenvector's largest-magnitude entry made real positive.
HermitianEigen hermitian_eig(const ComplexMatrix& a, std::size_t max_sweeps = 10000);

// Joint diagonalization r_yy = Q diag(sigma_y) Q^H, r_nn = Q diag(sigma_n) Q^H
// computed by whitening with the Cholesky factor of r_nn. With this
// construction sigma_n is all ones, so sorting by sigma_y is sorting by ratio.
struct PencilDecomposition {
  ComplexMatrix q;
  ComplexMatrix q_inv_h;  // Q^{-H}; its columns are the right generalized eigenvectors
  RealVector sigma_y;
  RealVector sigma_n;

  std::size_t size() const noexcept { return static_cast<std::size_t>(q.rows()); }
  double ratio(std::size_t i) const {
    return sigma_y(static_cast<Eigen::Index>(i)) / sigma_n(static_cast<Eigen::Index>(i));
  }
};

PencilDecomposition gevd(const ComplexMatrix& r_yy, const ComplexMatrix& r_nn);

}  // namespace egomwf
