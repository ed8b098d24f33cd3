#pragma once

// Thin wrapper over LAPACK zheevd for Hermitian eigenproblems. Eigenvalues
// come back ascending; eigenvectors (when requested) are the columns of V.

#include <Eigen/Dense>

#include <complex>

namespace maglat {

struct HermitianEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;  // empty unless requested
};

// A is Hermitian (only the lower triangle is referenced).
HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& A, bool with_vectors);

}  // namespace maglat
