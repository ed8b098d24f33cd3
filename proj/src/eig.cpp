#include "maglat/eig.hpp"

#include <stdexcept>
#include <string>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace maglat {

HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& A, bool with_vectors) {
    const lapack_int n = static_cast<lapack_int>(A.rows());
    if (A.cols() != A.rows()) throw std::invalid_argument("hermitian_eigen: matrix not square");

    HermitianEigen out;
    out.values.resize(n);
    if (n == 0) return out;

    // zheevd overwrites its input; with jobz='V' the eigenvectors land there
    Eigen::MatrixXcd work = A;
    const char jobz = with_vectors ? 'V' : 'N';
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', n, work.data(), n,
                                     out.values.data());
    if (info != 0)
        throw std::runtime_error("zheevd failed with info = " + std::to_string(info));
    if (with_vectors) out.vectors = std::move(work);
    return out;
}

}  // namespace maglat
