// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>

namespace dstm {

using cplx = std::complex<double>;

// Dense complex matrix, the substrate for codewords, channels and dispersion
// matrices. Everything in this project is at most 8x8, so dynamic-size Eigen
// matrices are plenty fast.
using ComplexMat = Eigen::MatrixXcd;

inline constexpr double kMatEqTol = 1e-10;

/// Entry-wise equality with an absolute tolerance (shapes must match).
inline bool approx_equal(const ComplexMat& a, const ComplexMat& b, double tol = kMatEqTol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    if (a.size() == 0) return true;
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

/// Numeric rank: count of singular values above rel_tol * sigma_max.
inline int numeric_rank(const ComplexMat& a, double rel_tol = 1e-9) {
    Eigen::JacobiSVD<ComplexMat> svd(a);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double cutoff = rel_tol * sv(0);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return r;
}

inline ComplexMat identity(int n) { return ComplexMat::Identity(n, n); }

/// Block anti-diagonal exchange matrix [[0, I], [I, 0]] of size n (n even).
inline ComplexMat exchange_blocks(int n) {
    ComplexMat j = ComplexMat::Zero(n, n);
    const int h = n / 2;
    j.topRightCorner(h, h) = ComplexMat::Identity(h, h);
    j.bottomLeftCorner(h, h) = ComplexMat::Identity(h, h);
    return j;
}

}  // namespace dstm
