// linalg.hpp - dense complex matrix kernels shared by all modules.
//
// Thin layer over Eigen: the simulator works with dense complex matrices
// throughout (block sizes stay in the low hundreds), so structure-exploiting
// sparsity is not worth the complexity.

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace capasim {

using cd = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

/// Normalized n-point DFT matrix: entry (k,l) = exp(-j 2 pi k l / n) / sqrt(n).
/// Unitary for every n >= 1. Throws std::invalid_argument for n = 0.
ComplexMatrix dft_matrix(Eigen::Index n);

/// Kronecker product, dims (a.rows*b.rows, a.cols*b.cols).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Forward cyclic shift permutation: row k has its 1 at column (k - shift) mod n,
/// so applying it to a time-domain vector delays the vector by `shift` samples.
/// Any integer shift is accepted and reduced modulo n.
ComplexMatrix cyclic_shift_matrix(Eigen::Index n, long shift);

/// Solves a x = b for Hermitian positive definite a.
/// Throws std::runtime_error when the factorization fails or the residual
/// indicates a (near-)singular system.
ComplexVector hermitian_solve(const ComplexMatrix& a, const ComplexVector& b);

/// || a a^H - I ||_F, used as the unitarity gauge in tests and validation.
double frobenius_distance_to_identity(const ComplexMatrix& a);

}  // namespace capasim
