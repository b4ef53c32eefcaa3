#include "capasim/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace capasim {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

ComplexMatrix dft_matrix(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("dft_matrix: n must be >= 1");
  ComplexMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      // reduce k*l mod n before the trig call to keep the argument small
      const double phase = -kTwoPi * static_cast<double>((k * l) % n) / static_cast<double>(n);
      f(k, l) = scale * cd(std::cos(phase), std::sin(phase));
    }
  }
  return f;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix cyclic_shift_matrix(Eigen::Index n, long shift) {
  if (n < 1) throw std::invalid_argument("cyclic_shift_matrix: n must be >= 1");
  long s = shift % n;
  if (s < 0) s += n;
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    p(k, (k - s + n) % n) = cd(1.0, 0.0);
  }
  return p;
}

ComplexVector hermitian_solve(const ComplexMatrix& a, const ComplexVector& b) {
  if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_solve: matrix not square");
  if (a.rows() != b.size()) throw std::invalid_argument("hermitian_solve: dimension mismatch");
  Eigen::LLT<ComplexMatrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_solve: factorization failed (matrix not positive definite?)");
  }
  ComplexVector x = llt.solve(b);
  const double residual = (a * x - b).norm();
  if (!(residual <= 1e-6 * b.norm() + 1e-12)) {
    throw std::runtime_error("hermitian_solve: residual too large, system near-singular");
  }
  return x;
}

double frobenius_distance_to_identity(const ComplexMatrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("frobenius_distance_to_identity: matrix not square");
  ComplexMatrix g = a * a.adjoint();
  g.diagonal().array() -= cd(1.0, 0.0);
  return g.norm();
}

}  // namespace capasim
