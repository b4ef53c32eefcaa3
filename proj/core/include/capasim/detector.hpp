// detector.hpp - GaBP symbol detection with LMMSE and exhaustive-ML baselines.
//
// The GaBP receiver runs soft interference cancellation, extrinsic belief
// generation, Bayes-optimal QPSK denoising and damping on an N x M message
// grid, then a consensus readout. All per-edge updates follow a Jacobi
// schedule (every edge updated from the previous iteration's state), which is
// what makes the vectorized O(N M) formulation below exact.

#pragma once

#include <vector>

#include "capasim/linalg.hpp"

namespace capasim {

struct GaBPConfig {
  int iterations = 20;         // i_G
  double damping = 0.5;        // beta_c in (0,1)
  double symbol_power = 1.0;   // E_C
  double noise_variance = 0.0; // sigma_w^2

  void validate() const;       // throws std::invalid_argument
};

/// Per-iteration message snapshot, filled when tracing is requested.
struct GaBPIterate {
  ComplexMatrix sic_signal;      // y-tilde
  RealMatrix sic_variance;       // sigma-tilde^2
  ComplexMatrix belief_mean;     // c-bar (0 on no-information edges)
  RealMatrix belief_variance;    // sigma-bar^2 (E_C sentinel on no-information edges)
  ComplexMatrix replica;         // c-hat, post damping
  RealMatrix replica_variance;   // sigma-hat^2, post damping
};

/// Soft interference cancellation:
///   sic(n,m)     = y(n) - sum_{e != m} h(n,e) replicas(n,e)
///   sic_var(n,m) = sum_{e != m} |h(n,e)|^2 variances(n,e) + noise_var
/// Variances are floored at max(noise_var, 1e-30) so that noiseless
/// configurations stay divisible.
void sic_update(const ComplexVector& y, const ComplexMatrix& h, const ComplexMatrix& replicas,
                const RealMatrix& variances, double noise_var, ComplexMatrix& sic,
                RealMatrix& sic_var);

/// Extrinsic means/variances (exclude row n when estimating edge (n,m)):
///   var(n,m)  = ( sum_{e != n} |h(e,m)|^2 / sic_var(e,m) )^-1
///   mean(n,m) = var(n,m) * sum_{e != n} conj(h(e,m)) sic(e,m) / sic_var(e,m)
/// Zero-precision edges get the no-information sentinel (mean 0, variance
/// symbol_power).
void belief_update(const ComplexMatrix& sic, const RealMatrix& sic_var, const ComplexMatrix& h,
                   double symbol_power, ComplexMatrix& mean, RealMatrix& var);

/// Bayes-optimal QPSK denoiser, q = sqrt(E_C/2):
///   q * ( tanh(2 q Re(b)/v) + j tanh(2 q Im(b)/v) )
cd qpsk_denoise(cd belief, double belief_var, double symbol_power);

/// E_C - |replica|^2, in [0, E_C].
double mse_update(cd replica, double symbol_power);

/// Convex blend beta*new + (1-beta)*old.
template <typename T>
T damp(const T& next, const T& prev, double beta) {
  return beta * next + (1.0 - beta) * prev;
}

/// Consensus readout with full (non-excluding) sums over rows.
ComplexVector consensus(const ComplexMatrix& sic, const RealMatrix& sic_var,
                        const ComplexMatrix& h);

/// Full GaBP detection. Pure function of (y, h, cfg). When trace is non-null
/// it receives one GaBPIterate per iteration.
ComplexVector gabp_detect(const ComplexVector& y, const ComplexMatrix& h, const GaBPConfig& cfg,
                          std::vector<GaBPIterate>* trace = nullptr);

/// LMMSE baseline: c = E_C H^H (E_C H H^H + sigma^2 I)^-1 y.
ComplexVector lmmse_detect(const ComplexVector& y, const ComplexMatrix& h, double noise_variance,
                           double symbol_power);

/// Same estimator computed the textbook way: unblocked triple-loop Gram build,
/// explicit Gauss-Jordan matrix inversion, then two matrix-vector products.
/// The O(N^3) comparator for complexity measurements.
ComplexVector lmmse_detect_naive(const ComplexVector& y, const ComplexMatrix& h,
                                 double noise_variance, double symbol_power);

/// Exhaustive maximum-likelihood search over all QPSK vectors.
/// Throws std::invalid_argument for dimensions above 12 (4^N blowup guard).
ComplexVector ml_oracle(const ComplexVector& y, const ComplexMatrix& h, double symbol_power);

/// Gray QPSK mapping: bit pair (b0,b1) -> q ((1-2 b0) + j (1-2 b1)).
/// Throws std::invalid_argument for odd bit counts.
ComplexVector qpsk_map(const std::vector<int>& bits, double symbol_power);

/// Sign-based demapping (hard decision).
std::vector<int> qpsk_demap(const ComplexVector& symbols);

/// Snap soft estimates to the nearest QPSK point.
ComplexVector qpsk_hard(const ComplexVector& symbols, double symbol_power);

long count_bit_errors(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace capasim
