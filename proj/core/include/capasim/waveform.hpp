// waveform.hpp - per-path subcarrier-domain matrices for OFDM, OTFS and AFDM,
// and assembly of the full effective block channel.
//
// All three waveforms share the same structure: the time-domain per-path
// operator S = Phi Z^f Pi^zeta (chirp-prefix phases, Doppler ramp, cyclic
// delay) conjugated by a unitary demodulation transform U:
//   OFDM:  U = F_N
//   OTFS:  U = F_{N1} (x) I_{N2}          (N1 * N2 = N)
//   AFDM:  U = Lambda_2 F_N Lambda_1      (Lambda_c = diag exp(-j 2 pi c m^2))
// The effective channel is H = sum_l Hhat_l (x) (U S_l U^H).

#pragma once

#include <vector>

#include "capasim/linalg.hpp"

namespace capasim {

enum class WaveformKind { Ofdm, Otfs, Afdm };

const char* to_string(WaveformKind k);

struct WaveformSpec {
  WaveformKind kind = WaveformKind::Ofdm;
  Eigen::Index n = 0;        // subcarrier count N
  Eigen::Index n1 = 0;       // OTFS factorization, n1 * n2 = n
  Eigen::Index n2 = 0;
  double c1 = 0.0;           // AFDM chirp rates
  double c2 = 0.0;

  static WaveformSpec ofdm(Eigen::Index n);
  static WaveformSpec otfs(Eigen::Index n1, Eigen::Index n2);
  static WaveformSpec afdm(Eigen::Index n, double c1, double c2 = 0.0);

  /// Throws std::invalid_argument on inconsistent parameters.
  void validate() const;
};

/// One propagation path reduced to sampled-block quantities: integer delay
/// taps and (possibly fractional) Doppler in cycles per N-sample block.
struct NormalizedPath {
  cd gain = cd(1.0, 0.0);
  long delay_taps = 0;       // zeta, 0 <= zeta < N
  double doppler = 0.0;      // f, cycles per block
};

/// Diagonal Doppler ramp Z^f: entry (m,m) = exp(-j 2 pi f m / n).
ComplexMatrix doppler_matrix(Eigen::Index n, double f);

/// Diagonal chirp Lambda_c: entry (m,m) = exp(-j 2 pi c m^2).
ComplexMatrix afdm_chirp_matrix(Eigen::Index n, double c);

/// Chirp-periodic-prefix phase correction Phi for AFDM:
/// entry (m,m) = exp(-j 2 pi c1 (n^2 - 2 n (zeta - m))) for m < zeta, else 1.
/// Identity when c1 = 0 or zeta = 0.
ComplexMatrix cpp_matrix(Eigen::Index n, double c1, long zeta);

/// Unitary demodulation transform U for the given waveform.
ComplexMatrix demod_transform(const WaveformSpec& spec);

/// Time-domain per-path operator S = Phi Z^f Pi^zeta (Phi = I except AFDM).
ComplexMatrix time_domain_path_matrix(const WaveformSpec& spec, const NormalizedPath& path);

ComplexMatrix subcarrier_matrix_ofdm(const WaveformSpec& spec, const NormalizedPath& path);
ComplexMatrix subcarrier_matrix_otfs(const WaveformSpec& spec, const NormalizedPath& path);
ComplexMatrix subcarrier_matrix_afdm(const WaveformSpec& spec, const NormalizedPath& path);

/// Dispatch on spec.kind.
ComplexMatrix subcarrier_matrix(const WaveformSpec& spec, const NormalizedPath& path);

/// H = sum_l per_path_mimo[l] (x) per_path_g[l], dimension (N M) x (N M).
/// Throws std::invalid_argument on list-length or dimension mismatch.
ComplexMatrix assemble_effective_channel(const std::vector<ComplexMatrix>& per_path_mimo,
                                         const std::vector<ComplexMatrix>& per_path_g);

/// Single-stream fast path: H = U (sum_l gain_l S_l) U^H, avoiding L separate
/// dense conjugations. Equal to assemble_effective_channel with 1x1 gains.
ComplexMatrix build_effective_channel(const WaveformSpec& spec,
                                      const std::vector<NormalizedPath>& paths);

/// Default AFDM chirp rate c1 = (2 ceil(f_max) + 1) / (2 n), the standard
/// choice that keeps paths separable in the chirp domain.
double default_afdm_c1(Eigen::Index n, double max_abs_doppler);

}  // namespace capasim
