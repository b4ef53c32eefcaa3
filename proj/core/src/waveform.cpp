#include "capasim/waveform.hpp"

#include <cmath>
#include <stdexcept>

namespace capasim {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

cd unit_phase(double turns) {
  const double phase = -kTwoPi * turns;
  return {std::cos(phase), std::sin(phase)};
}
}  // namespace

const char* to_string(WaveformKind k) {
  switch (k) {
    case WaveformKind::Ofdm: return "ofdm";
    case WaveformKind::Otfs: return "otfs";
    case WaveformKind::Afdm: return "afdm";
  }
  return "?";
}

WaveformSpec WaveformSpec::ofdm(Eigen::Index n) {
  WaveformSpec s;
  s.kind = WaveformKind::Ofdm;
  s.n = n;
  s.validate();
  return s;
}

WaveformSpec WaveformSpec::otfs(Eigen::Index n1, Eigen::Index n2) {
  WaveformSpec s;
  s.kind = WaveformKind::Otfs;
  s.n = n1 * n2;
  s.n1 = n1;
  s.n2 = n2;
  s.validate();
  return s;
}

WaveformSpec WaveformSpec::afdm(Eigen::Index n, double c1, double c2) {
  WaveformSpec s;
  s.kind = WaveformKind::Afdm;
  s.n = n;
  s.c1 = c1;
  s.c2 = c2;
  s.validate();
  return s;
}

void WaveformSpec::validate() const {
  if (n < 1) throw std::invalid_argument("WaveformSpec: subcarrier count must be >= 1");
  if (kind == WaveformKind::Otfs) {
    if (n1 < 1 || n2 < 1 || n1 * n2 != n)
      throw std::invalid_argument("WaveformSpec: OTFS requires n1 * n2 = n with n1, n2 >= 1");
  }
  if (kind == WaveformKind::Afdm) {
    if (!(c1 > 0.0)) throw std::invalid_argument("WaveformSpec: AFDM requires c1 > 0");
  }
}

ComplexMatrix doppler_matrix(Eigen::Index n, double f) {
  if (n < 1) throw std::invalid_argument("doppler_matrix: n must be >= 1");
  ComplexMatrix z = ComplexMatrix::Zero(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    z(m, m) = unit_phase(f * static_cast<double>(m) / static_cast<double>(n));
  }
  return z;
}

ComplexMatrix afdm_chirp_matrix(Eigen::Index n, double c) {
  if (n < 1) throw std::invalid_argument("afdm_chirp_matrix: n must be >= 1");
  ComplexMatrix lam = ComplexMatrix::Zero(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const double m2 = static_cast<double>(m) * static_cast<double>(m);
    lam(m, m) = unit_phase(c * m2);
  }
  return lam;
}

ComplexMatrix cpp_matrix(Eigen::Index n, double c1, long zeta) {
  if (n < 1) throw std::invalid_argument("cpp_matrix: n must be >= 1");
  if (zeta < 0 || zeta >= n) throw std::invalid_argument("cpp_matrix: require 0 <= zeta < n");
  ComplexMatrix phi = ComplexMatrix::Identity(n, n);
  const double dn = static_cast<double>(n);
  for (long m = 0; m < zeta; ++m) {
    const double arg = c1 * (dn * dn - 2.0 * dn * static_cast<double>(zeta - m));
    phi(m, m) = unit_phase(arg);
  }
  return phi;
}

ComplexMatrix demod_transform(const WaveformSpec& spec) {
  // structural checks only: the degenerate c1 = 0 chirp is allowed here so the
  // AFDM -> OFDM reduction can be evaluated, while validate() stays strict
  if (spec.n < 1) throw std::invalid_argument("demod_transform: subcarrier count must be >= 1");
  if (spec.kind == WaveformKind::Otfs && (spec.n1 < 1 || spec.n2 < 1 || spec.n1 * spec.n2 != spec.n))
    throw std::invalid_argument("demod_transform: OTFS requires n1 * n2 = n");
  switch (spec.kind) {
    case WaveformKind::Ofdm:
      return dft_matrix(spec.n);
    case WaveformKind::Otfs:
      return kron(dft_matrix(spec.n1), ComplexMatrix::Identity(spec.n2, spec.n2));
    case WaveformKind::Afdm:
      return afdm_chirp_matrix(spec.n, spec.c2) * dft_matrix(spec.n) *
             afdm_chirp_matrix(spec.n, spec.c1);
  }
  throw std::invalid_argument("demod_transform: unknown waveform kind");
}

ComplexMatrix time_domain_path_matrix(const WaveformSpec& spec, const NormalizedPath& path) {
  const Eigen::Index n = spec.n;
  if (path.delay_taps < 0 || path.delay_taps >= n)
    throw std::invalid_argument("time_domain_path_matrix: delay must satisfy 0 <= zeta < N");
  ComplexMatrix s = doppler_matrix(n, path.doppler) * cyclic_shift_matrix(n, path.delay_taps);
  if (spec.kind == WaveformKind::Afdm) {
    s = cpp_matrix(n, spec.c1, path.delay_taps) * s;
  }
  return s;
}

namespace {
ComplexMatrix conjugate_by_transform(const WaveformSpec& spec, const NormalizedPath& path) {
  const ComplexMatrix u = demod_transform(spec);
  return u * time_domain_path_matrix(spec, path) * u.adjoint();
}
}  // namespace

ComplexMatrix subcarrier_matrix_ofdm(const WaveformSpec& spec, const NormalizedPath& path) {
  if (spec.kind != WaveformKind::Ofdm)
    throw std::invalid_argument("subcarrier_matrix_ofdm: spec kind is not OFDM");
  return conjugate_by_transform(spec, path);
}

ComplexMatrix subcarrier_matrix_otfs(const WaveformSpec& spec, const NormalizedPath& path) {
  if (spec.kind != WaveformKind::Otfs)
    throw std::invalid_argument("subcarrier_matrix_otfs: spec kind is not OTFS");
  return conjugate_by_transform(spec, path);
}

ComplexMatrix subcarrier_matrix_afdm(const WaveformSpec& spec, const NormalizedPath& path) {
  if (spec.kind != WaveformKind::Afdm)
    throw std::invalid_argument("subcarrier_matrix_afdm: spec kind is not AFDM");
  return conjugate_by_transform(spec, path);
}

ComplexMatrix subcarrier_matrix(const WaveformSpec& spec, const NormalizedPath& path) {
  switch (spec.kind) {
    case WaveformKind::Ofdm: return subcarrier_matrix_ofdm(spec, path);
    case WaveformKind::Otfs: return subcarrier_matrix_otfs(spec, path);
    case WaveformKind::Afdm: return subcarrier_matrix_afdm(spec, path);
  }
  throw std::invalid_argument("subcarrier_matrix: unknown waveform kind");
}

ComplexMatrix assemble_effective_channel(const std::vector<ComplexMatrix>& per_path_mimo,
                                         const std::vector<ComplexMatrix>& per_path_g) {
  if (per_path_mimo.empty() || per_path_mimo.size() != per_path_g.size())
    throw std::invalid_argument("assemble_effective_channel: need equal non-empty path lists");
  const Eigen::Index m = per_path_mimo.front().rows();
  const Eigen::Index n = per_path_g.front().rows();
  ComplexMatrix h = ComplexMatrix::Zero(n * m, n * m);
  for (std::size_t l = 0; l < per_path_mimo.size(); ++l) {
    const ComplexMatrix& hm = per_path_mimo[l];
    const ComplexMatrix& g = per_path_g[l];
    if (hm.rows() != m || hm.cols() != m || g.rows() != n || g.cols() != n)
      throw std::invalid_argument("assemble_effective_channel: inconsistent dimensions");
    h += kron(hm, g);
  }
  return h;
}

ComplexMatrix build_effective_channel(const WaveformSpec& spec,
                                      const std::vector<NormalizedPath>& paths) {
  if (paths.empty()) throw std::invalid_argument("build_effective_channel: empty path list");
  const Eigen::Index n = spec.n;
  // sum_l gain_l * Phi_l Z^{f_l} Pi^{zeta_l}: each term has one nonzero per row,
  // so accumulate entries directly instead of forming L dense products.
  ComplexMatrix inner = ComplexMatrix::Zero(n, n);
  for (const NormalizedPath& p : paths) {
    if (p.delay_taps < 0 || p.delay_taps >= n)
      throw std::invalid_argument("build_effective_channel: delay must satisfy 0 <= zeta < N");
    const double dn = static_cast<double>(n);
    for (Eigen::Index m = 0; m < n; ++m) {
      double turns = p.doppler * static_cast<double>(m) / dn;
      if (spec.kind == WaveformKind::Afdm && m < p.delay_taps) {
        turns += spec.c1 * (dn * dn - 2.0 * dn * static_cast<double>(p.delay_taps - m));
      }
      const Eigen::Index col = (m - p.delay_taps + n) % n;
      const double phase = -kTwoPi * turns;
      inner(m, col) += p.gain * cd(std::cos(phase), std::sin(phase));
    }
  }
  const ComplexMatrix u = demod_transform(spec);
  return u * inner * u.adjoint();
}

double default_afdm_c1(Eigen::Index n, double max_abs_doppler) {
  if (n < 1) throw std::invalid_argument("default_afdm_c1: n must be >= 1");
  const double alpha = std::ceil(std::abs(max_abs_doppler));
  return (2.0 * alpha + 1.0) / (2.0 * static_cast<double>(n));
}

}  // namespace capasim
