// Acceptance suite: one PASS/FAIL line per claim, nonzero exit on any failure.
//
// Every check is deterministic (fixed seeds), so a result reproduces exactly
// across runs and machines with the same toolchain.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "capasim/channel.hpp"
#include "capasim/detector.hpp"
#include "capasim/linalg.hpp"
#include "capasim/rng.hpp"
#include "capasim/sim.hpp"
#include "capasim/waveform.hpp"

using namespace capasim;

namespace {

int g_failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s - %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ComplexMatrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.cgaussian();
  return m;
}

ComplexVector random_qpsk(Rng& rng, Eigen::Index n, double ec) {
  std::vector<int> bits(static_cast<std::size_t>(2 * n));
  for (auto& b : bits) b = rng.bernoulli() ? 1 : 0;
  return qpsk_map(bits, ec);
}

// ---------------------------------------------------------------------------
// 1. Unitarity of the per-path subcarrier matrices and the AFDM transform.

void check_unitarity() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0.0;
  for (const int n : {16, 64, 144}) {
    const int n1 = (n == 16) ? 4 : (n == 64) ? 8 : 12;
    const double c1 = default_afdm_c1(n, 2.5);
    const std::vector<WaveformSpec> specs = {WaveformSpec::ofdm(n), WaveformSpec::otfs(n1, n / n1),
                                             WaveformSpec::afdm(n, c1, 0.003)};
    for (int rep = 0; rep < 8; ++rep) {
      NormalizedPath p;
      p.delay_taps = static_cast<long>(rng.next_u64() % static_cast<std::uint64_t>(n));
      p.doppler = rng.uniform(-3.0, 3.0);  // deliberately fractional
      for (const WaveformSpec& spec : specs) {
        worst = std::max(worst, frobenius_distance_to_identity(subcarrier_matrix(spec, p)));
      }
    }
    worst = std::max(worst, frobenius_distance_to_identity(demod_transform(specs[2])));
  }
  const double elapsed = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "worst ||G G^H - I||_F = %.3e (tol 1e-10), %.1f s (budget 10 s)",
                worst, elapsed);
  report(worst < 1e-10 && elapsed < 10.0, "unitarity", buf);
}

// ---------------------------------------------------------------------------
// 2. Structural identities of the subcarrier matrices.

void check_structure() {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  double worst_ofdm = 0.0;
  {
    const int n = 64;
    const WaveformSpec spec = WaveformSpec::ofdm(n);
    for (const long zeta : {1L, 7L, 33L}) {
      NormalizedPath p;
      p.delay_taps = zeta;
      const ComplexMatrix g = subcarrier_matrix(spec, p);
      for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index l = 0; l < n; ++l) {
          const cd expected = (k == l) ? cd(std::cos(-kTwoPi * zeta * k / n),
                                            std::sin(-kTwoPi * zeta * k / n))
                                       : cd(0, 0);
          worst_ofdm = std::max(worst_ofdm, std::abs(g(k, l) - expected));
        }
      }
    }
  }

  double worst_afdm = 0.0;
  {
    WaveformSpec flat;  // degenerate AFDM, bypasses the c1 > 0 config rule
    flat.kind = WaveformKind::Afdm;
    flat.n = 64;
    const WaveformSpec ofdm = WaveformSpec::ofdm(64);
    Rng rng(7);
    for (int rep = 0; rep < 6; ++rep) {
      NormalizedPath p;
      p.delay_taps = static_cast<long>(rng.next_u64() % 64ULL);
      p.doppler = rng.uniform(-2.0, 2.0);
      const ComplexMatrix u = demod_transform(flat);
      const ComplexMatrix ga = u * time_domain_path_matrix(flat, p) * u.adjoint();
      worst_afdm = std::max(
          worst_afdm, (ga - subcarrier_matrix(ofdm, p)).cwiseAbs().maxCoeff());
    }
  }

  double worst_otfs = 0.0;
  {
    const WaveformSpec spec = WaveformSpec::otfs(1, 48);
    Rng rng(11);
    for (int rep = 0; rep < 6; ++rep) {
      NormalizedPath p;
      p.delay_taps = static_cast<long>(rng.next_u64() % 48ULL);
      p.doppler = rng.uniform(-2.0, 2.0);
      const ComplexMatrix expected =
          doppler_matrix(48, p.doppler) * cyclic_shift_matrix(48, p.delay_taps);
      worst_otfs = std::max(
          worst_otfs, (subcarrier_matrix(spec, p) - expected).cwiseAbs().maxCoeff());
    }
  }

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "ofdm diag %.3e (tol 1e-10), afdm c1=c2=0 vs ofdm %.3e (tol 1e-12), otfs n1=1 "
                "%.3e (tol 1e-12)",
                worst_ofdm, worst_afdm, worst_otfs);
  report(worst_ofdm < 1e-10 && worst_afdm < 1e-12 && worst_otfs < 1e-12, "structure", buf);
}

// ---------------------------------------------------------------------------
// 3. GaBP at desk scale: noiseless recovery, ML proximity, traced messages.

void check_gabp_noiseless() {
  GaBPConfig cfg;
  cfg.noise_variance = snr_to_noise_variance(60.0, cfg.symbol_power);
  const Eigen::Index n = 64;
  long errors = 0, symbols = 0;
  for (int rep = 0; rep < 200; ++rep) {  // 12800 symbols
    Rng rng(3000 + static_cast<std::uint64_t>(rep));
    const ComplexMatrix raw = random_matrix(rng, n, n);
    Eigen::HouseholderQR<ComplexMatrix> qr(raw);
    const ComplexMatrix h = qr.householderQ();
    const ComplexVector c = random_qpsk(rng, n, cfg.symbol_power);
    errors += count_bit_errors(qpsk_demap(c), qpsk_demap(gabp_detect(h * c, h, cfg)));
    symbols += n;
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%ld bit errors over %ld symbols at 60 dB (require 0, >= 1e4)",
                errors, symbols);
  report(errors == 0 && symbols >= 10000, "gabp-noiseless-recovery", buf);
}

void check_gabp_vs_ml() {
  // small blocks of the actual simulated channel, paired seeds for both detectors
  SimConfig cfg;
  cfg.subcarriers = 4;
  cfg.r_max_m = 100.0;  // keeps delays inside the 4-sample block
  const int trials = 2000;
  long gabp_errors = 0, ml_errors = 0, bits = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t seed = derive_seed(17, 0, static_cast<std::uint64_t>(t));
    cfg.detector = DetectorKind::Gabp;
    const TrialResult g = run_trial(cfg, 20.0, seed);
    cfg.detector = DetectorKind::Ml;
    const TrialResult m = run_trial(cfg, 20.0, seed);
    gabp_errors += g.bit_errors;
    ml_errors += m.bit_errors;
    bits += g.bits_total;
  }
  const double gabp_ber = static_cast<double>(gabp_errors) / bits;
  const double ml_ber = static_cast<double>(ml_errors) / bits;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "N=4, 20 dB, %d trials: BER gabp %.5f vs ml %.5f (allow +0.01 absolute)", trials,
                gabp_ber, ml_ber);
  report(gabp_ber <= ml_ber + 0.01, "gabp-vs-ml", buf);
}

// Independent scalar message-passing reference, explicit exclusion sums.
struct ScalarGabp {
  ComplexMatrix replicas, sic, belief_mean;
  RealMatrix variances, sic_var, belief_var;

  ScalarGabp(Eigen::Index rows, Eigen::Index cols, double ec)
      : replicas(ComplexMatrix::Zero(rows, cols)),
        sic(rows, cols),
        belief_mean(rows, cols),
        variances(RealMatrix::Constant(rows, cols, ec)),
        sic_var(rows, cols),
        belief_var(rows, cols) {}

  void iterate(const ComplexVector& y, const ComplexMatrix& h, const GaBPConfig& cfg) {
    const Eigen::Index rows = h.rows(), cols = h.cols();
    const double ec = cfg.symbol_power;
    const double q = std::sqrt(ec / 2.0);
    for (Eigen::Index n = 0; n < rows; ++n) {
      for (Eigen::Index m = 0; m < cols; ++m) {
        cd acc = y(n);
        double var_acc = cfg.noise_variance;
        for (Eigen::Index e = 0; e < cols; ++e) {
          if (e == m) continue;
          acc -= h(n, e) * replicas(n, e);
          var_acc += std::norm(h(n, e)) * variances(n, e);
        }
        sic(n, m) = acc;
        sic_var(n, m) = std::max(var_acc, std::max(cfg.noise_variance, 1e-30));
      }
    }
    for (Eigen::Index n = 0; n < rows; ++n) {
      for (Eigen::Index m = 0; m < cols; ++m) {
        double precision = 0.0;
        cd num(0, 0);
        for (Eigen::Index e = 0; e < rows; ++e) {
          if (e == n) continue;
          precision += std::norm(h(e, m)) / sic_var(e, m);
          num += std::conj(h(e, m)) * sic(e, m) / sic_var(e, m);
        }
        if (precision > 1e-300) {
          belief_var(n, m) = 1.0 / precision;
          belief_mean(n, m) = num / precision;
        } else {
          belief_var(n, m) = ec;
          belief_mean(n, m) = cd(0, 0);
        }
      }
    }
    for (Eigen::Index n = 0; n < rows; ++n) {
      for (Eigen::Index m = 0; m < cols; ++m) {
        const cd denoised =
            cd(q * std::tanh(2.0 * q * belief_mean(n, m).real() / belief_var(n, m)),
               q * std::tanh(2.0 * q * belief_mean(n, m).imag() / belief_var(n, m)));
        const double mse = ec - std::norm(denoised);
        replicas(n, m) = cfg.damping * denoised + (1.0 - cfg.damping) * replicas(n, m);
        variances(n, m) = cfg.damping * mse + (1.0 - cfg.damping) * variances(n, m);
      }
    }
  }
};

void check_gabp_trace() {
  GaBPConfig cfg;
  cfg.iterations = 10;
  cfg.noise_variance = 0.05;
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    Rng rng(500 + static_cast<std::uint64_t>(rep));
    const ComplexMatrix h = random_matrix(rng, 2, 2);
    const ComplexVector c = random_qpsk(rng, 2, cfg.symbol_power);
    const ComplexVector y = h * c + 0.3 * random_matrix(rng, 2, 1);
    std::vector<GaBPIterate> trace;
    gabp_detect(y, h, cfg, &trace);
    // per-iteration comparison: the oracle advances from the library's
    // previous state, so every update rule is checked at full precision
    // without compounding last-ulp drift across iterations
    ScalarGabp oracle(2, 2, cfg.symbol_power);
    for (int it = 0; it < cfg.iterations; ++it) {
      oracle.iterate(y, h, cfg);
      const GaBPIterate& s = trace[static_cast<std::size_t>(it)];
      worst = std::max({worst, (s.sic_signal - oracle.sic).cwiseAbs().maxCoeff(),
                        (s.sic_variance - oracle.sic_var).cwiseAbs().maxCoeff(),
                        (s.belief_mean - oracle.belief_mean).cwiseAbs().maxCoeff(),
                        (s.belief_variance - oracle.belief_var).cwiseAbs().maxCoeff(),
                        (s.replica - oracle.replicas).cwiseAbs().maxCoeff(),
                        (s.replica_variance - oracle.variances).cwiseAbs().maxCoeff()});
      oracle.replicas = s.replica;
      oracle.variances = s.replica_variance;
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "worst per-message deviation %.3e over 20 runs (tol 1e-12)",
                worst);
  report(worst < 1e-12, "gabp-trace-vs-scalar", buf);
}

// ---------------------------------------------------------------------------
// 4. Complexity: quadratic per-iteration scaling, speedup over the cubic solve.

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

void check_complexity() {
  const auto t0 = std::chrono::steady_clock::now();
  GaBPConfig cfg;
  cfg.iterations = 20;
  cfg.noise_variance = 0.05;

  auto per_iteration_time = [&](Eigen::Index n) {
    Rng rng(600 + static_cast<std::uint64_t>(n));
    const ComplexMatrix h = random_matrix(rng, n, n);
    const ComplexVector y = random_matrix(rng, n, 1);
    gabp_detect(y, h, cfg);  // warm-up
    std::vector<double> times;
    for (int rep = 0; rep < 7; ++rep) {
      const auto s = std::chrono::steady_clock::now();
      gabp_detect(y, h, cfg);
      times.push_back(seconds_since(s) / cfg.iterations);
    }
    return median(times);
  };

  const double t128 = per_iteration_time(128);
  const double t256 = per_iteration_time(256);
  const double ratio = t256 / t128;

  // total-runtime comparison at the larger simulated block size
  Rng rng(601);
  const ComplexMatrix h = random_matrix(rng, 144, 144);
  const ComplexVector y = random_matrix(rng, 144, 1);
  gabp_detect(y, h, cfg);
  lmmse_detect_naive(y, h, 0.05, 1.0);
  std::vector<double> tg, tl;
  for (int rep = 0; rep < 7; ++rep) {
    auto s = std::chrono::steady_clock::now();
    gabp_detect(y, h, cfg);
    tg.push_back(seconds_since(s));
    s = std::chrono::steady_clock::now();
    lmmse_detect_naive(y, h, 0.05, 1.0);
    tl.push_back(seconds_since(s));
  }
  const double speedup = median(tl) / median(tg);
  const double elapsed = seconds_since(t0);

  char buf[220];
  std::snprintf(buf, sizeof(buf),
                "per-iteration ratio 128->256 = %.2f (require [3,6]); naive-LMMSE/GaBP runtime at "
                "N=144 = %.1fx (require >= 5); %.1f s (budget 120 s)",
                ratio, speedup, elapsed);
  report(ratio >= 3.0 && ratio <= 6.0 && speedup >= 5.0 && elapsed < 120.0, "complexity", buf);
}

// ---------------------------------------------------------------------------
// 5. BER curve ordering at Table-I parameters.

struct CurveSet {
  // [waveform][snr point] error counts and bits
  std::vector<std::vector<BERRecord>> continuous;
  std::vector<std::vector<BERRecord>> discrete;
};

CurveSet run_curves(int subcarriers, int trials) {
  SimConfig cfg;
  cfg.subcarriers = subcarriers;
  cfg.trials = trials;
  cfg.seed = 1;
  CurveSet out;
  for (const WaveformKind wf : {WaveformKind::Ofdm, WaveformKind::Otfs, WaveformKind::Afdm}) {
    cfg.waveform = wf;
    cfg.array_mode = ArrayMode::Continuous;
    out.continuous.push_back(sweep(cfg));
    cfg.array_mode = ArrayMode::Discrete;
    out.discrete.push_back(sweep(cfg));
  }
  return out;
}

void check_ber_ordering(int subcarriers, int trials, const char* label) {
  const CurveSet curves = run_curves(subcarriers, trials);
  const std::size_t points = curves.continuous[0].size();

  // (a) continuous <= discrete wherever the discrete curve is resolvable
  bool array_ok = true;
  std::string array_detail;
  for (std::size_t w = 0; w < 3; ++w) {
    for (std::size_t p = 0; p < points; ++p) {
      const BERRecord& disc = curves.discrete[w][p];
      const BERRecord& cont = curves.continuous[w][p];
      if (disc.ber > 1e-4 && cont.ber > disc.ber) {
        array_ok = false;
        char buf[120];
        std::snprintf(buf, sizeof(buf), " [violated: %s @%g dB cont %.3e > disc %.3e]",
                      to_string(disc.waveform), disc.snr_db, cont.ber, disc.ber);
        array_detail += buf;
      }
    }
  }

  // (b) OTFS and AFDM beat OFDM at the two highest grid points. A point only
  // enters the comparison when the OFDM reference accumulated at least 200
  // bit errors there: below that a 25% BER gap stays under ~2.5 sigma even
  // with the paired per-trial seeding, so strict ordering cannot be asserted
  // either way. At least one curve pair must remain comparable.
  bool wf_ok = true;
  int compared = 0;
  std::string wf_detail;
  for (int mode = 0; mode < 2; ++mode) {
    const auto& family = (mode == 0) ? curves.continuous : curves.discrete;
    for (std::size_t p = points - 2; p < points; ++p) {
      const BERRecord& ofdm = family[0][p];
      if (ofdm.bit_errors < 200) continue;
      ++compared;
      for (std::size_t w = 1; w < 3; ++w) {
        const BERRecord& alt = family[w][p];
        char buf[140];
        std::snprintf(buf, sizeof(buf), " [%s/%s @%g dB: %ld vs ofdm %ld]",
                      to_string(alt.array_mode), to_string(alt.waveform), alt.snr_db,
                      alt.bit_errors, ofdm.bit_errors);
        wf_detail += buf;
        if (alt.bit_errors >= ofdm.bit_errors) wf_ok = false;
      }
    }
  }
  if (compared == 0) wf_ok = false;

  char head[160];
  std::snprintf(head, sizeof(head), "array clause %s;%s waveform clause over %d resolvable points:",
                array_ok ? "holds at every resolvable point" : "violated", array_detail.c_str(),
                compared);
  report(array_ok && wf_ok, std::string("ber-ordering-") + label, head + wf_detail);
}

// ---------------------------------------------------------------------------
// 6. Quadrature fidelity of the aperture coupling integrals.

void check_quadrature() {
  SimConfig table;
  const ScenarioGeometry geo = table.scenario_geometry();
  const double lambda = geo.wavelength();
  Rng rng(71);

  double worst_rel = 0.0;
  int evaluated = 0;
  while (evaluated < 100) {
    const std::vector<Path> paths = sample_paths(geo, rng);
    const CurrentDesign j_tx = matched_current(geo.tx, paths[0], Side::Tx);
    const CurrentDesign j_rx = matched_current(geo.rx, paths[0], Side::Rx);
    for (const Path& path : paths) {
      QuadratureGrid g10, g20;
      g20.tx_x = g20.tx_z = g20.rx_x = g20.rx_z = 20;
      const cd h10 = effective_path_matrix_capa(j_tx, j_rx, path, g10, geo.tx, geo.rx, lambda)(0, 0);
      const cd h20 = effective_path_matrix_capa(j_tx, j_rx, path, g20, geo.tx, geo.rx, lambda)(0, 0);
      worst_rel = std::max(worst_rel, std::abs(h10 - h20) / std::abs(h20));
      if (++evaluated == 100) break;
    }
  }

  // aligned path: steering current matched to the path itself collapses the
  // double integral to h |u_r^H Xi u_t| sqrt(A_R A_T)
  double worst_abs = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const std::vector<Path> paths = sample_paths(geo, rng);
    const Path& path = paths[0];
    const CurrentDesign j_tx = matched_current(geo.tx, path, Side::Tx);
    const CurrentDesign j_rx = matched_current(geo.rx, path, Side::Rx);
    QuadratureGrid grid;
    const cd coupled =
        effective_path_matrix_capa(j_tx, j_rx, path, grid, geo.tx, geo.rx, lambda)(0, 0);
    const CMat3 xi = polarization_operator(path.k_tx, path.k_rx, path.gamma);
    const cd pol = j_rx.polarization.cast<cd>().dot(xi * j_tx.polarization.cast<cd>());
    const double closed =
        path.gain * std::abs(pol) * std::sqrt(geo.rx.area() * geo.tx.area());
    worst_abs = std::max(worst_abs, std::abs(std::abs(coupled) - closed));
  }

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "10 vs 20 points worst relative %.3e (tol 1e-3); aligned closed form worst "
                "deviation %.3e (tol 1e-10)",
                worst_rel, worst_abs);
  report(worst_rel < 1e-3 && worst_abs < 1e-10, "quadrature-fidelity", buf);
}

// ---------------------------------------------------------------------------
// 7. Determinism of the sweep output.

void check_determinism() {
  SimConfig cfg;
  cfg.subcarriers = 32;
  cfg.r_max_m = 1500.0;
  cfg.trials = 48;
  cfg.snr_grid_db = {5.0, 15.0, 25.0};
  cfg.threads = 4;  // concurrent chunks on purpose
  const std::string a = csv_string(sweep(cfg));
  const std::string b = csv_string(sweep(cfg));
  cfg.threads = 1;
  const std::string serial = csv_string(sweep(cfg));
  const bool ok = (a == b) && (a == serial);
  report(ok, "determinism",
         ok ? "threaded runs byte-identical to each other and to the serial run"
            : "CSV outputs differ between identically configured runs");
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  check_unitarity();
  check_structure();
  check_gabp_noiseless();
  check_gabp_vs_ml();
  check_gabp_trace();
  check_complexity();
  check_quadrature();
  check_determinism();
  check_ber_ordering(64, 1000, "n64");
  check_ber_ordering(144, 300, "n144");
  std::printf("%s: %d failure(s), %.0f s total\n", g_failures == 0 ? "ALL PASS" : "FAILED",
              g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
