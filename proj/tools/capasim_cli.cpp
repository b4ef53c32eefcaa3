// capasim - link-level BER simulator for multicarrier continuous-aperture
// systems over doubly-dispersive channels.
//
// Subcommands:
//   sweep     full Monte-Carlo BER sweep over an SNR grid, CSV output
//   trial     single trial with a per-path debug dump
//   matrices  dump the per-path subcarrier matrices and the effective channel

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "capasim/sim.hpp"

namespace {

using namespace capasim;

struct CliOptions {
  SimConfig cfg;
  std::string config_path;
  std::string out_path;
  double trial_snr_db = 20.0;
  std::uint64_t trial_index = 0;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "flat key=value config file");
  cmd->add_option("--carrier-hz", opt.cfg.carrier_hz, "carrier frequency [Hz]");
  cmd->add_option("--sampling-hz", opt.cfg.sampling_hz, "bandwidth / sampling rate [Hz]");
  cmd->add_option("--subcarriers,-n", opt.cfg.subcarriers, "subcarrier count N");
  cmd->add_option("--paths,-L", opt.cfg.paths, "number of propagation paths");
  cmd->add_option("--r-max", opt.cfg.r_max_m, "maximum scatterer range [m]");
  cmd->add_option("--v-max", opt.cfg.v_max_mps, "maximum scatterer velocity [m/s]");
  cmd->add_option("--aperture-side", opt.cfg.aperture_side_m, "square aperture side [m]");
  cmd->add_option("--standoff", opt.cfg.standoff_m, "TX-RX plane separation [m]");
  cmd->add_option("--sector-deg", opt.cfg.sector_half_angle_deg,
                  "scatterer sector half angle [deg]");
  cmd->add_option("--otfs-n1", opt.cfg.otfs_n1, "OTFS DFT factor N1 (0 = near-square)");
  cmd->add_option("--afdm-c2", opt.cfg.afdm_c2, "AFDM secondary chirp rate");
  cmd->add_option("--gabp-iterations", opt.cfg.gabp.iterations, "GaBP iteration count");
  cmd->add_option("--gabp-damping", opt.cfg.gabp.damping, "GaBP damping factor in (0,1)");
  cmd->add_option("--symbol-power", opt.cfg.gabp.symbol_power, "constellation power E_C");
  cmd->add_option("--quadrature-points", opt.cfg.quadrature_points, "GL points per aperture axis");
  cmd->add_option("--seed", opt.cfg.seed, "master seed");
  cmd->add_option("--threads", opt.cfg.threads, "worker threads (0 = hardware)");
  cmd->add_option("--waveform", [&opt](const std::vector<std::string>& v) {
        apply_config_line(opt.cfg, "waveform", v.front());
        return true;
      }, "ofdm | otfs | afdm");
  cmd->add_option("--array-mode", [&opt](const std::vector<std::string>& v) {
        apply_config_line(opt.cfg, "array_mode", v.front());
        return true;
      }, "continuous | discrete");
  cmd->add_option("--detector", [&opt](const std::vector<std::string>& v) {
        apply_config_line(opt.cfg, "detector", v.front());
        return true;
      }, "gabp | lmmse | ml");
  cmd->add_option("--normalize-channel", [&opt](const std::vector<std::string>& v) {
        apply_config_line(opt.cfg, "normalize_channel", v.front());
        return true;
      }, "on | off (off keeps the array-gain difference visible)");
}

std::unique_ptr<std::ofstream> open_output(const std::string& path) {
  if (path.empty()) return nullptr;
  auto out = std::make_unique<std::ofstream>(path);
  if (!*out) throw std::runtime_error("cannot open output file '" + path + "'");
  return out;
}

int run_sweep(CliOptions& opt) {
  const std::vector<BERRecord> records = sweep(opt.cfg);
  auto file = open_output(opt.out_path);
  emit_csv(records, file ? *file : std::cout);
  return 0;
}

int run_single_trial(CliOptions& opt) {
  opt.cfg.validate();
  const std::uint64_t seed = derive_seed(opt.cfg.seed, 0, opt.trial_index);
  Rng rng(seed);
  const ScenarioGeometry geo = opt.cfg.scenario_geometry();
  const std::vector<Path> paths = sample_paths(geo, rng);
  std::cout << "trial seed " << seed << ", snr " << opt.trial_snr_db << " dB\n";
  std::cout << "paths (gain, delay_s, doppler_hz, d_tx, d_rx):\n";
  for (const Path& p : paths) {
    std::cout << "  " << p.gain << ' ' << p.delay_s << ' ' << p.doppler_hz << ' ' << p.d_tx << ' '
              << p.d_rx << '\n';
  }
  const TrialResult r = run_trial(opt.cfg, opt.trial_snr_db, seed);
  std::cout << "bit_errors " << r.bit_errors << " / " << r.bits_total << ", raw mean row gain "
            << r.row_gain << '\n';
  return 0;
}

int run_matrices(CliOptions& opt) {
  opt.cfg.validate();
  const std::uint64_t seed = derive_seed(opt.cfg.seed, 0, opt.trial_index);
  Rng rng(seed);
  const ScenarioGeometry geo = opt.cfg.scenario_geometry();
  const std::vector<Path> paths = sample_paths(geo, rng);
  const WaveformSpec spec = opt.cfg.waveform_spec();
  auto file = open_output(opt.out_path);
  std::ostream& out = file ? *file : std::cout;

  std::vector<NormalizedPath> normalized(paths.size());
  for (std::size_t l = 0; l < paths.size(); ++l) {
    normalized[l].delay_taps = std::lround(paths[l].delay_s * opt.cfg.sampling_hz);
    normalized[l].doppler =
        paths[l].doppler_hz * opt.cfg.subcarriers / opt.cfg.sampling_hz;
    out << "# G_" << l << " (zeta=" << normalized[l].delay_taps
        << ", f=" << normalized[l].doppler << ")\n";
    dump_matrix(subcarrier_matrix(spec, normalized[l]), out);
  }
  out << "# H_bar (unit path gains)\n";
  dump_matrix(build_effective_channel(spec, normalized), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multicarrier continuous-aperture BER simulator"};
  app.require_subcommand(1);

  CliOptions opt;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a full BER sweep, emit CSV");
  add_common_flags(sweep_cmd, opt);
  sweep_cmd->add_option("--trials", opt.cfg.trials, "trials per SNR point");
  sweep_cmd->add_option("--snr-db", opt.cfg.snr_grid_db, "SNR grid [dB]")->delimiter(',');
  sweep_cmd->add_option("--out,-o", opt.out_path, "CSV destination (default stdout)");

  CLI::App* trial_cmd = app.add_subcommand("trial", "run one trial and dump path details");
  add_common_flags(trial_cmd, opt);
  trial_cmd->add_option("--snr", opt.trial_snr_db, "SNR for the trial [dB]");
  trial_cmd->add_option("--index", opt.trial_index, "trial index for seed derivation");

  CLI::App* matrices_cmd = app.add_subcommand("matrices", "dump G_l and H_bar matrices");
  add_common_flags(matrices_cmd, opt);
  matrices_cmd->add_option("--index", opt.trial_index, "trial index for seed derivation");
  matrices_cmd->add_option("--out,-o", opt.out_path, "dump destination (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!opt.config_path.empty()) {
      opt.cfg = capasim::parse_config_file(opt.config_path, opt.cfg);
    }
    if (sweep_cmd->parsed()) return run_sweep(opt);
    if (trial_cmd->parsed()) return run_single_trial(opt);
    if (matrices_cmd->parsed()) return run_matrices(opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
