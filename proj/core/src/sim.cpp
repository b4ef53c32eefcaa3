#include "capasim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace capasim {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;

Eigen::Index default_otfs_n1(int n) {
  // near-square factorization, largest divisor <= sqrt(n)
  int best = 1;
  for (int d = 1; d * d <= n; ++d) {
    if (n % d == 0) best = d;
  }
  return n / best;  // n1 is the DFT factor; n = n1 * n2
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}
}  // namespace

const char* to_string(ArrayMode m) {
  return m == ArrayMode::Continuous ? "continuous" : "discrete";
}

const char* to_string(DetectorKind d) {
  switch (d) {
    case DetectorKind::Gabp: return "gabp";
    case DetectorKind::Lmmse: return "lmmse";
    case DetectorKind::Ml: return "ml";
  }
  return "?";
}

double SimConfig::max_normalized_doppler() const {
  const double nu_max = v_max_mps * carrier_hz / kSpeedOfLight;
  return nu_max * subcarriers / sampling_hz;
}

WaveformSpec SimConfig::waveform_spec() const {
  switch (waveform) {
    case WaveformKind::Ofdm:
      return WaveformSpec::ofdm(subcarriers);
    case WaveformKind::Otfs: {
      const Eigen::Index n1 = otfs_n1 > 0 ? otfs_n1 : default_otfs_n1(subcarriers);
      return WaveformSpec::otfs(n1, subcarriers / n1);
    }
    case WaveformKind::Afdm:
      return WaveformSpec::afdm(subcarriers,
                                default_afdm_c1(subcarriers, max_normalized_doppler()), afdm_c2);
  }
  throw std::invalid_argument("SimConfig: unknown waveform");
}

ScenarioGeometry SimConfig::scenario_geometry() const {
  ScenarioGeometry g;
  g.tx.side_x = g.tx.side_z = aperture_side_m;
  g.tx.center = Vec3::Zero();
  g.rx.side_x = g.rx.side_z = aperture_side_m;
  g.rx.center = Vec3(0.0, standoff_m, 0.0);
  g.carrier_hz = carrier_hz;
  g.r_max_m = r_max_m;
  g.v_max_mps = v_max_mps;
  g.sector_half_angle_rad = sector_half_angle_deg * kPi / 180.0;
  g.num_paths = paths;
  return g;
}

void SimConfig::validate() const {
  if (!(carrier_hz > 0.0)) throw std::invalid_argument("SimConfig: carrier_hz must be positive");
  if (!(sampling_hz > 0.0)) throw std::invalid_argument("SimConfig: sampling_hz must be positive");
  if (subcarriers < 1) throw std::invalid_argument("SimConfig: subcarriers must be >= 1");
  if (streams != 1) throw std::invalid_argument("SimConfig: only single-stream (M=1) is supported");
  if (paths < 1) throw std::invalid_argument("SimConfig: paths must be >= 1");
  if (!(r_max_m > 0.0)) throw std::invalid_argument("SimConfig: r_max_m must be positive");
  if (v_max_mps < 0.0) throw std::invalid_argument("SimConfig: v_max_mps must be >= 0");
  if (!(aperture_side_m > 0.0))
    throw std::invalid_argument("SimConfig: aperture_side_m must be positive");
  if (!(standoff_m > 0.0)) throw std::invalid_argument("SimConfig: standoff_m must be positive");
  if (!(sector_half_angle_deg > 0.0) || sector_half_angle_deg > 90.0)
    throw std::invalid_argument("SimConfig: sector_half_angle_deg must lie in (0, 90]");
  if (quadrature_points < 1)
    throw std::invalid_argument("SimConfig: quadrature_points must be >= 1");
  if (trials < 0) throw std::invalid_argument("SimConfig: trials must be >= 0");
  gabp.validate();
  // the longest path must fit inside one block (prefix-length assumption)
  const double tau_max = (r_max_m + (r_max_m + standoff_m)) / kSpeedOfLight;
  if (std::lround(tau_max * sampling_hz) >= subcarriers)
    throw std::invalid_argument("SimConfig: r_max implies delay taps >= subcarrier count");
  if (detector == DetectorKind::Ml && block_size() > 12)
    throw std::invalid_argument("SimConfig: ML detector limited to block size <= 12");
  waveform_spec();  // throws on inconsistent waveform parameters
}

double snr_to_noise_variance(double snr_db, double symbol_power) {
  if (!(symbol_power > 0.0))
    throw std::invalid_argument("snr_to_noise_variance: symbol power must be positive");
  return symbol_power * std::pow(10.0, -snr_db / 10.0);
}

namespace {

struct ChannelRealization {
  ComplexMatrix h;        // scaled channel used by the detector
  double row_gain = 0.0;  // mean row energy before scaling
};

ChannelRealization build_channel(const SimConfig& cfg, Rng& rng) {
  const ScenarioGeometry geo = cfg.scenario_geometry();
  const double lambda = geo.wavelength();
  const std::vector<Path> paths = sample_paths(geo, rng);

  std::size_t strongest = 0;
  for (std::size_t l = 1; l < paths.size(); ++l) {
    if (paths[l].gain > paths[strongest].gain) strongest = l;
  }

  // per-path aperture couplings (single stream -> scalars)
  std::vector<cd> couplings(paths.size());
  if (cfg.array_mode == ArrayMode::Continuous) {
    const CurrentDesign j_tx = matched_current(geo.tx, paths[strongest], Side::Tx);
    const CurrentDesign j_rx = matched_current(geo.rx, paths[strongest], Side::Rx);
    QuadratureGrid grid;
    grid.tx_x = grid.tx_z = grid.rx_x = grid.rx_z = cfg.quadrature_points;
    for (std::size_t l = 0; l < paths.size(); ++l) {
      couplings[l] =
          effective_path_matrix_capa(j_tx, j_rx, paths[l], grid, geo.tx, geo.rx, lambda)(0, 0);
    }
  } else {
    const DiscreteArray tx_array = make_half_wavelength_array(geo.tx, lambda);
    const DiscreteArray rx_array = make_half_wavelength_array(geo.rx, lambda);
    const ComplexVector w_tx =
        matched_element_weights(tx_array, paths[strongest], Side::Tx, lambda);
    const ComplexVector w_rx =
        matched_element_weights(rx_array, paths[strongest], Side::Rx, lambda);
    const CurrentDesign steer_tx = matched_current(geo.tx, paths[strongest], Side::Tx);
    const CurrentDesign steer_rx = matched_current(geo.rx, paths[strongest], Side::Rx);
    for (std::size_t l = 0; l < paths.size(); ++l) {
      couplings[l] = effective_path_matrix_discrete(tx_array, w_tx, steer_tx.polarization,
                                                    rx_array, w_rx, steer_rx.polarization,
                                                    paths[l], lambda)(0, 0);
    }
  }

  std::vector<NormalizedPath> normalized(paths.size());
  for (std::size_t l = 0; l < paths.size(); ++l) {
    normalized[l].gain = couplings[l];
    normalized[l].delay_taps = std::lround(paths[l].delay_s * cfg.sampling_hz);
    normalized[l].doppler = paths[l].doppler_hz * cfg.subcarriers / cfg.sampling_hz;
  }

  ChannelRealization out;
  out.h = build_effective_channel(cfg.waveform_spec(), normalized);
  out.row_gain = out.h.cwiseAbs2().rowwise().sum().mean();

  double scale;
  if (cfg.normalize_channel) {
    scale = std::sqrt(out.row_gain);
  } else {
    // common reference for both array modes: the discrete array's aligned-path
    // gain, so the continuous aperture's excess gain stays visible
    const DiscreteArray ref = make_half_wavelength_array(geo.tx, lambda);
    const double elements = static_cast<double>(ref.positions.size());
    scale = paths[strongest].gain * ref.element_aperture * elements;
  }
  if (!(scale > 0.0)) throw std::runtime_error("build_channel: degenerate channel scale");
  out.h /= scale;
  return out;
}

}  // namespace

TrialResult run_trial(const SimConfig& cfg, double snr_db, std::uint64_t trial_seed) {
  cfg.validate();
  Rng rng(trial_seed);
  const ChannelRealization chan = build_channel(cfg, rng);
  const Eigen::Index n = cfg.block_size();
  const double ec = cfg.gabp.symbol_power;
  const double noise_var = snr_to_noise_variance(snr_db, ec);

  std::vector<int> bits(static_cast<std::size_t>(2 * n));
  for (auto& b : bits) b = rng.bernoulli() ? 1 : 0;
  const ComplexVector c = qpsk_map(bits, ec);

  ComplexVector w(n);
  const double sigma = std::sqrt(noise_var);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = sigma * rng.cgaussian();
  const ComplexVector y = chan.h * c + w;

  ComplexVector estimate;
  switch (cfg.detector) {
    case DetectorKind::Gabp: {
      GaBPConfig g = cfg.gabp;
      g.noise_variance = noise_var;
      estimate = gabp_detect(y, chan.h, g);
      break;
    }
    case DetectorKind::Lmmse:
      estimate = lmmse_detect(y, chan.h, noise_var, ec);
      break;
    case DetectorKind::Ml:
      estimate = ml_oracle(y, chan.h, ec);
      break;
  }

  TrialResult result;
  result.bit_errors = count_bit_errors(bits, qpsk_demap(estimate));
  result.bits_total = 2 * n;
  result.row_gain = chan.row_gain;
  return result;
}

std::vector<BERRecord> sweep(const SimConfig& cfg) {
  cfg.validate();
  if (cfg.snr_grid_db.empty()) throw std::invalid_argument("sweep: empty SNR grid");
  if (cfg.trials == 0) throw std::invalid_argument("sweep: zero trials requested");

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = cfg.threads > 0 ? cfg.threads : static_cast<int>(hw);

  std::vector<BERRecord> records;
  records.reserve(cfg.snr_grid_db.size());
  for (std::size_t point = 0; point < cfg.snr_grid_db.size(); ++point) {
    const double snr_db = cfg.snr_grid_db[point];

    auto run_range = [&](int begin, int end) {
      TrialResult acc;
      for (int t = begin; t < end; ++t) {
        const std::uint64_t seed = derive_seed(cfg.seed, point, static_cast<std::uint64_t>(t));
        const TrialResult r = run_trial(cfg, snr_db, seed);
        acc.bit_errors += r.bit_errors;
        acc.bits_total += r.bits_total;
        acc.row_gain += r.row_gain;
      }
      return acc;
    };

    TrialResult total;
    if (workers <= 1 || cfg.trials < 2 * workers) {
      total = run_range(0, cfg.trials);
    } else {
      std::vector<std::future<TrialResult>> futures;
      const int chunk = (cfg.trials + workers - 1) / workers;
      for (int begin = 0; begin < cfg.trials; begin += chunk) {
        const int end = std::min(cfg.trials, begin + chunk);
        futures.push_back(std::async(std::launch::async, run_range, begin, end));
      }
      for (auto& f : futures) {
        const TrialResult r = f.get();
        total.bit_errors += r.bit_errors;
        total.bits_total += r.bits_total;
        total.row_gain += r.row_gain;
      }
    }

    BERRecord rec;
    rec.snr_db = snr_db;
    rec.waveform = cfg.waveform;
    rec.array_mode = cfg.array_mode;
    rec.detector = cfg.detector;
    rec.subcarriers = cfg.subcarriers;
    rec.bit_errors = total.bit_errors;
    rec.bits_total = total.bits_total;
    rec.ber = total.bits_total > 0
                  ? static_cast<double>(total.bit_errors) / static_cast<double>(total.bits_total)
                  : 0.0;
    rec.seed = cfg.seed;
    rec.mean_row_gain = total.row_gain / static_cast<double>(cfg.trials);
    records.push_back(rec);
  }
  return records;
}

void emit_csv(const std::vector<BERRecord>& records, std::ostream& out) {
  if (records.empty()) throw std::invalid_argument("emit_csv: no records");
  out << "snr_db,waveform,array_mode,detector,n,bit_errors,bits_total,ber,seed,mean_row_gain\n";
  for (const BERRecord& r : records) {
    out << format_double(r.snr_db) << ',' << to_string(r.waveform) << ','
        << to_string(r.array_mode) << ',' << to_string(r.detector) << ',' << r.subcarriers << ','
        << r.bit_errors << ',' << r.bits_total << ',' << format_double(r.ber) << ',' << r.seed
        << ',' << format_double(r.mean_row_gain) << '\n';
  }
}

std::string csv_string(const std::vector<BERRecord>& records) {
  std::ostringstream oss;
  emit_csv(records, oss);
  return oss.str();
}

void dump_matrix(const ComplexMatrix& m, std::ostream& out) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag());
    }
    out << '\n';
  }
}

namespace {
WaveformKind parse_waveform(const std::string& v) {
  if (v == "ofdm") return WaveformKind::Ofdm;
  if (v == "otfs") return WaveformKind::Otfs;
  if (v == "afdm") return WaveformKind::Afdm;
  throw std::invalid_argument("config: unknown waveform '" + v + "'");
}

ArrayMode parse_array_mode(const std::string& v) {
  if (v == "continuous") return ArrayMode::Continuous;
  if (v == "discrete") return ArrayMode::Discrete;
  throw std::invalid_argument("config: unknown array_mode '" + v + "'");
}

DetectorKind parse_detector(const std::string& v) {
  if (v == "gabp") return DetectorKind::Gabp;
  if (v == "lmmse") return DetectorKind::Lmmse;
  if (v == "ml") return DetectorKind::Ml;
  throw std::invalid_argument("config: unknown detector '" + v + "'");
}

bool parse_switch(const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw std::invalid_argument("config: expected on/off, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("config: empty list '" + v + "'");
  return out;
}
}  // namespace

void apply_config_line(SimConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "carrier_hz") cfg.carrier_hz = std::stod(value);
  else if (key == "sampling_hz") cfg.sampling_hz = std::stod(value);
  else if (key == "subcarriers") cfg.subcarriers = std::stoi(value);
  else if (key == "streams") cfg.streams = std::stoi(value);
  else if (key == "paths") cfg.paths = std::stoi(value);
  else if (key == "r_max_m") cfg.r_max_m = std::stod(value);
  else if (key == "v_max_mps") cfg.v_max_mps = std::stod(value);
  else if (key == "aperture_side_m") cfg.aperture_side_m = std::stod(value);
  else if (key == "standoff_m") cfg.standoff_m = std::stod(value);
  else if (key == "sector_half_angle_deg") cfg.sector_half_angle_deg = std::stod(value);
  else if (key == "waveform") cfg.waveform = parse_waveform(value);
  else if (key == "otfs_n1") cfg.otfs_n1 = std::stoi(value);
  else if (key == "afdm_c2") cfg.afdm_c2 = std::stod(value);
  else if (key == "array_mode") cfg.array_mode = parse_array_mode(value);
  else if (key == "detector") cfg.detector = parse_detector(value);
  else if (key == "gabp_iterations") cfg.gabp.iterations = std::stoi(value);
  else if (key == "gabp_damping") cfg.gabp.damping = std::stod(value);
  else if (key == "symbol_power") cfg.gabp.symbol_power = std::stod(value);
  else if (key == "quadrature_points") cfg.quadrature_points = std::stoi(value);
  else if (key == "normalize_channel") cfg.normalize_channel = parse_switch(value);
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "trials") cfg.trials = std::stoi(value);
  else if (key == "snr_db") cfg.snr_grid_db = parse_double_list(value);
  else if (key == "threads") cfg.threads = std::stoi(value);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

SimConfig parse_config_file(const std::string& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    apply_config_line(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

}  // namespace capasim
