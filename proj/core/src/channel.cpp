#include "capasim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace capasim {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

cd cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

Vec3 transverse_polarization(const Vec3& k) {
  // projection of e_z onto k's orthogonal complement, e_x fallback
  Vec3 u = Vec3::UnitZ() - k * k.z();
  if (u.norm() < 1e-9) {
    u = Vec3::UnitX() - k * k.x();
  }
  return u.normalized();
}
}  // namespace

double path_gain(double d_tx, double d_rx, int num_paths) {
  if (!(d_tx > 0.0) || !(d_rx > 0.0))
    throw std::invalid_argument("path_gain: distances must be positive");
  if (num_paths < 1) throw std::invalid_argument("path_gain: num_paths must be >= 1");
  const double four_pi_sq = (4.0 * kPi) * (4.0 * kPi);
  return 1.0 / (std::sqrt(static_cast<double>(num_paths)) * four_pi_sq * d_rx * d_tx);
}

CMat3 polarization_operator(const Vec3& k_tx, const Vec3& k_rx, const CMat3& gamma) {
  if (std::abs(k_tx.norm() - 1.0) > 1e-9 || std::abs(k_rx.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("polarization_operator: wave vectors must be unit norm");
  const Eigen::Matrix3d proj_rx = Eigen::Matrix3d::Identity() - k_rx * k_rx.transpose();
  const Eigen::Matrix3d proj_tx = Eigen::Matrix3d::Identity() - k_tx * k_tx.transpose();
  return proj_rx.cast<cd>() * gamma * proj_tx.cast<cd>();
}

std::vector<Path> sample_paths(const ScenarioGeometry& scenario, Rng& rng) {
  if (scenario.num_paths < 1) throw std::invalid_argument("sample_paths: need at least one path");
  if (!(scenario.r_max_m > 0.0)) throw std::invalid_argument("sample_paths: r_max must be positive");
  const double lambda = scenario.wavelength();
  const double r_min = 10.0 * lambda;
  if (!(scenario.r_max_m > r_min))
    throw std::invalid_argument("sample_paths: r_max inside the far-field exclusion radius");
  const double cos_max = std::cos(scenario.sector_half_angle_rad);

  std::vector<Path> paths;
  paths.reserve(static_cast<std::size_t>(scenario.num_paths));
  for (int l = 0; l < scenario.num_paths; ++l) {
    Path p;
    Vec3 position;
    // uniform solid angle within the boresight cone, uniform range
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double cos_psi = rng.uniform(cos_max, 1.0);
      const double sin_psi = std::sqrt(std::max(0.0, 1.0 - cos_psi * cos_psi));
      const double phi = rng.uniform(0.0, kTwoPi);
      const Vec3 dir(sin_psi * std::cos(phi), cos_psi, sin_psi * std::sin(phi));
      const double range = rng.uniform(r_min, scenario.r_max_m);
      position = scenario.tx.center + range * dir;
      p.k_tx = dir;
      p.d_tx = range;
      p.d_rx = (scenario.rx.center - position).norm();
      if (p.d_rx >= r_min) break;  // keep both legs in the far field
    }
    p.k_rx = (scenario.rx.center - position).normalized();
    p.gain = path_gain(p.d_tx, p.d_rx, scenario.num_paths);
    p.delay_s = (p.d_tx + p.d_rx) / kSpeedOfLight;
    const double radial_velocity = rng.uniform(-scenario.v_max_mps, scenario.v_max_mps);
    p.doppler_hz = radial_velocity * scenario.carrier_hz / kSpeedOfLight;
    CMat3 gamma;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gamma(i, j) = rng.cgaussian();
    p.gamma = gamma / gamma.norm();
    paths.push_back(p);
  }
  return paths;
}

CurrentDesign matched_current(const ApertureConfig& aperture, const Path& path, Side side) {
  if (!(aperture.area() > 0.0)) throw std::invalid_argument("matched_current: empty aperture");
  CurrentDesign d;
  // the design phase e^{-j k_d . p} must cancel the channel's aperture phase
  // e^{+j k . p}; on the RX side the coupling conjugates the current, flipping
  // the sign requirement.
  const Vec3 k_path = (side == Side::Tx) ? path.k_tx : path.k_rx;
  d.wave_vector = (side == Side::Tx) ? k_path : Vec3(-k_path);
  d.polarization = transverse_polarization(k_path);
  d.amplitude = 1.0 / std::sqrt(aperture.area());
  return d;
}

GlRule gauss_legendre_rule(int points, double lo, double hi) {
  if (points < 1) throw std::invalid_argument("gauss_legendre_rule: points must be >= 1");
  if (!(lo < hi)) throw std::invalid_argument("gauss_legendre_rule: need lo < hi");
  GlRule rule;
  rule.nodes.resize(static_cast<std::size_t>(points));
  rule.weights.resize(static_cast<std::size_t>(points));
  const int n = points;
  // Newton iteration on P_n from the Chebyshev-based initial guess
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      if (n == 1) {
        p1 = x;
      }
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      const double pn = (n == 1) ? x : p1;
      const double pn1 = (n == 1) ? 1.0 : p0;
      dp = static_cast<double>(n) * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
  }
  // map [-1,1] -> [lo,hi]
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (int i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = mid + half * rule.nodes[static_cast<std::size_t>(i)];
    rule.weights[static_cast<std::size_t>(i)] *= half;
  }
  return rule;
}

namespace {

// quadrature of J(p) e^{+/- j (2 pi / lambda) k . p} over an x-z aperture,
// returning the integrated 3-vector (the polarization factors out)
CVec3 aperture_integral(const CurrentDesign& design, const Vec3& k_path, double phase_sign,
                        const ApertureConfig& aperture, int points_x, int points_z,
                        double wavelength) {
  const GlRule gx = gauss_legendre_rule(points_x, -0.5 * aperture.side_x, 0.5 * aperture.side_x);
  const GlRule gz = gauss_legendre_rule(points_z, -0.5 * aperture.side_z, 0.5 * aperture.side_z);
  const double k0 = kTwoPi / wavelength;
  cd acc(0.0, 0.0);
  for (std::size_t ix = 0; ix < gx.nodes.size(); ++ix) {
    for (std::size_t iz = 0; iz < gz.nodes.size(); ++iz) {
      const Vec3 p = aperture.center + Vec3(gx.nodes[ix], 0.0, gz.nodes[iz]);
      const double phase = -k0 * design.wave_vector.dot(p) + phase_sign * k0 * k_path.dot(p);
      acc += gx.weights[ix] * gz.weights[iz] * cis(phase);
    }
  }
  return (design.amplitude * acc) * design.polarization.cast<cd>();
}

}  // namespace

ComplexMatrix effective_path_matrix_capa(const CurrentDesign& j_tx, const CurrentDesign& j_rx,
                                         const Path& path, const QuadratureGrid& grid,
                                         const ApertureConfig& tx, const ApertureConfig& rx,
                                         double wavelength) {
  const CMat3 xi = polarization_operator(path.k_tx, path.k_rx, path.gamma);
  // J_R^H(r) e^{+j k_rx . r} = (J_R(r) e^{-j k_rx . r})^H
  const CVec3 v_tx = aperture_integral(j_tx, path.k_tx, +1.0, tx, grid.tx_x, grid.tx_z, wavelength);
  const CVec3 v_rx = aperture_integral(j_rx, path.k_rx, -1.0, rx, grid.rx_x, grid.rx_z, wavelength);
  ComplexMatrix h(1, 1);
  h(0, 0) = path.gain * (v_rx.adjoint() * xi * v_tx)(0, 0);
  return h;
}

DiscreteArray make_half_wavelength_array(const ApertureConfig& aperture, double wavelength) {
  DiscreteArray arr;
  const double spacing = 0.5 * wavelength;
  const int nx = static_cast<int>(std::floor(aperture.side_x / spacing)) + 1;
  const int nz = static_cast<int>(std::floor(aperture.side_z / spacing)) + 1;
  arr.positions.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(nz));
  for (int ix = 0; ix < nx; ++ix) {
    for (int iz = 0; iz < nz; ++iz) {
      const double x = (static_cast<double>(ix) - 0.5 * (nx - 1)) * spacing;
      const double z = (static_cast<double>(iz) - 0.5 * (nz - 1)) * spacing;
      arr.positions.push_back(aperture.center + Vec3(x, 0.0, z));
    }
  }
  arr.element_aperture = wavelength * wavelength / (4.0 * kPi);
  return arr;
}

ComplexVector matched_element_weights(const DiscreteArray& array, const Path& path, Side side,
                                      double wavelength) {
  const Eigen::Index n = static_cast<Eigen::Index>(array.positions.size());
  if (n == 0) throw std::invalid_argument("matched_element_weights: empty array");
  const double k0 = kTwoPi / wavelength;
  const Vec3& k = (side == Side::Tx) ? path.k_tx : path.k_rx;
  ComplexVector w(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double channel_phase = k0 * k.dot(array.positions[static_cast<std::size_t>(i)]);
    // TX weights enter directly, RX weights conjugated in the combining sum
    const double phase = (side == Side::Tx) ? -channel_phase : channel_phase;
    w(i) = scale * cis(phase);
  }
  return w;
}

ComplexMatrix effective_path_matrix_discrete(const DiscreteArray& tx_array,
                                             const ComplexVector& tx_weights,
                                             const Vec3& tx_polarization,
                                             const DiscreteArray& rx_array,
                                             const ComplexVector& rx_weights,
                                             const Vec3& rx_polarization, const Path& path,
                                             double wavelength) {
  if (tx_weights.size() != static_cast<Eigen::Index>(tx_array.positions.size()) ||
      rx_weights.size() != static_cast<Eigen::Index>(rx_array.positions.size()))
    throw std::invalid_argument("effective_path_matrix_discrete: weight/array size mismatch");
  const CMat3 xi = polarization_operator(path.k_tx, path.k_rx, path.gamma);
  const double k0 = kTwoPi / wavelength;
  cd tx_sum(0.0, 0.0);
  for (Eigen::Index i = 0; i < tx_weights.size(); ++i) {
    tx_sum += tx_weights(i) * cis(k0 * path.k_tx.dot(tx_array.positions[static_cast<std::size_t>(i)]));
  }
  cd rx_sum(0.0, 0.0);
  for (Eigen::Index i = 0; i < rx_weights.size(); ++i) {
    rx_sum += std::conj(rx_weights(i)) *
              cis(k0 * path.k_rx.dot(rx_array.positions[static_cast<std::size_t>(i)]));
  }
  const cd pol = (rx_polarization.cast<cd>().adjoint() * xi * tx_polarization.cast<cd>())(0, 0);
  const double aperture_gain =
      std::sqrt(tx_array.element_aperture) * std::sqrt(rx_array.element_aperture);
  ComplexMatrix h(1, 1);
  h(0, 0) = path.gain * pol * aperture_gain * rx_sum * tx_sum;
  return h;
}

}  // namespace capasim
