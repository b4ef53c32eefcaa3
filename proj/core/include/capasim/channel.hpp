// channel.hpp - geometric doubly-dispersive channel for continuous-aperture
// (and half-wavelength discrete baseline) arrays.
//
// Geometry convention: the TX aperture lies in the x-z plane centered at the
// origin with normal +y; the RX aperture is parallel to it at a configurable
// standoff along +y. Scatterers are drawn inside an angular sector around
// boresight, with ranges up to r_max.

#pragma once

#include <vector>

#include "capasim/linalg.hpp"
#include "capasim/rng.hpp"

namespace capasim {

inline constexpr double kSpeedOfLight = 2.9979e8;  // m/s

struct ApertureConfig {
  double side_x = 0.5;           // m
  double side_z = 0.5;           // m
  Vec3 center = Vec3::Zero();

  double area() const { return side_x * side_z; }
};

/// One propagation path in physical units.
struct Path {
  double gain = 0.0;             // h, large-scale amplitude gain
  double delay_s = 0.0;          // tau
  double doppler_hz = 0.0;       // nu
  Vec3 k_tx = Vec3::UnitY();     // unit wave vector leaving the TX
  Vec3 k_rx = Vec3::UnitY();     // unit wave vector arriving at the RX
  CMat3 gamma = CMat3::Zero();   // polarization transfer matrix
  double d_tx = 0.0;             // TX -> scatterer distance, m
  double d_rx = 0.0;             // scatterer -> RX distance, m
};

/// Continuous aperture excitation J(p) = amplitude * polarization *
/// exp(-j (2 pi / lambda) wave_vector . p), normalized to unit power over
/// the aperture (amplitude = 1/sqrt(area)).
struct CurrentDesign {
  Vec3 wave_vector = Vec3::UnitY();
  Vec3 polarization = Vec3::UnitZ();
  double amplitude = 1.0;
};

enum class Side { Tx, Rx };

/// Tensor-product Gauss-Legendre point counts per aperture axis.
struct QuadratureGrid {
  int tx_x = 10;
  int tx_z = 10;
  int rx_x = 10;
  int rx_z = 10;
};

struct GlRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Scenario parameters needed for path sampling (a subset of SimConfig).
struct ScenarioGeometry {
  ApertureConfig tx;
  ApertureConfig rx;
  double carrier_hz = 2.4e9;
  double r_max_m = 1500.0;
  double v_max_mps = 122.0;
  double sector_half_angle_rad = 0.1745;  // 10 degrees
  int num_paths = 5;

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
};

/// Large-scale amplitude gain h = 1 / (sqrt(L) (4 pi)^2 d_rx d_tx).
/// Throws std::invalid_argument for non-positive distances.
double path_gain(double d_tx, double d_rx, int num_paths);

/// Xi = (I - k_rx k_rx^T) Gamma (I - k_tx k_tx^T).
/// Throws std::invalid_argument if the wave vectors are not unit norm.
CMat3 polarization_operator(const Vec3& k_tx, const Vec3& k_rx, const CMat3& gamma);

/// Draws num_paths scatterers: directions uniform in the boresight sector,
/// ranges uniform within [10 lambda, r_max], radial velocities uniform in
/// [-v_max, v_max], Gamma i.i.d. complex Gaussian normalized to unit
/// Frobenius norm. Deterministic for a given rng state.
std::vector<Path> sample_paths(const ScenarioGeometry& scenario, Rng& rng);

/// Matched-filter current steered at `path`: the design wave vector conjugates
/// the path's aperture phase (k_tx on the TX side, -k_rx on the RX side) and
/// the polarization is the normalized projection of e_z onto the transverse
/// plane (e_x fallback when degenerate).
CurrentDesign matched_current(const ApertureConfig& aperture, const Path& path, Side side);

/// Gauss-Legendre nodes/weights on [lo, hi]; exact for polynomials of degree
/// 2*points - 1.
GlRule gauss_legendre_rule(int points, double lo, double hi);

/// Per-path coupling Hhat (1x1 for the single-stream designs here): the double
/// surface integral of h J_R^H(r) Xi J_T(s) e^{j2pi/lambda k_rx.r}
/// e^{j2pi/lambda k_tx.s} evaluated by tensor-product quadrature.
ComplexMatrix effective_path_matrix_capa(const CurrentDesign& j_tx, const CurrentDesign& j_rx,
                                         const Path& path, const QuadratureGrid& grid,
                                         const ApertureConfig& tx, const ApertureConfig& rx,
                                         double wavelength);

/// Discrete half-wavelength array filling the same aperture.
struct DiscreteArray {
  std::vector<Vec3> positions;
  double element_aperture = 0.0;  // A_d = lambda^2 / (4 pi)
};

DiscreteArray make_half_wavelength_array(const ApertureConfig& aperture, double wavelength);

/// Per-element conjugate (matched) weights for `path`, unit total power.
ComplexVector matched_element_weights(const DiscreteArray& array, const Path& path, Side side,
                                      double wavelength);

/// Discrete-array counterpart of effective_path_matrix_capa: integrals become
/// sums over element positions, each weighted by sqrt(A_d).
ComplexMatrix effective_path_matrix_discrete(const DiscreteArray& tx_array,
                                             const ComplexVector& tx_weights,
                                             const Vec3& tx_polarization,
                                             const DiscreteArray& rx_array,
                                             const ComplexVector& rx_weights,
                                             const Vec3& rx_polarization, const Path& path,
                                             double wavelength);

}  // namespace capasim
