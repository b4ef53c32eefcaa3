#include "capasim/detector.hpp"

#include <cmath>
#include <stdexcept>

namespace capasim {

namespace {
constexpr double kVarianceFloor = 1e-30;
constexpr double kPrecisionFloor = 1e-300;
}  // namespace

void GaBPConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("GaBPConfig: iterations must be >= 1");
  if (!(damping > 0.0 && damping < 1.0))
    throw std::invalid_argument("GaBPConfig: damping must lie in (0,1)");
  if (!(symbol_power > 0.0)) throw std::invalid_argument("GaBPConfig: symbol power must be > 0");
  if (noise_variance < 0.0) throw std::invalid_argument("GaBPConfig: noise variance must be >= 0");
}

void sic_update(const ComplexVector& y, const ComplexMatrix& h, const ComplexMatrix& replicas,
                const RealMatrix& variances, double noise_var, ComplexMatrix& sic,
                RealMatrix& sic_var) {
  const Eigen::Index rows = h.rows(), cols = h.cols();
  if (y.size() != rows || replicas.rows() != rows || replicas.cols() != cols ||
      variances.rows() != rows || variances.cols() != cols)
    throw std::invalid_argument("sic_update: dimension mismatch");
  // exclusion sums via subtract-then-restore: full row sum minus the own term
  const ComplexMatrix weighted = h.cwiseProduct(replicas);
  const ComplexVector residual = y - weighted.rowwise().sum();
  const RealMatrix var_weighted = h.cwiseAbs2().cwiseProduct(variances);
  const Eigen::VectorXd var_row_sum = var_weighted.rowwise().sum();

  sic = weighted.colwise() + residual;
  sic_var = ((-var_weighted).colwise() + var_row_sum).cwiseMax(0.0);
  sic_var.array() += noise_var;
  sic_var = sic_var.cwiseMax(std::max(noise_var, kVarianceFloor));
}

void belief_update(const ComplexMatrix& sic, const RealMatrix& sic_var, const ComplexMatrix& h,
                   double symbol_power, ComplexMatrix& mean, RealMatrix& var) {
  const Eigen::Index rows = h.rows(), cols = h.cols();
  if (sic.rows() != rows || sic.cols() != cols || sic_var.rows() != rows || sic_var.cols() != cols)
    throw std::invalid_argument("belief_update: dimension mismatch");
  if ((sic_var.array() <= 0.0).any())
    throw std::invalid_argument("belief_update: sic variances must be positive");
  const RealMatrix precision_terms = h.cwiseAbs2().cwiseQuotient(sic_var);
  const ComplexMatrix mean_terms = h.conjugate().cwiseProduct(sic).cwiseQuotient(sic_var.cast<cd>());
  const Eigen::RowVectorXd precision_col = precision_terms.colwise().sum();
  const Eigen::RowVectorXcd mean_col = mean_terms.colwise().sum();
  RealMatrix precision = ((-precision_terms).rowwise() + precision_col);
  ComplexMatrix numerator = ((-mean_terms).rowwise() + mean_col);

  mean.resize(rows, cols);
  var.resize(rows, cols);
  for (Eigen::Index m = 0; m < cols; ++m) {
    for (Eigen::Index n = 0; n < rows; ++n) {
      const double p = precision(n, m);
      if (p > kPrecisionFloor) {
        var(n, m) = 1.0 / p;
        mean(n, m) = numerator(n, m) / p;
      } else {
        // no information from the other observations: fall back to the prior
        mean(n, m) = cd(0.0, 0.0);
        var(n, m) = symbol_power;
      }
    }
  }
}

cd qpsk_denoise(cd belief, double belief_var, double symbol_power) {
  if (!(belief_var > 0.0)) throw std::invalid_argument("qpsk_denoise: variance must be positive");
  const double q = std::sqrt(symbol_power / 2.0);
  const double re = std::tanh(2.0 * q * belief.real() / belief_var);
  const double im = std::tanh(2.0 * q * belief.imag() / belief_var);
  return {q * re, q * im};
}

double mse_update(cd replica, double symbol_power) {
  return std::max(0.0, symbol_power - std::norm(replica));
}

ComplexVector consensus(const ComplexMatrix& sic, const RealMatrix& sic_var,
                        const ComplexMatrix& h) {
  const Eigen::Index cols = h.cols();
  if (sic.rows() != h.rows() || sic.cols() != cols || sic_var.rows() != h.rows() ||
      sic_var.cols() != cols)
    throw std::invalid_argument("consensus: dimension mismatch");
  const Eigen::RowVectorXd precision = h.cwiseAbs2().cwiseQuotient(sic_var).colwise().sum();
  const Eigen::RowVectorXcd numerator =
      h.conjugate().cwiseProduct(sic).cwiseQuotient(sic_var.cast<cd>()).colwise().sum();
  ComplexVector out(cols);
  for (Eigen::Index m = 0; m < cols; ++m) {
    out(m) = (precision(m) > kPrecisionFloor) ? numerator(m) / precision(m) : cd(0.0, 0.0);
  }
  return out;
}

namespace {

// Straightforward scalar recursion with direct exclusion sums. The fused
// kernel below computes exclusions as full-sum-minus-own-term, which can lose
// up to the full sum's ulp to cancellation; on small grids the exclusion sums
// sit one division away from the belief statistics and that loss is
// magnified, so small and traced runs take this path instead.
ComplexVector gabp_detect_direct(const ComplexVector& y, const ComplexMatrix& h,
                                 const GaBPConfig& cfg, std::vector<GaBPIterate>* trace) {
  const Eigen::Index rows = h.rows(), cols = h.cols();
  const double ec = cfg.symbol_power;
  const double beta = cfg.damping;
  const double var_floor = std::max(cfg.noise_variance, kVarianceFloor);

  ComplexMatrix replicas = ComplexMatrix::Zero(rows, cols);
  RealMatrix variances = RealMatrix::Constant(rows, cols, ec);
  ComplexMatrix sic(rows, cols), belief_mean(rows, cols);
  RealMatrix sic_var(rows, cols), belief_var(rows, cols);

  if (trace) trace->clear();

  for (int it = 0; it < cfg.iterations; ++it) {
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
        sic_var(n, m) = std::max(var_acc, var_floor);
      }
    }
    for (Eigen::Index n = 0; n < rows; ++n) {
      for (Eigen::Index m = 0; m < cols; ++m) {
        double precision = 0.0;
        cd num(0.0, 0.0);
        for (Eigen::Index e = 0; e < rows; ++e) {
          if (e == n) continue;
          precision += std::norm(h(e, m)) / sic_var(e, m);
          num += std::conj(h(e, m)) * sic(e, m) / sic_var(e, m);
        }
        if (precision > kPrecisionFloor) {
          belief_var(n, m) = 1.0 / precision;
          belief_mean(n, m) = num / precision;
        } else {
          belief_mean(n, m) = cd(0.0, 0.0);
          belief_var(n, m) = ec;
        }
      }
    }
    for (Eigen::Index n = 0; n < rows; ++n) {
      for (Eigen::Index m = 0; m < cols; ++m) {
        const cd denoised = qpsk_denoise(belief_mean(n, m), belief_var(n, m), ec);
        replicas(n, m) = damp(denoised, replicas(n, m), beta);
        variances(n, m) = damp(mse_update(denoised, ec), variances(n, m), beta);
      }
    }
    if (trace) {
      GaBPIterate snap;
      snap.sic_signal = sic;
      snap.sic_variance = sic_var;
      snap.belief_mean = belief_mean;
      snap.belief_variance = belief_var;
      snap.replica = replicas;
      snap.replica_variance = variances;
      trace->push_back(std::move(snap));
    }
  }
  return consensus(sic, sic_var, h);
}

}  // namespace

ComplexVector gabp_detect(const ComplexVector& y, const ComplexMatrix& h, const GaBPConfig& cfg,
                          std::vector<GaBPIterate>* trace) {
  cfg.validate();
  if (h.rows() != y.size()) throw std::invalid_argument("gabp_detect: dimension mismatch");
  const Eigen::Index rows = h.rows(), cols = h.cols();
  if (trace || rows * cols <= 64) return gabp_detect_direct(y, h, cfg, trace);
  const double ec = cfg.symbol_power;
  const double q = std::sqrt(ec / 2.0);
  const double beta = cfg.damping;
  const double noise = cfg.noise_variance;
  const double var_floor = std::max(noise, kVarianceFloor);

  // Real/imag split with raw column walks: the per-edge recursion runs in two
  // fused passes per iteration (row reductions, then column-local work), so
  // the O(rows*cols) per-iteration cost comes with small constants. The
  // recursion is the same Jacobi schedule as the op-level formulation.
  using RealArray = Eigen::ArrayXXd;
  const RealArray hr = h.real().array();
  const RealArray hi = h.imag().array();
  const Eigen::ArrayXd yr = y.real().array();
  const Eigen::ArrayXd yi = y.imag().array();

  RealArray cr = RealArray::Zero(rows, cols), ci = RealArray::Zero(rows, cols);
  RealArray v = RealArray::Constant(rows, cols, ec);
  RealArray sic_r(rows, cols), sic_i(rows, cols), sv(rows, cols);

  Eigen::ArrayXd res_r(rows), res_i(rows), vrow(rows);
  Eigen::ArrayXd col_mr(rows), col_mi(rows);
  Eigen::ArrayXd arg(rows), ex(rows), col_tr(rows), col_ti(rows);

  for (int it = 0; it < cfg.iterations; ++it) {
    const bool keep_sic = it == cfg.iterations - 1;

    // pass 1: full row sums of the replica-weighted channel and variances
    res_r = yr;
    res_i = yi;
    vrow.setZero();
    for (Eigen::Index m = 0; m < cols; ++m) {
      const double* hrc = hr.col(m).data();
      const double* hic = hi.col(m).data();
      const double* crc = cr.col(m).data();
      const double* cic = ci.col(m).data();
      const double* vc = v.col(m).data();
      double* rr = res_r.data();
      double* ri = res_i.data();
      double* vr = vrow.data();
      for (Eigen::Index n = 0; n < rows; ++n) {
        rr[n] -= hrc[n] * crc[n] - hic[n] * cic[n];
        ri[n] -= hrc[n] * cic[n] + hic[n] * crc[n];
        vr[n] += (hrc[n] * hrc[n] + hic[n] * hic[n]) * vc[n];
      }
    }

    // pass 2, column by column: restore the own term to get the exclusion
    // sums, form the extrinsic numerator (the denoiser argument 2 q mean/var
    // reduces to 2 q times it, so no quotient is ever formed), denoise, damp
    for (Eigen::Index m = 0; m < cols; ++m) {
      const double* hrc = hr.col(m).data();
      const double* hic = hi.col(m).data();
      const double* vc = v.col(m).data();
      double* crc = cr.col(m).data();
      double* cic = ci.col(m).data();
      double* src = keep_sic ? sic_r.col(m).data() : col_tr.data();
      double* sic_im = keep_sic ? sic_i.col(m).data() : col_ti.data();
      double* svc = keep_sic ? sv.col(m).data() : arg.data();
      double sum_mr = 0.0, sum_mi = 0.0;
      for (Eigen::Index n = 0; n < rows; ++n) {
        const double h2nm = hrc[n] * hrc[n] + hic[n] * hic[n];
        const double s_r = res_r(n) + (hrc[n] * crc[n] - hic[n] * cic[n]);
        const double s_i = res_i(n) + (hrc[n] * cic[n] + hic[n] * crc[n]);
        const double excl = vrow(n) - h2nm * vc[n];
        const double s_v = std::max((excl > 0.0 ? excl : 0.0) + noise, var_floor);
        const double isv = 1.0 / s_v;
        const double m_r = (hrc[n] * s_r + hic[n] * s_i) * isv;
        const double m_i = (hrc[n] * s_i - hic[n] * s_r) * isv;
        col_mr(n) = m_r;
        col_mi(n) = m_i;
        sum_mr += m_r;
        sum_mi += m_i;
        src[n] = s_r;
        sic_im[n] = s_i;
        svc[n] = s_v;
      }

      // tanh(x) = (e^{2x} - 1)/(e^{2x} + 1) on the vectorized exp kernel:
      // exact at 0 and at saturation, absolute error a few ulp elsewhere
      arg = ((4.0 * q) * (sum_mr - col_mr)).min(709.0).max(-709.0);
      ex = arg.exp();
      col_tr = (ex - 1.0) / (ex + 1.0);
      arg = ((4.0 * q) * (sum_mi - col_mi)).min(709.0).max(-709.0);
      ex = arg.exp();
      col_ti = (ex - 1.0) / (ex + 1.0);

      for (Eigen::Index n = 0; n < rows; ++n) {
        const double tr = col_tr(n), ti = col_ti(n);
        crc[n] = beta * (q * tr) + (1.0 - beta) * crc[n];
        cic[n] = beta * (q * ti) + (1.0 - beta) * cic[n];
        v(n, m) = beta * (ec - (q * q) * (tr * tr + ti * ti)) + (1.0 - beta) * v(n, m);
      }
    }
  }

  ComplexMatrix sic(rows, cols);
  sic.real() = sic_r.matrix();
  sic.imag() = sic_i.matrix();
  return consensus(sic, sv.matrix(), h);
}

ComplexVector lmmse_detect(const ComplexVector& y, const ComplexMatrix& h, double noise_variance,
                           double symbol_power) {
  if (h.rows() != y.size()) throw std::invalid_argument("lmmse_detect: dimension mismatch");
  ComplexMatrix gram = symbol_power * (h * h.adjoint());
  gram.diagonal().array() += std::max(noise_variance, kVarianceFloor);
  return symbol_power * (h.adjoint() * hermitian_solve(gram, y));
}

ComplexVector lmmse_detect_naive(const ComplexVector& y, const ComplexMatrix& h,
                                 double noise_variance, double symbol_power) {
  const Eigen::Index n = h.rows();
  if (n != y.size() || n != h.cols())
    throw std::invalid_argument("lmmse_detect_naive: square system required");
  // Gram build, unblocked
  ComplexMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cd acc(0.0, 0.0);
      for (Eigen::Index k = 0; k < n; ++k) acc += h(i, k) * std::conj(h(j, k));
      a(i, j) = symbol_power * acc;
    }
    a(i, i) += std::max(noise_variance, kVarianceFloor);
  }
  // explicit inverse by Gauss-Jordan with partial pivoting, the textbook
  // "invert the filtering matrix" route the cubic complexity figure refers to
  ComplexMatrix inv = ComplexMatrix::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    double best = std::abs(a(col, col));
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double v = std::abs(a(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) throw std::runtime_error("lmmse_detect_naive: singular system");
    if (piv != col) {
      a.row(piv).swap(a.row(col));
      inv.row(piv).swap(inv.row(col));
    }
    const cd pivot = a(col, col);
    for (Eigen::Index c = 0; c < n; ++c) {
      a(col, c) /= pivot;
      inv(col, c) /= pivot;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const cd factor = a(r, col);
      if (factor == cd(0.0, 0.0)) continue;
      for (Eigen::Index c = 0; c < n; ++c) {
        a(r, c) -= factor * a(col, c);
        inv(r, c) -= factor * inv(col, c);
      }
    }
  }
  ComplexVector x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cd acc(0.0, 0.0);
    for (Eigen::Index k = 0; k < n; ++k) acc += inv(i, k) * y(k);
    x(i) = acc;
  }
  ComplexVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cd acc(0.0, 0.0);
    for (Eigen::Index k = 0; k < n; ++k) acc += std::conj(h(k, i)) * x(k);
    out(i) = symbol_power * acc;
  }
  return out;
}

ComplexVector ml_oracle(const ComplexVector& y, const ComplexMatrix& h, double symbol_power) {
  const Eigen::Index n = h.cols();
  if (n > 12) throw std::invalid_argument("ml_oracle: dimension too large for enumeration");
  if (h.rows() != y.size()) throw std::invalid_argument("ml_oracle: dimension mismatch");
  const double q = std::sqrt(symbol_power / 2.0);
  const cd constellation[4] = {{q, q}, {q, -q}, {-q, q}, {-q, -q}};
  ComplexVector candidate(n), best(n);
  double best_metric = -1.0;
  const std::uint64_t total = 1ULL << (2 * static_cast<unsigned>(n));
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t bits = code;
    for (Eigen::Index i = 0; i < n; ++i) {
      candidate(i) = constellation[bits & 3ULL];
      bits >>= 2;
    }
    const double metric = (y - h * candidate).squaredNorm();
    if (best_metric < 0.0 || metric < best_metric) {
      best_metric = metric;
      best = candidate;
    }
  }
  return best;
}

ComplexVector qpsk_map(const std::vector<int>& bits, double symbol_power) {
  if (bits.size() % 2 != 0) throw std::invalid_argument("qpsk_map: even bit count required");
  const double q = std::sqrt(symbol_power / 2.0);
  ComplexVector out(static_cast<Eigen::Index>(bits.size() / 2));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const int b0 = bits[static_cast<std::size_t>(2 * i)];
    const int b1 = bits[static_cast<std::size_t>(2 * i + 1)];
    out(i) = cd(q * (1 - 2 * b0), q * (1 - 2 * b1));
  }
  return out;
}

std::vector<int> qpsk_demap(const ComplexVector& symbols) {
  std::vector<int> bits(static_cast<std::size_t>(2 * symbols.size()));
  for (Eigen::Index i = 0; i < symbols.size(); ++i) {
    bits[static_cast<std::size_t>(2 * i)] = symbols(i).real() < 0.0 ? 1 : 0;
    bits[static_cast<std::size_t>(2 * i + 1)] = symbols(i).imag() < 0.0 ? 1 : 0;
  }
  return bits;
}

ComplexVector qpsk_hard(const ComplexVector& symbols, double symbol_power) {
  return qpsk_map(qpsk_demap(symbols), symbol_power);
}

long count_bit_errors(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("count_bit_errors: length mismatch");
  long errors = 0;
  for (std::size_t i = 0; i < a.size(); ++i) errors += (a[i] != b[i]) ? 1 : 0;
  return errors;
}

}  // namespace capasim
