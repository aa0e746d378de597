#include "wavephase/reassign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wavephase {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t wrap_prev(std::size_t m, std::size_t n) { return m > 0 ? m - 1 : n - 1; }
std::size_t wrap_next(std::size_t m, std::size_t n) { return m + 1 < n ? m + 1 : 0; }

double phase_step(std::complex<double> to, std::complex<double> from) {
  return std::arg(to * std::conj(from));
}

std::vector<double> magnitudes(const DenseGrid& g, double& peak) {
  std::vector<double> mag(g.values.size());
  peak = 0.0;
  for (std::size_t i = 0; i < mag.size(); ++i) {
    mag[i] = std::abs(g.values[i]);
    peak = std::max(peak, mag[i]);
  }
  return mag;
}

}  // namespace

ReassignmentField reassignment_quotient(std::span<const double> signal,
                                        double sample_rate,
                                        std::span<const double> scales,
                                        const KernelSet& kernels,
                                        double center_freq_hz,
                                        double mask_rel) {
  const DenseGrid w = dense_analyze(signal, sample_rate, scales, kernels.psi,
                                    WtConvention::ScaleUnitary);
  const DenseGrid wp = dense_analyze(signal, sample_rate, scales,
                                     kernels.psi_prime,
                                     WtConvention::ScaleUnitary);
  const DenseGrid wtp = dense_analyze(signal, sample_rate, scales,
                                      kernels.t_psi_prime,
                                      WtConvention::ScaleUnitary);
  const double omega_b = kTwoPi * center_freq_hz;

  ReassignmentField field;
  field.n_scales = w.n_scales;
  field.n_times = w.n_times;
  field.xhat.assign(w.values.size(), 0.0);
  field.xihat.assign(w.values.size(), 0.0);
  field.valid.assign(w.values.size(), 0);

  double peak = 0.0;
  const std::vector<double> mag = magnitudes(w, peak);
  const double floor = mask_rel * peak;

  for (std::size_t j = 0; j < w.n_scales; ++j) {
    const double y = w.scales[j];
    for (std::size_t m = 0; m < w.n_times; ++m) {
      const std::size_t i = j * w.n_times + m;
      if (mag[i] < floor || mag[i] == 0.0) continue;
      const std::complex<double> q_tp = wtp.values[i] / w.values[i];
      const std::complex<double> q_p = wp.values[i] / w.values[i];
      const double x = w.dt * static_cast<double>(m);
      field.xhat[i] = x - y * q_tp.imag() / omega_b;
      // d/dx phi = -Im(W_{psi'}/W)/y; reassigned frequency is that over 2 pi.
      field.xihat[i] = -q_p.imag() / (kTwoPi * y);
      field.valid[i] = 1;
    }
  }
  return field;
}

ReassignmentField reassignment_from_magnitude(const DenseGrid& g,
                                              const CauchyParams& params,
                                              double mask_rel) {
  if (g.convention != WtConvention::ScaleUnitary)
    throw std::invalid_argument(
        "reassignment_from_magnitude: expects the unitary grid");
  if (params.gamma_re != 1.0 || params.gamma_im != 0.0)
    throw std::invalid_argument(
        "reassignment_from_magnitude: magnitude-only map uses gamma = 1");
  if (g.n_scales < 3)
    throw std::invalid_argument("reassignment_from_magnitude: need >= 3 scales");
  const double omega_b = kTwoPi * center_frequency(params);

  ReassignmentField field;
  field.n_scales = g.n_scales;
  field.n_times = g.n_times;
  field.xhat.assign(g.values.size(), 0.0);
  field.xihat.assign(g.values.size(), 0.0);
  field.valid.assign(g.values.size(), 0);

  double peak = 0.0;
  const std::vector<double> mag = magnitudes(g, peak);
  const double floor = mask_rel * peak;
  const double hy = g.scales[1] - g.scales[0];

  for (std::size_t j = 1; j + 1 < g.n_scales; ++j) {
    const double y = g.scales[j];
    for (std::size_t m = 0; m < g.n_times; ++m) {
      const std::size_t i = j * g.n_times + m;
      const std::size_t mp = wrap_prev(m, g.n_times);
      const std::size_t mn = wrap_next(m, g.n_times);
      const bool ok = mag[i] >= floor && mag[j * g.n_times + mp] > 0.0 &&
                      mag[j * g.n_times + mn] > 0.0 &&
                      mag[(j - 1) * g.n_times + m] > 0.0 &&
                      mag[(j + 1) * g.n_times + m] > 0.0;
      if (!ok) continue;
      const double dlog_dx =
          std::log(mag[j * g.n_times + mn] / mag[j * g.n_times + mp]) /
          (2.0 * g.dt);
      const double dlog_dy =
          std::log(mag[(j + 1) * g.n_times + m] / mag[(j - 1) * g.n_times + m]) /
          (2.0 * hy);
      // gamma = 1 relations: d/dx phi = -d/dy logM + alpha/(2y),
      //                      d/dy phi =  d/dx logM - beta/y.
      const double dphi_dx = -dlog_dy + params.alpha / (2.0 * y);
      const double dphi_dy = dlog_dx - params.beta / y;
      const double x = g.dt * static_cast<double>(m);
      field.xhat[i] = x + y * y * dphi_dy / omega_b;
      field.xihat[i] = dphi_dx / kTwoPi;
      field.valid[i] = 1;
    }
  }
  return field;
}

ReassignmentPair reassignment_map(std::span<const double> signal,
                                  double sample_rate,
                                  std::span<const double> scales,
                                  const CauchyParams& params,
                                  double mask_rel) {
  const CauchyParams normalized = peak_normalized(params);
  ReassignmentPair pair;
  pair.quotient =
      reassignment_quotient(signal, sample_rate, scales,
                            cauchy_kernels(normalized),
                            center_frequency(params), mask_rel);
  const DenseGrid grid =
      dense_analyze(signal, sample_rate, scales, cauchy_kernels(normalized).psi,
                    WtConvention::ScaleUnitary);
  pair.magnitude_based = reassignment_from_magnitude(grid, params, mask_rel);

  double x_sq = 0.0, xi_sq = 0.0, xi_ref = 0.0;
  std::size_t cells = 0;
  const double dt = 1.0 / sample_rate;
  for (std::size_t i = 0; i < pair.quotient.valid.size(); ++i) {
    if (!pair.quotient.valid[i] || !pair.magnitude_based.valid[i]) continue;
    const double dx = (pair.quotient.xhat[i] - pair.magnitude_based.xhat[i]) / dt;
    const double dxi = pair.quotient.xihat[i] - pair.magnitude_based.xihat[i];
    x_sq += dx * dx;
    xi_sq += dxi * dxi;
    xi_ref += pair.quotient.xihat[i] * pair.quotient.xihat[i];
    ++cells;
  }
  pair.cells = cells;
  if (cells > 0) {
    pair.agree_x_rms_samples = std::sqrt(x_sq / static_cast<double>(cells));
    pair.agree_xi_rms_rel = xi_ref > 0.0 ? std::sqrt(xi_sq / xi_ref) : 0.0;
  }
  return pair;
}

RidgeSets ridge_points(const DenseGrid& g, double center_freq_hz,
                       double mask_rel) {
  if (g.convention != WtConvention::ScaleUnitary)
    throw std::invalid_argument("ridge_points: expects the unitary grid");
  RidgeSets sets;
  if (g.n_scales < 3) return sets;
  const double omega_b = kTwoPi * center_freq_hz;

  double peak = 0.0;
  const std::vector<double> mag = magnitudes(g, peak);
  if (peak == 0.0) return sets;
  const double floor = mask_rel * peak;
  const double hy = g.scales[1] - g.scales[0];

  for (std::size_t m = 0; m < g.n_times; ++m) {
    const std::size_t mp = wrap_prev(m, g.n_times);
    const std::size_t mn = wrap_next(m, g.n_times);
    // Per-column derivative samples on the interior scale rows.
    std::vector<double> mag_deriv(g.n_scales, 0.0);
    std::vector<double> phase_excess(g.n_scales, 0.0);
    std::vector<std::uint8_t> ok(g.n_scales, 0);
    for (std::size_t j = 1; j + 1 < g.n_scales; ++j) {
      const std::size_t i = j * g.n_times + m;
      if (mag[i] < floor || mag[(j - 1) * g.n_times + m] == 0.0 ||
          mag[(j + 1) * g.n_times + m] == 0.0 ||
          mag[j * g.n_times + mp] == 0.0 || mag[j * g.n_times + mn] == 0.0)
        continue;
      ok[j] = 1;
      const double y = g.scales[j];
      // d/dy log(y^{-1/2} M)
      mag_deriv[j] =
          std::log(mag[(j + 1) * g.n_times + m] / mag[(j - 1) * g.n_times + m]) /
              (2.0 * hy) -
          0.5 / y;
      const double dphi_dx =
          (phase_step(g.at(j, mn), g.at(j, m)) +
           phase_step(g.at(j, m), g.at(j, mp))) / (2.0 * g.dt);
      phase_excess[j] = dphi_dx - omega_b / y;
    }
    for (std::size_t j = 1; j + 2 < g.n_scales; ++j) {
      if (!ok[j] || !ok[j + 1]) continue;
      const double y = g.scales[j];
      if (mag_deriv[j] > 0.0 && mag_deriv[j + 1] <= 0.0) {
        const double t = mag_deriv[j] / (mag_deriv[j] - mag_deriv[j + 1]);
        sets.magnitude.push_back({m, y + t * hy});
      }
      // d/dy of the excess must be positive: crossing from below.
      if (phase_excess[j] < 0.0 && phase_excess[j + 1] >= 0.0) {
        const double t = -phase_excess[j] / (phase_excess[j + 1] - phase_excess[j]);
        sets.phase.push_back({m, y + t * hy});
      }
    }
  }
  return sets;
}

RidgeCoincidence ridge_coincidence(const RidgeSets& sets,
                                   std::span<const double> scales) {
  RidgeCoincidence out;
  out.magnitude_count = sets.magnitude.size();
  out.phase_count = sets.phase.size();
  if (sets.magnitude.empty()) return out;
  const double hy = scales.size() > 1 ? scales[1] - scales[0] : 1.0;

  std::size_t matched = 0;
  double max_matched = 0.0;
  for (const RidgePoint& p : sets.magnitude) {
    double best = std::numeric_limits<double>::infinity();
    for (const RidgePoint& q : sets.phase) {
      if (q.time_index != p.time_index) continue;
      best = std::min(best, std::abs(q.y - p.y) / hy);
    }
    if (best <= 1.0) {
      ++matched;
      max_matched = std::max(max_matched, best);
    }
  }
  out.matched_fraction =
      static_cast<double>(matched) / static_cast<double>(sets.magnitude.size());
  out.max_distance_cells = max_matched;
  return out;
}

GaborReassignReport gabor_reassignment_check(std::span<const double> signal,
                                             double sample_rate,
                                             std::span<const double> scales,
                                             double center_freq_hz,
                                             double mask_rel) {
  const KernelSet kernels = gabor_kernels(center_freq_hz);
  const DenseGrid w = dense_analyze(signal, sample_rate, scales, kernels.psi,
                                    WtConvention::ScaleUnitary);
  const DenseGrid wt = dense_analyze(signal, sample_rate, scales, kernels.t_psi,
                                     WtConvention::ScaleUnitary);

  GaborReassignReport report;
  auto& quot = report.quotient;
  auto& magf = report.magnitude_based;
  quot.n_scales = magf.n_scales = w.n_scales;
  quot.n_times = magf.n_times = w.n_times;
  quot.xhat.assign(w.values.size(), 0.0);
  quot.xihat.assign(w.values.size(), 0.0);
  quot.valid.assign(w.values.size(), 0);
  magf.xhat.assign(w.values.size(), 0.0);
  magf.xihat.assign(w.values.size(), 0.0);
  magf.valid.assign(w.values.size(), 0);

  double peak = 0.0;
  const std::vector<double> mag = magnitudes(w, peak);
  const double floor = mask_rel * peak;

  double x_sq = 0.0;
  std::size_t cells = 0;
  for (std::size_t j = 1; j + 1 < w.n_scales; ++j) {
    const double y = w.scales[j];
    for (std::size_t m = 0; m < w.n_times; ++m) {
      const std::size_t i = j * w.n_times + m;
      const std::size_t mp = wrap_prev(m, w.n_times);
      const std::size_t mn = wrap_next(m, w.n_times);
      if (mag[i] < floor || mag[j * w.n_times + mp] == 0.0 ||
          mag[j * w.n_times + mn] == 0.0)
        continue;
      const double x = w.dt * static_cast<double>(m);
      const double dphi_dx =
          (phase_step(w.at(j, mn), w.at(j, m)) +
           phase_step(w.at(j, m), w.at(j, mp))) / (2.0 * w.dt);
      const double xihat = dphi_dx / kTwoPi;

      // Center-of-gravity form through the time-weighted quotient.
      quot.xhat[i] = x + y * (wt.values[i] / w.values[i]).real();
      quot.xihat[i] = xihat;
      quot.valid[i] = 1;

      // Log-magnitude form x + y^2 d/dx log M, Gabor identity.
      const double dlog_dx =
          std::log(mag[j * w.n_times + mn] / mag[j * w.n_times + mp]) /
          (2.0 * w.dt);
      magf.xhat[i] = x + y * y * dlog_dx;
      magf.xihat[i] = xihat;
      magf.valid[i] = 1;

      const double dx = (quot.xhat[i] - magf.xhat[i]) / w.dt;
      x_sq += dx * dx;
      ++cells;
    }
  }
  report.cells = cells;
  if (cells > 0)
    report.agree_x_rms_samples = std::sqrt(x_sq / static_cast<double>(cells));
  return report;
}

}  // namespace wavephase
