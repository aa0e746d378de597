#include "wavephase/identities.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wavephase {

namespace {

std::size_t wrap_prev(std::size_t m, std::size_t n) { return m > 0 ? m - 1 : n - 1; }
std::size_t wrap_next(std::size_t m, std::size_t n) { return m + 1 < n ? m + 1 : 0; }

// Mask requiring the full 5-point stencil around (j, m) to sit above the
// magnitude floor; finite differences near zeros of W are meaningless.
std::vector<std::uint8_t> stencil_mask(const DenseGrid& g, double mask_rel) {
  const std::size_t rows = g.n_scales, cols = g.n_times;
  std::vector<double> mag(rows * cols);
  double peak = 0.0;
  for (std::size_t i = 0; i < mag.size(); ++i) {
    mag[i] = std::abs(g.values[i]);
    peak = std::max(peak, mag[i]);
  }
  std::vector<std::uint8_t> mask(rows * cols, 0);
  if (peak == 0.0) return mask;
  const double floor = mask_rel * peak;
  for (std::size_t j = 1; j + 1 < rows; ++j) {
    for (std::size_t m = 0; m < cols; ++m) {
      const std::size_t mp = wrap_prev(m, cols), mn = wrap_next(m, cols);
      const bool ok = mag[j * cols + m] >= floor &&
                      mag[j * cols + mp] >= floor &&
                      mag[j * cols + mn] >= floor &&
                      mag[(j - 1) * cols + m] >= floor &&
                      mag[(j + 1) * cols + m] >= floor;
      mask[j * cols + m] = ok ? 1 : 0;
    }
  }
  return mask;
}

// Phase difference of adjacent cells as the argument of their quotient.
double phase_step(std::complex<double> to, std::complex<double> from) {
  return std::arg(to * std::conj(from));
}

struct ResidualAccumulator {
  double sq = 0.0, ref_sq = 0.0, peak = 0.0, ref_peak = 0.0;
  std::size_t cells = 0;
  void add(double residual, double reference) {
    sq += residual * residual;
    ref_sq += reference * reference;
    peak = std::max(peak, std::abs(residual));
    ref_peak = std::max(ref_peak, std::abs(reference));
    ++cells;
  }
  LevelResidual finish(double hx, double hy) const {
    LevelResidual out;
    out.spacing_x = hx;
    out.spacing_y = hy;
    out.cells = cells;
    if (cells > 0 && ref_sq > 0.0) {
      out.rms = std::sqrt(sq / ref_sq);
      out.max = peak / ref_peak;
    }
    return out;
  }
};

}  // namespace

std::size_t level_samples(const DenseCheckConfig& cfg, int level) {
  return cfg.base_samples << level;
}

std::vector<double> level_scales(const DenseCheckConfig& cfg, int level) {
  const std::size_t n = ((cfg.base_scales - 1) << level) + 1;
  return uniform_scales(cfg.y_lo, cfg.y_hi, n);
}

std::vector<double> sample_signal(const SignalSpec& sig, std::size_t n) {
  std::vector<double> samples(n);
  const double dt = sig.duration / static_cast<double>(n);
  for (std::size_t l = 0; l < n; ++l)
    samples[l] = sig.fn(dt * static_cast<double>(l));
  return samples;
}

DerivativeCheckReport wt_derivative_check(const SignalSpec& sig,
                                          const CauchyParams& params,
                                          const DenseCheckConfig& cfg,
                                          int level) {
  if (cfg.base_scales < 3)
    throw std::invalid_argument("wt_derivative_check: need >= 3 scale rows");
  const std::size_t n = level_samples(cfg, level);
  const std::vector<double> samples = sample_signal(sig, n);
  const double rate = static_cast<double>(n) / sig.duration;
  const std::vector<double> scales = level_scales(cfg, level);

  const CauchyParams normalized = peak_normalized(params);
  const KernelSet kernels = cauchy_kernels(normalized);
  const DenseGrid w = dense_analyze(samples, rate, scales, kernels.psi,
                                    WtConvention::ScaleUnitary);
  const DenseGrid wp = dense_analyze(samples, rate, scales, kernels.psi_prime,
                                     WtConvention::ScaleUnitary);
  const DenseGrid wtp = dense_analyze(samples, rate, scales,
                                      kernels.t_psi_prime,
                                      WtConvention::ScaleUnitary);

  const std::vector<std::uint8_t> mask = stencil_mask(w, cfg.mask_rel);
  const std::size_t rows = w.n_scales, cols = w.n_times;
  const double hx = w.dt;
  const double hy = scales[1] - scales[0];

  ResidualAccumulator acc_x, acc_y;
  for (std::size_t j = 1; j + 1 < rows; ++j) {
    const double y = scales[j];
    for (std::size_t m = 0; m < cols; ++m) {
      if (!mask[j * cols + m]) continue;
      const std::size_t mp = wrap_prev(m, cols), mn = wrap_next(m, cols);
      const std::complex<double> fd_x =
          (w.at(j, mn) - w.at(j, mp)) / (2.0 * hx);
      const std::complex<double> an_x = -wp.at(j, m) / y;
      acc_x.add(std::abs(fd_x - an_x), std::abs(an_x));

      const std::complex<double> fd_y =
          (w.at(j + 1, m) - w.at(j - 1, m)) / (2.0 * hy);
      const std::complex<double> an_y =
          w.at(j, m) / (2.0 * y) - wtp.at(j, m) / y;
      acc_y.add(std::abs(fd_y - an_y), std::abs(an_y));
    }
  }
  return {acc_x.finish(hx, hy), acc_y.finish(hx, hy)};
}

CrReport cr_residual_grid(const DenseGrid& grid, const CauchyParams& hyp,
                          double mask_rel) {
  if (grid.convention != WtConvention::ScaleUnitary)
    throw std::invalid_argument("cr_residual_grid: expects the unitary grid");
  if (grid.n_scales < 3)
    throw std::invalid_argument("cr_residual_grid: need >= 3 scale rows");
  const std::vector<std::uint8_t> mask = stencil_mask(grid, mask_rel);
  const std::size_t rows = grid.n_scales, cols = grid.n_times;
  const double hx = grid.dt;
  const double hy = grid.scales[1] - grid.scales[0];

  const double re_g = hyp.gamma_re, im_g = hyp.gamma_im;
  const double abs_g_sq = re_g * re_g + im_g * im_g;

  ResidualAccumulator acc_x, acc_y;
  for (std::size_t j = 1; j + 1 < rows; ++j) {
    const double y = grid.scales[j];
    for (std::size_t m = 0; m < cols; ++m) {
      if (!mask[j * cols + m]) continue;
      const std::size_t mp = wrap_prev(m, cols), mn = wrap_next(m, cols);
      const double dphi_dx =
          (phase_step(grid.at(j, mn), grid.at(j, m)) +
           phase_step(grid.at(j, m), grid.at(j, mp))) / (2.0 * hx);
      const double dphi_dy =
          (phase_step(grid.at(j + 1, m), grid.at(j, m)) +
           phase_step(grid.at(j, m), grid.at(j - 1, m))) / (2.0 * hy);
      const double dlog_dx =
          std::log(std::abs(grid.at(j, mn)) / std::abs(grid.at(j, mp))) /
          (2.0 * hx);
      const double dlog_dy =
          std::log(std::abs(grid.at(j + 1, m)) / std::abs(grid.at(j - 1, m))) /
          (2.0 * hy);

      const double rhs_x =
          hyp.alpha / (2.0 * y * re_g) - dlog_dy / re_g + im_g * dlog_dx / re_g;
      const double rhs_y = (hyp.alpha * im_g - 2.0 * hyp.beta) / (2.0 * y * re_g) +
                           abs_g_sq * dlog_dx / re_g - im_g * dlog_dy / re_g;
      acc_x.add(dphi_dx - rhs_x, dphi_dx);
      acc_y.add(dphi_dy - rhs_y, dphi_dx);
    }
  }
  return {acc_x.finish(hx, hy), acc_y.finish(hx, hy)};
}

CrReport cr_residual(const SignalSpec& sig, const CauchyParams& params,
                     const DenseCheckConfig& cfg, int level) {
  return cr_residual_kernels(sig, cauchy_kernels(peak_normalized(params)),
                             params, cfg, level);
}

CrReport cr_residual_kernels(const SignalSpec& sig, const KernelSet& kernels,
                             const CauchyParams& hypothesis,
                             const DenseCheckConfig& cfg, int level) {
  const std::size_t n = level_samples(cfg, level);
  const std::vector<double> samples = sample_signal(sig, n);
  const double rate = static_cast<double>(n) / sig.duration;
  const DenseGrid grid = dense_analyze(samples, rate, level_scales(cfg, level),
                                       kernels.psi, WtConvention::ScaleUnitary);
  return cr_residual_grid(grid, hypothesis, cfg.mask_rel);
}

double laplacian_magnitude_target(const CauchyParams& params, double y) {
  return -params.alpha / (2.0 * y * y);
}

double laplacian_phase_target(const CauchyParams& params, double y) {
  return params.beta / (y * y);
}

LaplacianReport laplacian_check(const SignalSpec& sig,
                                const CauchyParams& params,
                                const DenseCheckConfig& cfg, int level) {
  if (params.gamma_re != 1.0 || params.gamma_im != 0.0)
    throw std::invalid_argument("laplacian_check: identities hold for gamma = 1");
  const std::size_t n = level_samples(cfg, level);
  const std::vector<double> samples = sample_signal(sig, n);
  const double rate = static_cast<double>(n) / sig.duration;
  const std::vector<double> scales = level_scales(cfg, level);
  const KernelSet kernels = cauchy_kernels(peak_normalized(params));
  const DenseGrid grid = dense_analyze(samples, rate, scales, kernels.psi,
                                       WtConvention::ScaleUnitary);

  const std::vector<std::uint8_t> mask = stencil_mask(grid, cfg.mask_rel);
  const std::size_t rows = grid.n_scales, cols = grid.n_times;
  const double hx = grid.dt;
  const double hy = scales[1] - scales[0];

  ResidualAccumulator acc_mag, acc_phase;
  for (std::size_t j = 1; j + 1 < rows; ++j) {
    const double y = scales[j];
    const double target_mag = laplacian_magnitude_target(params, y);
    const double target_phase = laplacian_phase_target(params, y);
    for (std::size_t m = 0; m < cols; ++m) {
      if (!mask[j * cols + m]) continue;
      const std::size_t mp = wrap_prev(m, cols), mn = wrap_next(m, cols);
      const double lm = std::log(std::abs(grid.at(j, m)));
      const double d2log_dx =
          (std::log(std::abs(grid.at(j, mn))) - 2.0 * lm +
           std::log(std::abs(grid.at(j, mp)))) / (hx * hx);
      const double d2log_dy =
          (std::log(std::abs(grid.at(j + 1, m))) - 2.0 * lm +
           std::log(std::abs(grid.at(j - 1, m)))) / (hy * hy);
      const double d2phi_dx =
          (phase_step(grid.at(j, mn), grid.at(j, m)) -
           phase_step(grid.at(j, m), grid.at(j, mp))) / (hx * hx);
      const double d2phi_dy =
          (phase_step(grid.at(j + 1, m), grid.at(j, m)) -
           phase_step(grid.at(j, m), grid.at(j - 1, m))) / (hy * hy);
      acc_mag.add(d2log_dx + d2log_dy - target_mag, target_mag);
      acc_phase.add(d2phi_dx + d2phi_dy - target_phase, target_mag);
    }
  }
  return {acc_mag.finish(hx, hy), acc_phase.finish(hx, hy)};
}

}  // namespace wavephase
