#include "wavephase/griffin_lim.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "wavephase/metrics.hpp"
#include "wavephase/rng.hpp"

namespace wavephase {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Replace moduli by the target magnitudes, keeping phases; the lowpass row
// is reset to its target values.
void project_magnitude(CoefficientGrid& grid, const MagnitudeGrid& m) {
  for (std::size_t i = 0; i < grid.wavelet.size(); ++i) {
    const double mod = std::abs(grid.wavelet[i]);
    grid.wavelet[i] = mod > 0.0 ? grid.wavelet[i] * (m.values[i] / mod)
                                : std::complex<double>{m.values[i], 0.0};
  }
  grid.lowpass = m.lowpass;
}

}  // namespace

FglimResult fast_griffin_lim(const MagnitudeGrid& m, const WaveletFrame& frame,
                             const FglimConfig& cfg) {
  if (m.channels != frame.spec.channels || m.hops != frame.spec.hops())
    throw std::invalid_argument("fast_griffin_lim: grid does not match frame");
  if (cfg.max_iter < 1)
    throw std::invalid_argument("fast_griffin_lim: max_iter must be >= 1");
  if (!(cfg.momentum >= 0.0) || cfg.momentum >= 1.0)
    throw std::invalid_argument("fast_griffin_lim: momentum must be in [0, 1)");
  if (cfg.init == FglimInit::WarmStart && cfg.warm_start == nullptr)
    throw std::invalid_argument("fast_griffin_lim: warm start phase missing");

  FglimResult result;
  double peak = 0.0;
  for (double v : m.values) peak = std::max(peak, v);
  for (double v : m.lowpass) peak = std::max(peak, v);
  if (peak == 0.0) {
    // Degenerate target: one synthesis of the zero grid.
    CoefficientGrid zero;
    zero.channels = m.channels;
    zero.hops = m.hops;
    zero.spec = m.spec;
    zero.centers = m.centers;
    zero.wavelet.assign(m.values.size(), {0.0, 0.0});
    zero.lowpass.assign(m.lowpass.size(), 0.0);
    result.signal = synthesize(zero, frame, cfg.cg_tol, cfg.cg_maxit);
    result.coeffs = std::move(zero);
    return result;
  }

  CoefficientGrid c;
  c.channels = m.channels;
  c.hops = m.hops;
  c.spec = m.spec;
  c.centers = m.centers;
  c.wavelet.resize(m.values.size());
  if (cfg.init == FglimInit::WarmStart) {
    if (cfg.warm_start->channels != m.channels ||
        cfg.warm_start->hops != m.hops)
      throw std::invalid_argument("fast_griffin_lim: warm start size mismatch");
    for (std::size_t i = 0; i < m.values.size(); ++i)
      c.wavelet[i] = std::polar(m.values[i], cfg.warm_start->values[i]);
  } else {
    for (std::size_t i = 0; i < m.values.size(); ++i)
      c.wavelet[i] = std::polar(m.values[i], kTwoPi * hash_unit(cfg.seed, i));
  }
  c.lowpass = m.lowpass;
  CoefficientGrid c_prev = c;

  CoefficientGrid momentum_grid = c;
  std::vector<std::complex<double>> warm_spectrum;
  double best_sc = std::numeric_limits<double>::infinity();
  CoefficientGrid best_grid;
  std::vector<double> best_signal;

  for (int it = 0; it < cfg.max_iter; ++it) {
    for (std::size_t i = 0; i < c.wavelet.size(); ++i)
      momentum_grid.wavelet[i] =
          c.wavelet[i] + cfg.momentum * (c.wavelet[i] - c_prev.wavelet[i]);
    momentum_grid.lowpass = c.lowpass;

    SynthesisResult synth = synthesize_ls(momentum_grid, frame, cfg.cg_tol,
                                          cfg.cg_maxit, &warm_spectrum);
    if (!synth.converged)
      throw std::runtime_error(
          "fast_griffin_lim: synthesis CG failed to converge (residual " +
          std::to_string(synth.residual) + ")");
    warm_spectrum = synth.spectrum;
    CoefficientGrid consistent = analyze_spectrum(warm_spectrum, frame);

    const double sc = spectral_convergence(magnitude(consistent), m);
    result.sc_trace_db.push_back(sc);
    if (sc < best_sc) {
      best_sc = sc;
      best_grid = consistent;
      best_signal = std::move(synth.signal);
      result.best_iteration = it;
    }

    c_prev = std::move(c);
    c = std::move(consistent);
    project_magnitude(c, m);

    if (static_cast<int>(result.sc_trace_db.size()) > cfg.stop_window) {
      double prior_best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0;
           i + static_cast<std::size_t>(cfg.stop_window) <
           result.sc_trace_db.size();
           ++i)
        prior_best = std::min(prior_best, result.sc_trace_db[i]);
      if (prior_best - best_sc < cfg.stop_improve_db) break;
    }
  }

  project_magnitude(best_grid, m);
  result.coeffs = std::move(best_grid);
  result.signal = std::move(best_signal);
  return result;
}

}  // namespace wavephase
