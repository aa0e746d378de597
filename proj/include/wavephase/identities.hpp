#pragma once

#include <functional>

#include "wavephase/dense.hpp"

namespace wavephase {

// Continuous-time test signal on [0, duration); sampled at whatever rate a
// refinement level asks for.
struct SignalSpec {
  std::function<double(double)> fn;
  double duration = 1.0;
};

struct DenseCheckConfig {
  std::size_t base_samples = 512;  // time samples at level 0
  std::size_t base_scales = 17;    // scale rows at level 0
  double y_lo = 0.1;               // scale range, seconds
  double y_hi = 0.2;
  double mask_rel = 1e-3;          // evaluate only where |W| >= mask_rel * max
};

std::size_t level_samples(const DenseCheckConfig& cfg, int level);
std::vector<double> level_scales(const DenseCheckConfig& cfg, int level);
std::vector<double> sample_signal(const SignalSpec& sig, std::size_t n);

struct LevelResidual {
  double spacing_x = 0.0;
  double spacing_y = 0.0;
  double rms = 0.0;  // relative to the RMS of the quantity being checked
  double max = 0.0;
  std::size_t cells = 0;
};

// Closed-form derivative expressions against central finite differences of
// the dense transform:  d/dx W = -W_{psi'}/y,  d/dy W = W/(2y) - W_{(t psi)'}/y.
struct DerivativeCheckReport {
  LevelResidual x;
  LevelResidual y;
};
DerivativeCheckReport wt_derivative_check(const SignalSpec& sig,
                                          const CauchyParams& params,
                                          const DenseCheckConfig& cfg,
                                          int level);

// Cauchy-Riemann phase-magnitude residuals (general gamma):
//   r_x = d/dx phi - [alpha/(2 y Re g) - d/dy logM / Re g + Im g d/dx logM / Re g]
//   r_y = d/dy phi - [(alpha Im g - 2 beta)/(2 y Re g) + |g|^2 d/dx logM / Re g
//
//                     - Im g d/dy logM / Re g]
// with phase differences taken principal-value on the wrapped phase.
struct CrReport {
  LevelResidual x;
  LevelResidual y;
};
CrReport cr_residual_grid(const DenseGrid& grid, const CauchyParams& hypothesis,
                          double mask_rel);
CrReport cr_residual(const SignalSpec& sig, const CauchyParams& params,
                     const DenseCheckConfig& cfg, int level);
// Same residuals on a grid analyzed with arbitrary kernels (negative controls).
CrReport cr_residual_kernels(const SignalSpec& sig, const KernelSet& kernels,
                             const CauchyParams& hypothesis,
                             const DenseCheckConfig& cfg, int level);

// Second-order identities for gamma = 1: the log-magnitude Laplacian must be
// -alpha/(2 y^2) and the phase Laplacian beta/y^2.
struct LaplacianReport {
  LevelResidual magnitude;
  LevelResidual phase;
};
LaplacianReport laplacian_check(const SignalSpec& sig,
                                const CauchyParams& params,
                                const DenseCheckConfig& cfg, int level);
double laplacian_magnitude_target(const CauchyParams& params, double y);
double laplacian_phase_target(const CauchyParams& params, double y);

}  // namespace wavephase
