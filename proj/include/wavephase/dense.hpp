#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "wavephase/cauchy.hpp"

namespace wavephase {

// Mother-kernel frequency responses used by the dense (undecimated) analysis:
// the wavelet itself and the derived kernels entering the derivative and
// reassignment expressions.
struct KernelSet {
  std::function<std::complex<double>(double)> psi;
  std::function<std::complex<double>(double)> psi_prime;    // FT of psi'
  std::function<std::complex<double>(double)> t_psi;        // FT of t psi
  std::function<std::complex<double>(double)> t_psi_prime;  // FT of (t psi)'
};

KernelSet cauchy_kernels(const CauchyParams& params);

// Gabor wavelet psi(t) = exp(-t^2/2 + 2 pi i f_b t); its frequency response
// is the Gaussian sqrt(2 pi) exp(-2 pi^2 (xi - f_b)^2), not analytic.
KernelSet gabor_kernels(double center_freq_hz);

// Sum of two peak-normalized Cauchy responses with different orders: a
// synthetic wavelet with a two-peaked magnitude, used as negative control.
KernelSet two_peak_kernels(const CauchyParams& a, const CauchyParams& b);

enum class WtConvention { ScaleUnitary, FreqConvention };

// Undecimated wavelet transform samples over a (time x scale) lattice.
// ScaleUnitary holds W(x, y) (unitary dilation); FreqConvention holds
// W~(x, xi) with xi = xi_b / y. Rows are scales, columns are time samples.
struct DenseGrid {
  std::size_t n_scales = 0;
  std::size_t n_times = 0;
  std::vector<std::complex<double>> values;  // n_scales x n_times
  std::vector<double> scales;                // y, seconds (ascending)
  double dt = 0.0;                           // 1 / xi_s
  WtConvention convention = WtConvention::ScaleUnitary;

  std::complex<double> at(std::size_t j, std::size_t m) const {
    return values[j * n_times + m];
  }
};

// W(x_m, y_j) = sqrt(y_j) / L * sum_i s_hat[i] conj(kernel(y_j xi_i)) e^{2 pi i i m / L}
// over signed bin frequencies xi_i; the FreqConvention variant drops the
// sqrt(y) factor.
DenseGrid dense_analyze(std::span<const double> signal, double sample_rate,
                        std::span<const double> scales,
                        const std::function<std::complex<double>(double)>& kernel,
                        WtConvention convention);

// Uniform scale lattice [y_lo, y_hi] with n points.
std::vector<double> uniform_scales(double y_lo, double y_hi, std::size_t n);

}  // namespace wavephase
