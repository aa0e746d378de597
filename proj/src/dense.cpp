#include "wavephase/dense.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wavephase/fft.hpp"

namespace wavephase {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

KernelSet cauchy_kernels(const CauchyParams& params) {
  KernelSet set;
  set.psi = [params](double xi) { return freq_response(params, xi); };
  set.psi_prime = [params](double xi) {
    return derived_freq_response(params, KernelKind::PsiPrime, xi);
  };
  set.t_psi_prime = [params](double xi) {
    return derived_freq_response(params, KernelKind::TPsiPrime, xi);
  };
  // FT of t psi = -(2 pi i)^{-1} (psi_hat)'.
  set.t_psi = [params](double xi) -> std::complex<double> {
    if (!(xi > 0.0)) return {0.0, 0.0};
    const std::complex<double> gamma{params.gamma_re, params.gamma_im};
    const std::complex<double> log_deriv =
        0.5 * (params.alpha - 1.0) / xi - kTwoPi * gamma +
        std::complex<double>{0.0, params.beta / xi};
    return freq_response(params, xi) * log_deriv /
           std::complex<double>{0.0, -kTwoPi};
  };
  return set;
}

KernelSet gabor_kernels(double f_b) {
  const double norm = std::sqrt(kTwoPi);
  auto psi = [f_b, norm](double xi) -> std::complex<double> {
    const double d = xi - f_b;
    return {norm * std::exp(-2.0 * std::numbers::pi * std::numbers::pi * d * d),
            0.0};
  };
  KernelSet set;
  set.psi = psi;
  set.psi_prime = [psi](double xi) {
    return std::complex<double>{0.0, kTwoPi * xi} * psi(xi);
  };
  // (psi_hat)'(xi) = -4 pi^2 (xi - f_b) psi_hat(xi).
  set.t_psi = [psi, f_b](double xi) {
    const double deriv_factor = -2.0 * kTwoPi * std::numbers::pi * (xi - f_b);
    return psi(xi) * deriv_factor / std::complex<double>{0.0, -kTwoPi};
  };
  set.t_psi_prime = [psi, f_b](double xi) {
    const double deriv_factor = -2.0 * kTwoPi * std::numbers::pi * (xi - f_b);
    return -xi * deriv_factor * psi(xi);
  };
  return set;
}

KernelSet two_peak_kernels(const CauchyParams& a, const CauchyParams& b) {
  const KernelSet ka = cauchy_kernels(peak_normalized(a));
  const KernelSet kb = cauchy_kernels(peak_normalized(b));
  KernelSet set;
  set.psi = [ka, kb](double xi) { return ka.psi(xi) + kb.psi(xi); };
  set.psi_prime = [ka, kb](double xi) {
    return ka.psi_prime(xi) + kb.psi_prime(xi);
  };
  set.t_psi = [ka, kb](double xi) { return ka.t_psi(xi) + kb.t_psi(xi); };
  set.t_psi_prime = [ka, kb](double xi) {
    return ka.t_psi_prime(xi) + kb.t_psi_prime(xi);
  };
  return set;
}

DenseGrid dense_analyze(
    std::span<const double> signal, double sample_rate,
    std::span<const double> scales,
    const std::function<std::complex<double>(double)>& kernel,
    WtConvention convention) {
  const std::size_t length = signal.size();
  if (length < 4) throw std::invalid_argument("dense_analyze: signal too short");
  if (scales.empty())
    throw std::invalid_argument("dense_analyze: no scales given");

  DenseGrid grid;
  grid.n_scales = scales.size();
  grid.n_times = length;
  grid.scales.assign(scales.begin(), scales.end());
  grid.dt = 1.0 / sample_rate;
  grid.convention = convention;
  grid.values.resize(grid.n_scales * length);

  const std::vector<std::complex<double>> spectrum = fft::forward_real(signal);
  const double bin_hz = sample_rate / static_cast<double>(length);
  std::vector<std::complex<double>> product(length), row(length);
  const double inv_len = 1.0 / static_cast<double>(length);

  for (std::size_t j = 0; j < grid.n_scales; ++j) {
    const double y = scales[j];
    if (!(y > 0.0)) throw std::invalid_argument("dense_analyze: scale <= 0");
    for (std::size_t i = 0; i < length; ++i) {
      // Signed bin frequency; the Nyquist bin counts as positive.
      const double xi =
          2 * i <= length
              ? bin_hz * static_cast<double>(i)
              : -bin_hz * static_cast<double>(length - i);
      product[i] = spectrum[i] * std::conj(kernel(y * xi));
    }
    fft::backward(product, row);
    const double gain =
        (convention == WtConvention::ScaleUnitary ? std::sqrt(y) : 1.0) *
        inv_len;
    for (std::size_t m = 0; m < length; ++m)
      grid.values[j * length + m] = row[m] * gain;
  }
  return grid;
}

std::vector<double> uniform_scales(double y_lo, double y_hi, std::size_t n) {
  if (n < 2 || !(y_lo > 0.0) || !(y_hi > y_lo))
    throw std::invalid_argument("uniform_scales: bad range");
  std::vector<double> scales(n);
  const double step = (y_hi - y_lo) / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j)
    scales[j] = y_lo + step * static_cast<double>(j);
  return scales;
}

}  // namespace wavephase
