#include "wavephase/cauchy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wavephase {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// log |psi_hat(xi)| with c = 1.
double magnitude_exponent(const CauchyParams& p, double xi) {
  return 0.5 * (p.alpha - 1.0) * std::log(xi) - kTwoPi * p.gamma_re * xi;
}
}  // namespace

CauchyParams::CauchyParams(double alpha_, double beta_, double gamma_re_,
                           double gamma_im_, std::complex<double> c,
                           bool require_admissible)
    : alpha(alpha_), beta(beta_), gamma_re(gamma_re_), gamma_im(gamma_im_) {
  if (!(alpha > -1.0))
    throw std::invalid_argument("CauchyParams: alpha must be > -1");
  if (require_admissible && !(alpha > 1.0))
    throw std::invalid_argument(
        "CauchyParams: admissible wavelets require alpha > 1");
  if (!(gamma_re > 0.0))
    throw std::invalid_argument("CauchyParams: gamma_re must be > 0");
  if (c == std::complex<double>{0.0, 0.0})
    throw std::invalid_argument("CauchyParams: c must be nonzero");
  log_c = {std::log(std::abs(c)), std::arg(c)};
}

std::complex<double> CauchyParams::c() const { return std::exp(log_c); }

std::complex<double> freq_response(const CauchyParams& p, double xi) {
  if (!(xi > 0.0)) return {0.0, 0.0};
  const double lx = std::log(xi);
  const double mag =
      0.5 * (p.alpha - 1.0) * lx - kTwoPi * p.gamma_re * xi + p.log_c.real();
  const double phase = p.beta * lx - kTwoPi * p.gamma_im * xi + p.log_c.imag();
  return std::polar(std::exp(mag), phase);
}

double center_frequency(const CauchyParams& p) {
  if (!(p.alpha > 1.0))
    throw std::invalid_argument(
        "center_frequency: peak is interior only for alpha > 1");
  return (p.alpha - 1.0) / (2.0 * kTwoPi * p.gamma_re);
}

std::complex<double> derived_freq_response(const CauchyParams& p,
                                           KernelKind kind, double xi) {
  if (!(xi > 0.0)) return {0.0, 0.0};
  const std::complex<double> base = freq_response(p, xi);
  switch (kind) {
    case KernelKind::Psi:
      return base;
    case KernelKind::PsiPrime:
      return std::complex<double>{0.0, kTwoPi * xi} * base;
    case KernelKind::TPsiPrime: {
      // -xi * (psi_hat)'(xi) with the closed-form log derivative.
      const std::complex<double> gamma{p.gamma_re, p.gamma_im};
      const std::complex<double> factor =
          kTwoPi * gamma * xi - 0.5 * (p.alpha - 1.0) -
          std::complex<double>{0.0, p.beta};
      return factor * base;
    }
  }
  throw std::invalid_argument("derived_freq_response: unknown kernel kind");
}

CauchyParams peak_normalized(CauchyParams p) {
  const double xi_b = center_frequency(p);
  p.log_c -= magnitude_exponent(p, xi_b);
  return p;
}

double magnitude_drop_frequency(const CauchyParams& p, double drop_log,
                                bool upper) {
  if (!(drop_log > 0.0))
    throw std::invalid_argument("magnitude_drop_frequency: drop_log must be > 0");
  const double xi_b = center_frequency(p);
  const double peak = magnitude_exponent(p, xi_b);
  auto rel = [&](double xi) { return magnitude_exponent(p, xi) - peak; };

  double inner = xi_b;
  double outer = upper ? 2.0 * xi_b : 0.5 * xi_b;
  for (int i = 0; i < 2048 && rel(outer) > -drop_log; ++i)
    outer = upper ? 2.0 * outer : 0.5 * outer;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (inner + outer);
    (rel(mid) > -drop_log ? inner : outer) = mid;
  }
  return 0.5 * (inner + outer);
}

}  // namespace wavephase
