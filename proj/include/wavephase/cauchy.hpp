#pragma once

#include <complex>

namespace wavephase {

// Parameters of the generalized Cauchy (Klauder) wavelet, defined by its
// frequency response
//
//   psi_hat(xi) = c * xi^((alpha-1)/2) * exp(-2 pi gamma xi) * exp(i beta ln xi)
//
// for xi > 0 and zero on xi <= 0. gamma = gamma_re + i gamma_im with
// gamma_re > 0. alpha > -1 always; the wavelet is admissible only for
// alpha > 1 (enforced when require_admissible is set).
//
// The constant c is kept as its complex logarithm so that peak normalization
// stays representable for large alpha, where the raw peak value of |psi_hat|
// overflows double precision.
struct CauchyParams {
  double alpha = 2.0;
  double beta = 0.0;
  double gamma_re = 1.0;
  double gamma_im = 0.0;
  std::complex<double> log_c{0.0, 0.0};  // log of c; default c = 1

  CauchyParams() = default;
  CauchyParams(double alpha, double beta = 0.0, double gamma_re = 1.0,
               double gamma_im = 0.0, std::complex<double> c = {1.0, 0.0},
               bool require_admissible = false);

  // exp(log_c); may overflow/underflow for extreme normalizations.
  std::complex<double> c() const;
};

enum class KernelKind { Psi, PsiPrime, TPsiPrime };

// psi_hat(xi); exactly zero for xi <= 0. Evaluated in log space so that
// large alpha (the experiments use alpha up to 3000) does not overflow once
// peak-normalized.
std::complex<double> freq_response(const CauchyParams& params, double xi);

// Peak of |psi_hat|: (alpha - 1) / (4 pi gamma_re). Requires alpha > 1.
double center_frequency(const CauchyParams& params);

// Frequency responses of the derived kernels used by the derivative
// expressions of the wavelet transform:
//   PsiPrime:   FT of psi'      = 2 pi i xi psi_hat(xi)
//   TPsiPrime:  FT of (t psi)'  = -xi (psi_hat)'(xi)
// where (psi_hat)'/psi_hat = (alpha-1)/(2 xi) - 2 pi gamma + i beta / xi.
std::complex<double> derived_freq_response(const CauchyParams& params,
                                           KernelKind kind, double xi);

// Returns a copy with c rescaled so that max |psi_hat| == 1. Requires
// alpha > 1. Log-derivatives and phase relations are invariant under this.
CauchyParams peak_normalized(CauchyParams params);

// Frequency at which the normalized magnitude has dropped by `drop_log`
// nats relative to the peak, on the side below (upper == false) or above
// (upper == true) the center frequency. Used for filter support estimation.
double magnitude_drop_frequency(const CauchyParams& params, double drop_log,
                                bool upper);

}  // namespace wavephase
