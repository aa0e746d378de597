#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wavephase/cauchy.hpp"

namespace wavephase {

// Discretization parameters of the wavelet filter bank. The K channel center
// frequencies are xi_k = 2^(-k/B) * xi_b / y_m with xi_b the wavelet center
// frequency, so row 0 is the highest channel and centers decrease with k.
struct FilterBankSpec {
  std::size_t signal_length = 0;  // L, samples
  double sample_rate = 1.0;       // xi_s, Hz
  std::size_t channels = 0;       // K
  double bins_per_octave = 1.0;   // B
  double min_scale = 1.0;         // y_m, seconds
  std::size_t decimation = 1;     // a_d, samples; must divide L

  std::size_t hops() const { return signal_length / decimation; }
  double hop_seconds() const {
    return static_cast<double>(decimation) / sample_rate;
  }

  // Throws std::invalid_argument when any invariant fails (a_d | L, K >= 1,
  // positive rates/scales, all centers inside (0, xi_s/2]).
  void validate(const CauchyParams& params) const;

  // Solves for (B, y_m) so that the channel centers run geometrically from
  // f_max (k = 0) down to f_min (k = K-1).
  static FilterBankSpec from_frequency_range(std::size_t signal_length,
                                             double sample_rate,
                                             std::size_t channels,
                                             std::size_t decimation,
                                             double f_min, double f_max,
                                             const CauchyParams& params);
};

double channel_center(const FilterBankSpec& spec, const CauchyParams& params,
                      std::size_t k);

// One sampled frequency response, stored on its effective support
// [first_bin, first_bin + values.size()) inside the positive-frequency bins.
struct BandFilter {
  std::size_t first_bin = 0;
  std::vector<std::complex<double>> values;
};

struct WaveletFrame {
  FilterBankSpec spec;
  CauchyParams params;  // peak-normalized copy of the construction params
  std::vector<BandFilter> filters;            // K wavelet channels
  std::vector<std::complex<double>> lowpass;  // dense, length L, Hermitian
  std::vector<double> centers;                // K center frequencies, Hz
  double base_center = 0.0;                   // xi_b of `params`, Hz

  // Diagonal of the real-signal frame operator over bins 0..floor(L/2);
  // used as CG preconditioner and by the painless frame-ratio formula.
  std::vector<double> coverage;

  std::complex<double> filter_value(std::size_t k, std::size_t bin) const;
};

// Samples psi_hat on each channel (Eq.-(19)-style y_k xi_s j / L arguments),
// adds the lowpass a_d^{-1} P_lp sqrt(max(Psi) - Psi) with a raised-cosine
// plateau, and rejects non-invertible configurations.
WaveletFrame build_frame(const FilterBankSpec& spec, const CauchyParams& params);

struct CoefficientGrid {
  std::size_t channels = 0;  // K
  std::size_t hops = 0;      // N = L / a_d
  std::vector<std::complex<double>> wavelet;  // channels x hops, row-major
  std::vector<double> lowpass;                // hops
  FilterBankSpec spec;
  std::vector<double> centers;

  std::complex<double>& at(std::size_t k, std::size_t n) {
    return wavelet[k * hops + n];
  }
  const std::complex<double>& at(std::size_t k, std::size_t n) const {
    return wavelet[k * hops + n];
  }
};

// Analysis: wavelet[k][n] = <s, T_{n a_d} psi_{y_k}> computed as the inverse
// DFT of s_hat * conj(filter_k) subsampled by a_d (translation is circular);
// the lowpass row is the real part of the analogous lowpass output.
CoefficientGrid analyze(std::span<const double> signal,
                        const WaveletFrame& frame);

// Same, starting from the full-length unnormalized spectrum of the signal.
CoefficientGrid analyze_spectrum(std::span<const std::complex<double>> spectrum,
                                 const WaveletFrame& frame);

struct SynthesisResult {
  std::vector<double> signal;
  std::vector<std::complex<double>> spectrum;  // unnormalized DFT of signal
  int iterations = 0;
  double residual = 0.0;  // relative residual of the normal equations
  bool converged = false;
};

// Least-squares synthesis: preconditioned conjugate gradient on the
// frame-operator normal equations, carried out in the DFT domain over the
// space of real signals. warm_start, when given, seeds CG with a previous
// solution spectrum (same length L).
SynthesisResult synthesize_ls(
    const CoefficientGrid& coeffs, const WaveletFrame& frame, double cg_tol,
    int cg_maxit,
    const std::vector<std::complex<double>>* warm_start = nullptr);

// Convenience wrapper; throws std::runtime_error with the final residual
// when CG does not reach cg_tol within cg_maxit iterations.
std::vector<double> synthesize(const CoefficientGrid& coeffs,
                               const WaveletFrame& frame,
                               double cg_tol = 1e-12, int cg_maxit = 500);

// B/A estimate: power iteration for the largest frame-operator eigenvalue
// and CG-backed inverse iteration for the smallest. Throws when the inverse
// iteration stalls (near-singular frame).
double frame_bound_ratio(const WaveletFrame& frame, int iters = 30,
                         std::uint64_t seed = 1);

// Sum_k |filters[k]|^2 + |a_d * lowpass|^2 over bins 0..floor(L/2): the
// invertibility-precondition function (must be zero-free).
std::vector<double> total_coverage(const WaveletFrame& frame);

}  // namespace wavephase
