#pragma once

#include <cstdint>
#include <span>

#include "wavephase/dense.hpp"

namespace wavephase {

// Reassignment target coordinates per grid cell. The phase-gradient map is
// evaluated with the angular center frequency Omega_b = 2 pi xi_b, so a pure
// tone at xi_0 reassigns to xihat = xi_0 and an impulse at t_0 to xhat = t_0.
struct ReassignmentField {
  std::size_t n_scales = 0;
  std::size_t n_times = 0;
  std::vector<double> xhat;            // seconds
  std::vector<double> xihat;           // Hz
  std::vector<std::uint8_t> valid;     // magnitude above floor

  double x_at(std::size_t j, std::size_t m) const { return xhat[j * n_times + m]; }
  double xi_at(std::size_t j, std::size_t m) const { return xihat[j * n_times + m]; }
};

// Quotient form: xhat = x - y Im(W_{(t psi)'} / W) / Omega_b,
//                xihat = -Im(W_{psi'} / W) / (2 pi y).
ReassignmentField reassignment_quotient(std::span<const double> signal,
                                        double sample_rate,
                                        std::span<const double> scales,
                                        const KernelSet& kernels,
                                        double center_freq_hz, double mask_rel);

// Magnitude-only form for Cauchy wavelets with gamma = 1, substituting the
// phase-magnitude relations into the phase-gradient map; log-magnitude
// derivatives come from central differences on the grid.
ReassignmentField reassignment_from_magnitude(const DenseGrid& psi_grid,
                                              const CauchyParams& params,
                                              double mask_rel);

struct ReassignmentPair {
  ReassignmentField quotient;
  ReassignmentField magnitude_based;
  double agree_x_rms_samples = 0.0;  // rms over the joint mask, in samples
  double agree_xi_rms_rel = 0.0;     // rms ratio against the quotient values
  std::size_t cells = 0;
};

// Both variants plus their pointwise agreement on the joint mask.
ReassignmentPair reassignment_map(std::span<const double> signal,
                                  double sample_rate,
                                  std::span<const double> scales,
                                  const CauchyParams& params,
                                  double mask_rel = 1e-3);

struct RidgePoint {
  std::size_t time_index = 0;
  double y = 0.0;  // interpolated crossing, seconds
};

struct RidgeSets {
  std::vector<RidgePoint> magnitude;  // d/dy log(y^{-1/2} M) = 0, maximum
  std::vector<RidgePoint> phase;      // d/dx phi = Omega_b / y, increasing
};

RidgeSets ridge_points(const DenseGrid& psi_grid, double center_freq_hz,
                       double mask_rel = 1e-3);

struct RidgeCoincidence {
  double max_distance_cells = 0.0;  // over matched magnitude ridge points
  double matched_fraction = 0.0;    // magnitude points with a phase partner
                                    // within one scale cell in the same column
  std::size_t magnitude_count = 0;
  std::size_t phase_count = 0;
};

RidgeCoincidence ridge_coincidence(const RidgeSets& sets,
                                   std::span<const double> scales);

// Gabor special case: the center-of-gravity map's first coordinate computed
// through the W_{t psi} / W quotient and through the log-magnitude form
// x + y^2 d/dx log M, which coincide for the Gabor wavelet.
struct GaborReassignReport {
  ReassignmentField quotient;
  ReassignmentField magnitude_based;
  double agree_x_rms_samples = 0.0;
  std::size_t cells = 0;
};

GaborReassignReport gabor_reassignment_check(std::span<const double> signal,
                                             double sample_rate,
                                             std::span<const double> scales,
                                             double center_freq_hz,
                                             double mask_rel = 1e-3);

}  // namespace wavephase
