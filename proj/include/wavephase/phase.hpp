#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wavephase/cauchy.hpp"
#include "wavephase/filterbank.hpp"

namespace wavephase {

// Magnitude-only view of a coefficient grid. `values` holds the K wavelet
// rows; the (real) lowpass row is carried along for metrics and synthesis
// but takes no part in phase estimation.
struct MagnitudeGrid {
  std::size_t channels = 0;
  std::size_t hops = 0;
  std::vector<double> values;   // channels x hops, row-major, >= 0
  std::vector<double> lowpass;  // hops, >= 0
  std::vector<double> centers;  // Hz, strictly decreasing
  double hop_seconds = 0.0;     // a_d / xi_s
  double log_floor_db = -300.0;
  FilterBankSpec spec;

  double& at(std::size_t k, std::size_t n) { return values[k * hops + n]; }
  const double& at(std::size_t k, std::size_t n) const {
    return values[k * hops + n];
  }
};

MagnitudeGrid magnitude(const CoefficientGrid& grid,
                        double log_floor_db = -300.0);

// Phase-derivative estimates: dphi_dx in rad/s, dphi_dxi in rad/Hz.
struct PhaseDerivativeGrids {
  std::size_t channels = 0;
  std::size_t hops = 0;
  std::vector<double> dphi_dx;
  std::vector<double> dphi_dxi;
};

struct PhaseGrid {
  std::size_t channels = 0;
  std::size_t hops = 0;
  std::vector<double> values;         // rad
  std::vector<std::uint8_t> reliable; // 1 exactly on the integration set
  std::vector<std::int32_t> component;  // component id, -1 outside the set
};

// ln(max(values, floor)) with floor = max(values) * 10^(log_floor_db / 20);
// an all-zero grid falls back to an absolute floor so the result stays finite.
std::vector<double> log_magnitude(const MagnitudeGrid& m);

// Centered time differences (g[n+1] - g[n-1]) / (2 hop_seconds); circular
// when wrap is set, one-sided at n = 0 and n = N-1 otherwise. Needs N >= 3.
std::vector<double> time_diff(std::span<const double> g, std::size_t channels,
                              std::size_t hops, double hop_seconds, bool wrap);

// Weighted centered differences across channels on the nonuniform center
// grid; one-sided at the scale edges. Needs K >= 3.
std::vector<double> scale_diff(std::span<const double> g, std::size_t channels,
                               std::size_t hops,
                               std::span<const double> centers);

// Discrete phase-magnitude relations (gamma = 1 form):
//   dphi_dx  =  4 pi xi_k^2 / (alpha-1) * scale_diff(logm) + 2 pi xi_k
//   dphi_dxi = -(alpha-1) / (4 pi xi_k^2) * time_diff(logm) + beta / xi_k
PhaseDerivativeGrids phase_derivatives(std::span<const double> logm,
                                       std::size_t channels, std::size_t hops,
                                       const CauchyParams& params,
                                       std::span<const double> centers,
                                       double hop_seconds);

struct WpghiStats {
  std::size_t heap_pops = 0;
  std::size_t components = 0;
  std::vector<std::uint32_t> pop_counts;  // per cell; each must end at <= 1
};

// Phase gradient heap integration over the magnitude grid: cells above
// tol * max(M) are integrated with the trapezoidal two-point rule in
// magnitude order (max-heap); each new component is seeded with phase 0 at
// its magnitude argmax; everything below tolerance gets reproducible random
// phase keyed by (seed, cell). Time neighbors wrap circularly, scale
// neighbors do not.
PhaseGrid wpghi(const MagnitudeGrid& m, const PhaseDerivativeGrids& d,
                double tol, std::uint64_t seed, WpghiStats* stats = nullptr);

// M * exp(i phase); the lowpass row is passed through with positive sign.
CoefficientGrid combine(const MagnitudeGrid& m, const PhaseGrid& p);

// Convenience pipeline: log-magnitude, phase derivatives, heap integration.
PhaseGrid wpghi_from_magnitude(const MagnitudeGrid& m,
                               const CauchyParams& params, double tol,
                               std::uint64_t seed);

}  // namespace wavephase
