#pragma once

#include <string>

#include "wavephase/cauchy.hpp"
#include "wavephase/filterbank.hpp"

namespace wavephase {

// Binary coefficient-grid format, little endian:
//   magic "DCWT", version u16, header {L u64, K u32, a_d u32, xi_s f64,
//   B f64, y_m f64, alpha f64, beta f64, gamma_re f64, gamma_im f64},
//   K rows x L/a_d complex128 (re, im interleaved), L/a_d float64 lowpass.
inline constexpr std::uint16_t kGridFormatVersion = 1;

void save_grid(const std::string& path, const CoefficientGrid& grid,
               const CauchyParams& params);

struct LoadedGrid {
  CoefficientGrid grid;
  CauchyParams params;
};

// Validates magic, version and dimension consistency; throws
// std::runtime_error on corruption and unsupported versions.
LoadedGrid load_grid(const std::string& path);

}  // namespace wavephase
