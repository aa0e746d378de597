#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "wavephase/phase.hpp"

namespace wavephase {

// Values at or below this are reported for an exact magnitude match.
inline constexpr double kSpectralConvergenceFloorDb = -600.0;

// SC = 20 log10(||M_p - M_t|| / ||M_t||) over the wavelet channels, with the
// lowpass row included unless disabled. Exact matches return the -600 dB
// floor; a zero target norm throws.
double spectral_convergence(const MagnitudeGrid& proposed,
                            const MagnitudeGrid& target,
                            bool include_lowpass = true);

struct ReconstructionReport {
  std::string signal_id;
  std::string method;  // "wpghi", "rfglim", "wfglim"
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t decimation = 0;
  std::size_t channels = 0;
  double bins_per_octave = 0.0;
  double sc_db = 0.0;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kReportCsvHeader =
    "signal_id,method,alpha,beta,a_d,K,B,sc_db,runtime_ms,seed";

std::string report_csv_row(const ReconstructionReport& report);
void write_report_csv(std::ostream& out,
                      const std::vector<ReconstructionReport>& rows);

}  // namespace wavephase
