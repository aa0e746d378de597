#include "wavephase/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace wavephase {

double spectral_convergence(const MagnitudeGrid& proposed,
                            const MagnitudeGrid& target,
                            bool include_lowpass) {
  if (proposed.channels != target.channels || proposed.hops != target.hops)
    throw std::invalid_argument("spectral_convergence: dimension mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < target.values.size(); ++i) {
    const double diff = proposed.values[i] - target.values[i];
    num += diff * diff;
    den += target.values[i] * target.values[i];
  }
  if (include_lowpass) {
    if (proposed.lowpass.size() != target.lowpass.size())
      throw std::invalid_argument("spectral_convergence: lowpass mismatch");
    for (std::size_t i = 0; i < target.lowpass.size(); ++i) {
      const double diff = proposed.lowpass[i] - target.lowpass[i];
      num += diff * diff;
      den += target.lowpass[i] * target.lowpass[i];
    }
  }
  if (!(den > 0.0))
    throw std::invalid_argument("spectral_convergence: zero target norm");
  if (num == 0.0) return kSpectralConvergenceFloorDb;
  const double sc = 10.0 * std::log10(num / den);
  return std::max(sc, kSpectralConvergenceFloorDb);
}

std::string report_csv_row(const ReconstructionReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%s,%s,%.10g,%.10g,%zu,%zu,%.10g,%.4f,%.3f,%llu",
                r.signal_id.c_str(), r.method.c_str(), r.alpha, r.beta,
                r.decimation, r.channels, r.bins_per_octave, r.sc_db,
                r.runtime_ms, static_cast<unsigned long long>(r.seed));
  return buf;
}

void write_report_csv(std::ostream& out,
                      const std::vector<ReconstructionReport>& rows) {
  out << kReportCsvHeader << '\n';
  for (const auto& row : rows) out << report_csv_row(row) << '\n';
}

}  // namespace wavephase
