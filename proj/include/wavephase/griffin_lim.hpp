#pragma once

#include <cstdint>
#include <vector>

#include "wavephase/filterbank.hpp"
#include "wavephase/phase.hpp"

namespace wavephase {

enum class FglimInit { Random, WarmStart };

struct FglimConfig {
  int max_iter = 150;
  double momentum = 0.99;
  std::uint64_t seed = 0;
  FglimInit init = FglimInit::Random;
  const PhaseGrid* warm_start = nullptr;  // required for FglimInit::WarmStart
  double cg_tol = 1e-10;
  int cg_maxit = 500;
  // Stop once the best spectral convergence has not improved by at least
  // stop_improve_db over stop_window iterations.
  double stop_improve_db = 0.01;
  int stop_window = 10;
};

struct FglimResult {
  std::vector<double> signal;   // best-SC iterate
  CoefficientGrid coeffs;       // magnitude-projected best grid, |coeffs| == m
  std::vector<double> sc_trace_db;
  int best_iteration = 0;
};

// Fast Griffin-Lim: c <- P_mag(P_consistent(c + momentum (c - c_prev))) with
// P_consistent = analyze o synthesize and P_mag replacing moduli by m. The
// lowpass row is held fixed at its target magnitude throughout.
FglimResult fast_griffin_lim(const MagnitudeGrid& m, const WaveletFrame& frame,
                             const FglimConfig& cfg);

}  // namespace wavephase
