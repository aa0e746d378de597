#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "wavephase/fft.hpp"
#include "wavephase/filterbank.hpp"
#include "wavephase/rng.hpp"
#include "wavephase/testsignals.hpp"

using namespace wavephase;

namespace {

constexpr double kExpRangeLo = 0.05 * std::exp2(-6.0);  // Experiment-style range
constexpr double kExpRangeHi = 0.05 * std::exp2(3.3);

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

// Dense time-domain wavelets via the inverse DFT of the sampled responses;
// the brute-force analysis oracle below uses them directly.
std::vector<std::complex<double>> time_wavelet(const WaveletFrame& frame,
                                               std::size_t k) {
  const std::size_t length = frame.spec.signal_length;
  std::vector<std::complex<double>> response(length);
  for (std::size_t j = 0; j < length; ++j) response[j] = frame.filter_value(k, j);
  std::vector<std::complex<double>> out = fft::backward(response);
  for (auto& v : out) v /= static_cast<double>(length);
  return out;
}

}  // namespace

TEST_CASE("build_frame handles the experiment parameter sets") {
  const std::size_t length = 16200;  // divisible by 5, 12 and 20
  struct Tuple { double alpha; std::size_t a_d, channels; };
  for (const Tuple& t : {Tuple{30.0, 5, 100}, Tuple{300.0, 12, 240},
                         Tuple{3000.0, 20, 400}}) {
    CauchyParams params(t.alpha);
    FilterBankSpec spec = FilterBankSpec::from_frequency_range(
        length, 1.0, t.channels, t.a_d, kExpRangeLo, kExpRangeHi, params);
    WaveletFrame frame = build_frame(spec, params);
    CHECK(frame.centers.size() == t.channels);
    for (std::size_t k = 0; k < t.channels; ++k) {
      CHECK(frame.centers[k] < 0.5);
      CHECK(frame.centers[k] > 0.0);
      if (k > 0) CHECK(frame.centers[k] < frame.centers[k - 1]);
    }
    const std::vector<double> cover = total_coverage(frame);
    double lo = cover[0];
    for (double c : cover) lo = std::min(lo, c);
    CHECK(lo > 0.0);
  }
}

TEST_CASE("single-channel lowpass vanishes exactly at the channel peak") {
  CauchyParams params(40.0);
  FilterBankSpec spec = FilterBankSpec::from_frequency_range(
      512, 1.0, 1, 2, 0.125, 0.125, params);
  WaveletFrame frame = build_frame(spec, params);
  // Find the sampled peak of the single filter.
  std::size_t peak_bin = 0;
  double peak = -1.0;
  for (std::size_t j = 0; j <= 256; ++j) {
    const double mag = std::abs(frame.filter_value(0, j));
    if (mag > peak) {
      peak = mag;
      peak_bin = j;
    }
  }
  CHECK(std::abs(frame.lowpass[peak_bin]) == 0.0);
  CHECK(std::abs(frame.lowpass[0]) > 0.0);
}

TEST_CASE("spec validation rejects bad configurations") {
  CauchyParams params(100.0);
  FilterBankSpec spec = FilterBankSpec::from_frequency_range(
      1024, 1.0, 32, 4, 0.01, 0.2, params);
  CHECK_NOTHROW(spec.validate(params));

  FilterBankSpec bad_dec = spec;
  bad_dec.decimation = 3;  // does not divide 1024
  CHECK_THROWS_AS(bad_dec.validate(params), std::invalid_argument);

  CHECK_THROWS_AS(FilterBankSpec::from_frequency_range(1024, 1.0, 32, 4, 0.01,
                                                       0.7, params)
                      .validate(params),
                  std::invalid_argument);  // top center above Nyquist
}

TEST_CASE("analyze matches brute-force inner products") {
  const std::size_t length = 256;
  CauchyParams params(20.0);
  FilterBankSpec spec = FilterBankSpec::from_frequency_range(
      length, 1.0, 12, 4, 0.03, 0.35, params);
  WaveletFrame frame = build_frame(spec, params);

  std::vector<double> signal = white_noise(length, 123, 1.0);
  SUBCASE("unit impulse") { signal.assign(length, 0.0); signal[0] = 1.0; }

  CoefficientGrid grid = analyze(signal, frame);
  REQUIRE(grid.channels == 12);
  REQUIRE(grid.hops == length / 4);

  double err = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < grid.channels; ++k) {
    const auto psi = time_wavelet(frame, k);
    for (std::size_t n = 0; n < grid.hops; ++n) {
      std::complex<double> direct{0.0, 0.0};
      for (std::size_t l = 0; l < length; ++l) {
        const std::size_t shifted = (l + length - n * 4 % length) % length;
        direct += signal[l] * std::conj(psi[shifted]);
      }
      err += std::norm(grid.at(k, n) - direct);
      ref += std::norm(direct);
    }
  }
  CHECK(std::sqrt(err / ref) < 1e-10);

  // Lowpass row against the same oracle.
  std::vector<std::complex<double>> lp_time = fft::backward(frame.lowpass);
  for (auto& v : lp_time) v /= static_cast<double>(length);
  for (std::size_t n = 0; n < grid.hops; ++n) {
    std::complex<double> direct{0.0, 0.0};
    for (std::size_t l = 0; l < length; ++l) {
      const std::size_t shifted = (l + length - n * 4 % length) % length;
      direct += signal[l] * std::conj(lp_time[shifted]);
    }
    CHECK(grid.lowpass[n] == doctest::Approx(direct.real()).epsilon(1e-9));
  }
}

TEST_CASE("analyze rejects length mismatches") {
  CauchyParams params(20.0);
  FilterBankSpec spec = FilterBankSpec::from_frequency_range(
      256, 1.0, 8, 4, 0.05, 0.3, params);
  WaveletFrame frame = build_frame(spec, params);
  std::vector<double> wrong(255, 0.0);
  CHECK_THROWS_AS(analyze(wrong, frame), std::invalid_argument);
}

TEST_CASE("pure tone on a channel center has flat rows peaking there") {
  const std::size_t length = 2048;
  CauchyParams params(60.0);
  // Put channel k0 = 10 exactly on bin 160: f_max = bin * 2^(k0/B) / L.
  const double bins_per_octave = 12.0;
  const double f_center = 160.0 / static_cast<double>(length);
  FilterBankSpec spec;
  spec.signal_length = length;
  spec.sample_rate = 1.0;
  spec.channels = 24;
  spec.bins_per_octave = bins_per_octave;
  spec.decimation = 8;
  spec.min_scale = center_frequency(params) / (f_center * std::exp2(10.0 / bins_per_octave));
  WaveletFrame frame = build_frame(spec, params);
  CHECK(frame.centers[10] == doctest::Approx(f_center).epsilon(1e-12));

  CoefficientGrid grid = analyze(tone(length, 160), frame);
  double global = 0.0;
  for (const auto& c : grid.wavelet) global = std::max(global, std::abs(c));
  for (std::size_t k = 0; k < grid.channels; ++k) {
    double lo = 1e300, hi = 0.0;
    for (std::size_t n = 0; n < grid.hops; ++n) {
      const double mag = std::abs(grid.at(k, n));
      lo = std::min(lo, mag);
      hi = std::max(hi, mag);
    }
    CHECK(hi - lo <= 1e-11 * global);  // constant along time, up to fp noise
  }
  // Maximal magnitude over channels at k0 = 10.
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t k = 0; k < grid.channels; ++k) {
    const double mag = std::abs(grid.at(k, 0));
    if (mag > best_mag) {
      best_mag = mag;
      best = k;
    }
  }
  CHECK(best == 10);
}

TEST_CASE("analyze maps the zero signal to zero coefficients") {
  CauchyParams params(30.0);
  FilterBankSpec spec = FilterBankSpec::from_frequency_range(
      512, 1.0, 16, 4, 0.02, 0.3, params);
  WaveletFrame frame = build_frame(spec, params);
  CoefficientGrid g = analyze(std::vector<double>(512, 0.0), frame);
  for (const auto& c : g.wavelet) CHECK(c == std::complex<double>{0.0, 0.0});
  for (double v : g.lowpass) CHECK(v == 0.0);
}

TEST_CASE("analyze is linear") {
  const std::size_t length = 512;
  CauchyParams params(30.0);
  FilterBankSpec spec = FilterBankSpec::from_frequency_range(
      length, 1.0, 16, 4, 0.02, 0.3, params);
  WaveletFrame frame = build_frame(spec, params);
  const std::vector<double> s1 = white_noise(length, 1, 1.0);
  const std::vector<double> s2 = white_noise(length, 2, 1.0);
  const double a = 1.7, b = -0.4;
  std::vector<double> mix(length);
  for (std::size_t l = 0; l < length; ++l) mix[l] = a * s1[l] + b * s2[l];

  CoefficientGrid g1 = analyze(s1, frame);
  CoefficientGrid g2 = analyze(s2, frame);
  CoefficientGrid gm = analyze(mix, frame);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < gm.wavelet.size(); ++i) {
    err += std::norm(gm.wavelet[i] - (a * g1.wavelet[i] + b * g2.wavelet[i]));
    ref += std::norm(gm.wavelet[i]);
  }
  CHECK(std::sqrt(err / ref) < 1e-13);
}

TEST_CASE("circular shift by one hop shifts every row by one column") {
  const std::size_t length = 512;
  const std::size_t dec = 8;
  CauchyParams params(30.0);
  FilterBankSpec spec = FilterBankSpec::from_frequency_range(
      length, 1.0, 16, dec, 0.02, 0.3, params);
  WaveletFrame frame = build_frame(spec, params);
  const std::vector<double> s = white_noise(length, 5, 1.0);
  std::vector<double> shifted(length);
  for (std::size_t l = 0; l < length; ++l)
    shifted[l] = s[(l + length - dec) % length];

  CoefficientGrid g = analyze(s, frame);
  CoefficientGrid gs = analyze(shifted, frame);
  double err = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < g.channels; ++k)
    for (std::size_t n = 0; n < g.hops; ++n) {
      err += std::norm(gs.at(k, (n + 1) % g.hops) - g.at(k, n));
      ref += std::norm(g.at(k, n));
    }
  CHECK(std::sqrt(err / ref) < 1e-12);
}

TEST_CASE("undecimated analysis satisfies the Parseval identity") {
  const std::size_t length = 1024;
  CauchyParams params(50.0);
  FilterBankSpec spec = FilterBankSpec::from_frequency_range(
      length, 1.0, 24, 1, 0.02, 0.35, params);
  WaveletFrame frame = build_frame(spec, params);
  const std::vector<double> s = white_noise(length, 9, 0.7);
  CoefficientGrid g = analyze(s, frame);

  double lhs = 0.0;
  for (const auto& c : g.wavelet) lhs += std::norm(c);
  // The real-part lowpass row equals the full output for a Hermitian lowpass.
  for (double v : g.lowpass) lhs += v * v;

  const auto spectrum = fft::forward_real(s);
  double rhs = 0.0;
  for (std::size_t j = 0; j < length; ++j) {
    double cover = std::norm(frame.lowpass[j]);
    for (std::size_t k = 0; k < g.channels; ++k)
      cover += std::norm(frame.filter_value(k, j));
    rhs += std::norm(spectrum[j]) * cover;
  }
  rhs /= static_cast<double>(length);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("synthesize inverts analyze on white noise") {
  const std::size_t length = 2048;
  CauchyParams params(300.0);
  FilterBankSpec spec = FilterBankSpec::from_frequency_range(
      length, 1.0, 160, 8, 0.0045, 0.45, params);  // redundancy 20
  WaveletFrame frame = build_frame(spec, params);
  const std::vector<double> s = white_noise(length, 31, 0.5);
  CoefficientGrid g = analyze(s, frame);
  const std::vector<double> rec = synthesize(g, frame, 1e-12, 500);
  CHECK(rel_l2(rec, s) <= 1e-8);
}

TEST_CASE("zero coefficients synthesize to the zero signal") {
  CauchyParams params(40.0);
  FilterBankSpec spec = FilterBankSpec::from_frequency_range(
      256, 1.0, 16, 4, 0.02, 0.3, params);
  WaveletFrame frame = build_frame(spec, params);
  CoefficientGrid zero;
  zero.channels = 16;
  zero.hops = 64;
  zero.spec = spec;
  zero.centers = frame.centers;
  zero.wavelet.assign(16 * 64, {0.0, 0.0});
  zero.lowpass.assign(64, 0.0);
  const std::vector<double> rec = synthesize(zero, frame);
  for (double v : rec) CHECK(v == 0.0);
}

TEST_CASE("round-trip error is monotone in the CG iteration cap") {
  const std::size_t length = 512;
  CauchyParams params(80.0);
  FilterBankSpec spec = FilterBankSpec::from_frequency_range(
      length, 1.0, 32, 8, 0.02, 0.35, params);
  WaveletFrame frame = build_frame(spec, params);
  const std::vector<double> s = white_noise(length, 77, 0.5);
  CoefficientGrid g = analyze(s, frame);

  double prev = 1e300;
  for (int cap : {1, 2, 4, 8, 16, 32}) {
    SynthesisResult res = synthesize_ls(g, frame, 1e-300, cap);
    const double err = rel_l2(res.signal, s);
    CHECK(err <= prev * (1.0 + 1e-12));
    prev = err;
  }
}

TEST_CASE("synthesize reports non-convergence with the final residual") {
  const std::size_t length = 512;
  CauchyParams params(80.0);
  FilterBankSpec spec = FilterBankSpec::from_frequency_range(
      length, 1.0, 32, 8, 0.02, 0.35, params);
  WaveletFrame frame = build_frame(spec, params);
  CoefficientGrid g = analyze(white_noise(length, 78, 0.5), frame);
  CHECK_THROWS_WITH_AS(synthesize(g, frame, 1e-13, 1),
                       doctest::Contains("residual"), std::runtime_error);
}

TEST_CASE("frame bound ratio matches the painless closed form at a_d = 1") {
  const std::size_t length = 512;
  CauchyParams params(60.0);
  FilterBankSpec spec = FilterBankSpec::from_frequency_range(
      length, 1.0, 24, 1, 0.03, 0.35, params);
  WaveletFrame frame = build_frame(spec, params);

  double cov_max = 0.0, cov_min = 1e300;
  for (double c : frame.coverage) {
    cov_max = std::max(cov_max, c);
    cov_min = std::min(cov_min, c);
  }
  const double expected = cov_max / cov_min;
  const double estimated = frame_bound_ratio(frame, 60);
  CHECK(estimated == doctest::Approx(expected).epsilon(0.03));
  CHECK(estimated >= 1.0);
}

TEST_CASE("frame bound ratio does not improve with larger decimation") {
  // The sweep starts at a_d = 2: the a_d^{-1} factor inside the lowpass
  // response makes the DC eigenvalue scale as a_d^{-3}, so the a_d = 1
  // ratio sits above the a_d = 2 one before aliasing dominates.
  const std::size_t length = 1024;
  CauchyParams params(120.0);
  double prev = 0.0;
  for (std::size_t dec : {2, 4, 8, 16}) {
    FilterBankSpec spec = FilterBankSpec::from_frequency_range(
        length, 1.0, 48, dec, 0.02, 0.35, params);
    WaveletFrame frame = build_frame(spec, params);
    const double ratio = frame_bound_ratio(frame, 40);
    CHECK(ratio >= 1.0);
    CHECK(ratio >= prev * (1.0 - 1e-6));
    prev = ratio;
  }
}
