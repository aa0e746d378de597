#include "wavephase/testsignals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavephase/rng.hpp"

namespace wavephase {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

double hann(double t01) {
  if (t01 <= 0.0 || t01 >= 1.0) return 0.0;
  return 0.5 * (1.0 - std::cos(kTwoPi * t01));
}

void normalize_peak(std::vector<double>& s, double peak) {
  double m = 0.0;
  for (double v : s) m = std::max(m, std::abs(v));
  if (m > 0.0)
    for (double& v : s) v *= peak / m;
}

// Exponentially decaying harmonic stack starting at `onset`.
void add_note(std::vector<double>& s, double rate, double f0, double onset,
              double gain, SplitMix& rng) {
  const std::size_t n = s.size();
  const double detune = 1.0 + 2e-4 * (rng.uniform() - 0.5);
  for (int h = 1; h <= 6; ++h) {
    const double f = f0 * h * detune;
    if (f >= 0.45 * rate) break;
    const double amp = gain / static_cast<double>(h * h);
    const double phi = kTwoPi * rng.uniform();
    for (std::size_t l = 0; l < n; ++l) {
      const double t = static_cast<double>(l) / rate - onset;
      if (t < 0.0) continue;
      s[l] += amp * std::exp(-4.0 * t) * std::sin(kTwoPi * f * t + phi) *
              std::min(1.0, t * 200.0);
    }
  }
}

}  // namespace

std::vector<double> tone(std::size_t length, std::size_t bin, double amplitude,
                         double phase) {
  std::vector<double> s(length);
  for (std::size_t l = 0; l < length; ++l)
    s[l] = amplitude * std::cos(kTwoPi * static_cast<double>(bin) *
                                    static_cast<double>(l) /
                                    static_cast<double>(length) +
                                phase);
  return s;
}

std::vector<double> white_noise(std::size_t length, std::uint64_t seed,
                                double amplitude) {
  SplitMix rng(seed);
  std::vector<double> s(length);
  for (double& v : s) v = amplitude * rng.gaussian();
  return s;
}

std::vector<CorpusSignal> desk_corpus(std::size_t length, double rate,
                                      std::uint64_t seed) {
  std::vector<CorpusSignal> corpus;
  const double dur = static_cast<double>(length) / rate;
  auto t_of = [&](std::size_t l) { return static_cast<double>(l) / rate; };

  {  // 1: steady tone with a gentle envelope
    auto s = zeros(length);
    for (std::size_t l = 0; l < length; ++l)
      s[l] = std::sin(kTwoPi * 440.0 * t_of(l)) * hann(t_of(l) / dur * 0.2 + 0.4);
    normalize_peak(s, 0.5);
    corpus.push_back({"tone_440", std::move(s)});
  }
  {  // 2: harmonic tone with vibrato
    auto s = zeros(length);
    for (std::size_t l = 0; l < length; ++l) {
      const double t = t_of(l);
      const double f = 330.0 * (1.0 + 0.004 * std::sin(kTwoPi * 5.0 * t));
      const double ph = kTwoPi * 330.0 * (t + 0.004 / (kTwoPi * 5.0) *
                                                  (1.0 - std::cos(kTwoPi * 5.0 * t)));
      (void)f;
      s[l] = (std::sin(ph) + 0.4 * std::sin(2.0 * ph) + 0.2 * std::sin(3.0 * ph)) *
             hann(t / dur);
    }
    normalize_peak(s, 0.5);
    corpus.push_back({"vibrato_harmonics", std::move(s)});
  }
  {  // 3: tremolo (AM) tone
    auto s = zeros(length);
    for (std::size_t l = 0; l < length; ++l) {
      const double t = t_of(l);
      s[l] = std::sin(kTwoPi * 620.0 * t) * (0.7 + 0.3 * std::sin(kTwoPi * 4.0 * t)) *
             hann(t / dur);
    }
    normalize_peak(s, 0.5);
    corpus.push_back({"tremolo_620", std::move(s)});
  }
  {  // 4: linear up-chirp
    auto s = zeros(length);
    const double f0 = 200.0, f1 = 1800.0;
    for (std::size_t l = 0; l < length; ++l) {
      const double t = t_of(l);
      s[l] = std::sin(kTwoPi * (f0 * t + 0.5 * (f1 - f0) * t * t / dur)) *
             hann(t / dur);
    }
    normalize_peak(s, 0.5);
    corpus.push_back({"chirp_up", std::move(s)});
  }
  {  // 5: exponential down-chirp
    auto s = zeros(length);
    const double f0 = 1500.0, f1 = 250.0;
    const double k = std::log(f1 / f0);
    for (std::size_t l = 0; l < length; ++l) {
      const double t = t_of(l) / dur;
      const double phase = kTwoPi * f0 * dur * (std::exp(k * t) - 1.0) / k;
      s[l] = std::sin(phase) * hann(t);
    }
    normalize_peak(s, 0.5);
    corpus.push_back({"chirp_down", std::move(s)});
  }
  {  // 6: white noise burst
    SplitMix rng(splitmix64(seed) + 6);
    auto s = zeros(length);
    for (std::size_t l = 0; l < length; ++l) {
      const double t = t_of(l) / dur;
      s[l] = rng.gaussian() * hann((t - 0.25) * 2.0);
    }
    normalize_peak(s, 0.4);
    corpus.push_back({"noise_burst", std::move(s)});
  }
  {  // 7: lowpassed noise burst (one-pole)
    SplitMix rng(splitmix64(seed) + 7);
    auto s = zeros(length);
    double state = 0.0;
    const double a = std::exp(-kTwoPi * 900.0 / rate);
    for (std::size_t l = 0; l < length; ++l) {
      state = a * state + (1.0 - a) * rng.gaussian();
      const double t = t_of(l) / dur;
      s[l] = state * hann((t - 0.15) * 1.4);
    }
    normalize_peak(s, 0.4);
    corpus.push_back({"noise_lowpassed", std::move(s)});
  }
  {  // 8: two-tone beating pair
    auto s = zeros(length);
    for (std::size_t l = 0; l < length; ++l) {
      const double t = t_of(l);
      s[l] = (std::sin(kTwoPi * 510.0 * t) + std::sin(kTwoPi * 523.25 * t)) *
             hann(t / dur);
    }
    normalize_peak(s, 0.5);
    corpus.push_back({"beating_pair", std::move(s)});
  }
  {  // 9: speech-like clip: pitch-modulated pulse train through formants
    SplitMix rng(splitmix64(seed) + 9);
    auto excitation = zeros(length);
    double phase = 0.0;
    for (std::size_t l = 0; l < length; ++l) {
      const double t = t_of(l);
      const double f0 = 115.0 + 35.0 * std::sin(kTwoPi * 1.3 * t);
      phase += f0 / rate;
      if (phase >= 1.0) {
        phase -= 1.0;
        excitation[l] = 1.0;
      }
      excitation[l] += 0.02 * rng.gaussian();
    }
    auto s = zeros(length);
    const double formants[3] = {600.0, 1150.0, 2500.0};
    const double widths[3] = {90.0, 130.0, 220.0};
    const double gains[3] = {1.0, 0.7, 0.35};
    for (int r = 0; r < 3; ++r) {
      const double pole = std::exp(-std::numbers::pi * widths[r] / rate);
      const double w = kTwoPi * formants[r] / rate;
      double z1 = 0.0, z2 = 0.0;
      const double a1 = 2.0 * pole * std::cos(w), a2 = -pole * pole;
      for (std::size_t l = 0; l < length; ++l) {
        const double v = excitation[l] + a1 * z1 + a2 * z2;
        s[l] += gains[r] * v;
        z2 = z1;
        z1 = v;
      }
    }
    // Three syllable-like energy bursts.
    for (std::size_t l = 0; l < length; ++l) {
      const double t = t_of(l) / dur;
      const double env = hann(t * 3.0) + 0.8 * hann((t - 0.36) * 3.0) +
                         0.9 * hann((t - 0.68) * 3.0);
      s[l] *= env;
    }
    normalize_peak(s, 0.5);
    corpus.push_back({"speech_like", std::move(s)});
  }
  {  // 10: music-like clip: arpeggiated decaying harmonic notes
    SplitMix rng(splitmix64(seed) + 10);
    auto s = zeros(length);
    add_note(s, rate, 220.0, 0.02 * dur, 1.0, rng);
    add_note(s, rate, 277.18, 0.27 * dur, 0.9, rng);
    add_note(s, rate, 329.63, 0.52 * dur, 0.9, rng);
    add_note(s, rate, 440.0, 0.77 * dur, 0.8, rng);
    normalize_peak(s, 0.5);
    corpus.push_back({"music_like", std::move(s)});
  }
  return corpus;
}

}  // namespace wavephase
