#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wavephase {

// Deterministic signal generators used by the evaluation harness.

std::vector<double> tone(std::size_t length, std::size_t bin,
                         double amplitude = 0.5, double phase = 0.3);

std::vector<double> white_noise(std::size_t length, std::uint64_t seed,
                                double amplitude = 0.3);

struct CorpusSignal {
  std::string name;
  std::vector<double> samples;
};

// Ten-signal desk corpus: tones, chirps, noise bursts, and synthetic
// speech-like / music-like clips, all pinned to a seed. sample_rate only
// scales the nominal frequencies; the content is relative to length.
std::vector<CorpusSignal> desk_corpus(std::size_t length, double sample_rate,
                                      std::uint64_t seed = 7);

}  // namespace wavephase
