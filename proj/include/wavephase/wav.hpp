#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace wavephase {

struct WavData {
  std::vector<double> samples;  // mono, in [-1, 1]
  double sample_rate = 0.0;
};

// Reads PCM 16/24-bit or 32-bit float RIFF WAV. Multichannel input is
// downmixed to mono by averaging; integer formats are normalized to [-1, 1].
WavData read_wav(const std::string& path);

enum class WavFormat { Float32, Pcm16 };

// Writes a mono WAV, clamping samples to [-1, 1]; returns the clip count.
std::size_t write_wav(const std::string& path, const std::vector<double>& signal,
                      double sample_rate, WavFormat format = WavFormat::Float32);

}  // namespace wavephase
