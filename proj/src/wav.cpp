#include "wavephase/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace wavephase {

namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

template <typename T>
T read_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("wav: truncated file");
  return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

WavData read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("wav: cannot open " + path);

  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0)
    throw std::runtime_error("wav: missing RIFF header in " + path);
  read_le<std::uint32_t>(in);  // riff size, unused
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0)
    throw std::runtime_error("wav: not a WAVE file: " + path);

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::vector<char> data;
  bool have_fmt = false, have_data = false;

  while (in.read(tag, 4)) {
    const std::uint32_t chunk_size = read_le<std::uint32_t>(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw std::runtime_error("wav: malformed fmt chunk");
      format = read_le<std::uint16_t>(in);
      channels = read_le<std::uint16_t>(in);
      rate = read_le<std::uint32_t>(in);
      read_le<std::uint32_t>(in);  // byte rate
      read_le<std::uint16_t>(in);  // block align
      bits = read_le<std::uint16_t>(in);
      std::uint32_t consumed = 16;
      if (format == kFormatExtensible && chunk_size >= 40) {
        read_le<std::uint16_t>(in);  // extension size
        read_le<std::uint16_t>(in);  // valid bits
        read_le<std::uint32_t>(in);  // channel mask
        format = read_le<std::uint16_t>(in);  // first two bytes of subformat
        in.ignore(14);
        consumed = 40;
      }
      in.ignore(chunk_size - consumed + (chunk_size & 1));
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(chunk_size);
      in.read(data.data(), chunk_size);
      if (!in) throw std::runtime_error("wav: truncated data chunk");
      if (chunk_size & 1) in.ignore(1);
      have_data = true;
    } else {
      in.ignore(chunk_size + (chunk_size & 1));
    }
  }
  if (!have_fmt || !have_data)
    throw std::runtime_error("wav: missing fmt or data chunk in " + path);
  if (channels == 0 || rate == 0)
    throw std::runtime_error("wav: malformed header in " + path);

  const std::size_t bytes_per_sample = bits / 8;
  if (bytes_per_sample == 0 || data.size() % (bytes_per_sample * channels) != 0)
    throw std::runtime_error("wav: data size inconsistent with format");
  const std::size_t frames = data.size() / (bytes_per_sample * channels);

  auto decode = [&](std::size_t index) -> double {
    const char* p = data.data() + index * bytes_per_sample;
    if (format == kFormatPcm && bits == 16) {
      std::int16_t v;
      std::memcpy(&v, p, 2);
      return static_cast<double>(v) / 32768.0;
    }
    if (format == kFormatPcm && bits == 24) {
      const auto b0 = static_cast<std::uint8_t>(p[0]);
      const auto b1 = static_cast<std::uint8_t>(p[1]);
      const auto b2 = static_cast<std::uint8_t>(p[2]);
      std::int32_t v = (b2 << 16) | (b1 << 8) | b0;
      if (v & 0x800000) v -= 0x1000000;
      return static_cast<double>(v) / 8388608.0;
    }
    if (format == kFormatFloat && bits == 32) {
      float v;
      std::memcpy(&v, p, 4);
      return static_cast<double>(v);
    }
    throw std::runtime_error("wav: unsupported codec (format " +
                             std::to_string(format) + ", " +
                             std::to_string(bits) + " bit)");
  };

  WavData wav;
  wav.sample_rate = static_cast<double>(rate);
  wav.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t ch = 0; ch < channels; ++ch)
      acc += decode(f * channels + ch);
    wav.samples[f] = acc / static_cast<double>(channels);
  }
  return wav;
}

std::size_t write_wav(const std::string& path, const std::vector<double>& signal,
                      double sample_rate, WavFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("wav: cannot write " + path);

  const std::uint16_t bits = format == WavFormat::Float32 ? 32 : 16;
  const std::uint16_t fmt_code =
      format == WavFormat::Float32 ? kFormatFloat : kFormatPcm;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(signal.size() * bits / 8);

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, fmt_code);
  write_le<std::uint16_t>(out, 1);  // mono
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate));
  write_le<std::uint32_t>(out,
                          static_cast<std::uint32_t>(sample_rate) * bits / 8);
  write_le<std::uint16_t>(out, bits / 8);
  write_le<std::uint16_t>(out, bits);
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_size);

  std::size_t clipped = 0;
  for (double s : signal) {
    double v = s;
    if (v > 1.0) { v = 1.0; ++clipped; }
    if (v < -1.0) { v = -1.0; ++clipped; }
    if (format == WavFormat::Float32) {
      write_le<float>(out, static_cast<float>(v));
    } else {
      const double scaled = std::round(v * 32768.0);
      write_le<std::int16_t>(out, static_cast<std::int16_t>(
                                      std::clamp(scaled, -32768.0, 32767.0)));
    }
  }
  if (!out) throw std::runtime_error("wav: write failed for " + path);
  return clipped;
}

}  // namespace wavephase
