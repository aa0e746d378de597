#include "wavephase/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace wavephase {

namespace {

static_assert(std::endian::native == std::endian::little,
              "grid I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in, const char* what) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in)
    throw std::runtime_error(std::string("grid: truncated file reading ") +
                             what);
  return value;
}

}  // namespace

void save_grid(const std::string& path, const CoefficientGrid& grid,
               const CauchyParams& params) {
  if (grid.channels != grid.spec.channels || grid.hops != grid.spec.hops())
    throw std::invalid_argument("save_grid: grid inconsistent with its spec");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("grid: cannot write " + path);
  out.write("DCWT", 4);
  put<std::uint16_t>(out, kGridFormatVersion);
  put<std::uint64_t>(out, grid.spec.signal_length);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.spec.channels));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.spec.decimation));
  put<double>(out, grid.spec.sample_rate);
  put<double>(out, grid.spec.bins_per_octave);
  put<double>(out, grid.spec.min_scale);
  put<double>(out, params.alpha);
  put<double>(out, params.beta);
  put<double>(out, params.gamma_re);
  put<double>(out, params.gamma_im);
  for (const auto& z : grid.wavelet) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
  for (double v : grid.lowpass) put<double>(out, v);
  if (!out) throw std::runtime_error("grid: write failed for " + path);
}

LoadedGrid load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("grid: cannot open " + path);

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "DCWT", 4) != 0)
    throw std::runtime_error("grid: bad magic in " + path);
  const auto version = get<std::uint16_t>(in, "version");
  if (version != kGridFormatVersion)
    throw std::runtime_error("grid: unsupported format version " +
                             std::to_string(version));

  FilterBankSpec spec;
  spec.signal_length = get<std::uint64_t>(in, "L");
  spec.channels = get<std::uint32_t>(in, "K");
  spec.decimation = get<std::uint32_t>(in, "a_d");
  spec.sample_rate = get<double>(in, "xi_s");
  spec.bins_per_octave = get<double>(in, "B");
  spec.min_scale = get<double>(in, "y_m");
  const double alpha = get<double>(in, "alpha");
  const double beta = get<double>(in, "beta");
  const double gamma_re = get<double>(in, "gamma_re");
  const double gamma_im = get<double>(in, "gamma_im");

  if (spec.signal_length == 0 || spec.channels == 0 || spec.decimation == 0 ||
      spec.signal_length % spec.decimation != 0)
    throw std::runtime_error("grid: inconsistent dimensions in " + path);

  LoadedGrid loaded;
  loaded.params = CauchyParams(alpha, beta, gamma_re, gamma_im);
  loaded.grid.spec = spec;
  loaded.grid.channels = spec.channels;
  loaded.grid.hops = spec.hops();
  loaded.grid.wavelet.resize(spec.channels * spec.hops());
  for (auto& z : loaded.grid.wavelet) {
    const double re = get<double>(in, "coefficients");
    const double im = get<double>(in, "coefficients");
    z = {re, im};
  }
  loaded.grid.lowpass.resize(spec.hops());
  for (double& v : loaded.grid.lowpass) v = get<double>(in, "lowpass");

  loaded.grid.centers.resize(spec.channels);
  for (std::size_t k = 0; k < spec.channels; ++k)
    loaded.grid.centers[k] = channel_center(spec, loaded.params, k);
  return loaded;
}

}  // namespace wavephase
