#pragma once

#include <complex>
#include <span>
#include <vector>

namespace wavephase::fft {

// Unnormalized discrete Fourier transforms. forward() uses e^{-2pi i jn/N},
// backward() uses e^{+2pi i jn/N}; backward(forward(x)) == N * x.
void forward(std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out);
void backward(std::span<const std::complex<double>> in,
              std::span<std::complex<double>> out);

std::vector<std::complex<double>> forward(
    const std::vector<std::complex<double>>& in);
std::vector<std::complex<double>> backward(
    const std::vector<std::complex<double>>& in);

// Full-length complex spectrum of a real signal.
std::vector<std::complex<double>> forward_real(std::span<const double> in);

}  // namespace wavephase::fft
