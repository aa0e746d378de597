#include "wavephase/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace wavephase::fft {

namespace {

// FFTW plan creation is not thread safe; executing a cached plan on fresh
// buffers is. Plans are created FFTW_UNALIGNED so they can run on any array.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& entry : plans_) fftw_destroy_plan(entry.second);
  }

  fftw_plan get(std::size_t n, int sign) {
    std::scoped_lock lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> a(n), b(n);
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
        reinterpret_cast<fftw_complex*>(b.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("fftw plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out, int sign) {
  if (in.size() != out.size()) throw std::invalid_argument("fft: size mismatch");
  if (in.empty()) return;
  if (in.data() == out.data())
    throw std::invalid_argument("fft: in-place transform not supported");
  fftw_plan plan = cache().get(in.size(), sign);
  fftw_execute_dft(
      plan,
      reinterpret_cast<fftw_complex*>(
          const_cast<std::complex<double>*>(in.data())),
      reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void forward(std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out) {
  execute(in, out, FFTW_FORWARD);
}

void backward(std::span<const std::complex<double>> in,
              std::span<std::complex<double>> out) {
  execute(in, out, FFTW_BACKWARD);
}

std::vector<std::complex<double>> forward(
    const std::vector<std::complex<double>>& in) {
  std::vector<std::complex<double>> out(in.size());
  forward(in, out);
  return out;
}

std::vector<std::complex<double>> backward(
    const std::vector<std::complex<double>>& in) {
  std::vector<std::complex<double>> out(in.size());
  backward(in, out);
  return out;
}

std::vector<std::complex<double>> forward_real(std::span<const double> in) {
  std::vector<std::complex<double>> tmp(in.begin(), in.end());
  std::vector<std::complex<double>> out(in.size());
  forward(tmp, out);
  return out;
}

}  // namespace wavephase::fft
