#include "wavephase/filterbank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "wavephase/fft.hpp"
#include "wavephase/rng.hpp"

namespace wavephase {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Filters are truncated where |psi_hat| has dropped 40 nats (~4e-18) below
// the peak; the tail is below double rounding relative to the in-band part.
constexpr double kSupportDropLog = 40.0;

using cvec = std::vector<std::complex<double>>;

double scale_at(const FilterBankSpec& spec, std::size_t k) {
  return std::exp2(static_cast<double>(k) / spec.bins_per_octave) *
         spec.min_scale;
}

bool self_paired(std::size_t j, std::size_t length) {
  return j == 0 || 2 * j == length;
}

// In-place projection onto spectra of real signals: v[j] <- Hermitian part.
void hermitian_project(cvec& v) {
  const std::size_t length = v.size();
  for (std::size_t j = 0; 2 * j <= length; ++j) {
    const std::size_t jm = (length - j) % length;
    if (j == jm) {
      v[j] = {v[j].real(), 0.0};
    } else {
      const std::complex<double> avg = 0.5 * (v[j] + std::conj(v[jm]));
      v[j] = avg;
      v[jm] = std::conj(avg);
    }
  }
}

double real_dot(const cvec& a, const cvec& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    acc += a[j].real() * b[j].real() + a[j].imag() * b[j].imag();
  return acc;
}

// Frame normal operator S = A^T A on a (Hermitian) spectrum, fully in the
// DFT domain: per channel multiply by conj(h_k), alias-fold to the hop
// length, expand periodically, multiply by h_k, and accumulate.
class FrameOperator {
 public:
  explicit FrameOperator(const WaveletFrame& frame)
      : frame_(frame),
        length_(frame.spec.signal_length),
        hops_(frame.spec.hops()),
        fold_(frame.spec.hops()) {
    // Jacobi clamp: bins with essentially no coverage would otherwise turn
    // the preconditioner into a roundoff amplifier and stall CG.
    double cov_max = 0.0;
    for (double c : frame.coverage) cov_max = std::max(cov_max, c);
    precond_floor_ = 1e-12 * cov_max;
  }

  void apply(const cvec& in, cvec& out) {
    out.assign(length_, {0.0, 0.0});
    const double inv_dec = 1.0 / static_cast<double>(frame_.spec.decimation);
    for (const BandFilter& f : frame_.filters) {
      std::fill(fold_.begin(), fold_.end(), std::complex<double>{0.0, 0.0});
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        const std::size_t j = f.first_bin + i;
        fold_[j % hops_] += in[j] * std::conj(f.values[i]);
      }
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        const std::size_t j = f.first_bin + i;
        out[j] += f.values[i] * fold_[j % hops_] * inv_dec;
      }
    }
    std::fill(fold_.begin(), fold_.end(), std::complex<double>{0.0, 0.0});
    for (std::size_t j = 0; j < length_; ++j)
      fold_[j % hops_] += in[j] * std::conj(frame_.lowpass[j]);
    for (std::size_t j = 0; j < length_; ++j)
      out[j] += frame_.lowpass[j] * fold_[j % hops_] * inv_dec;
    hermitian_project(out);
  }

  // Diagonal (Jacobi) preconditioner from the cached coverage.
  void precondition(const cvec& in, cvec& out) const {
    for (std::size_t j = 0; j < length_; ++j) {
      const std::size_t idx = j <= length_ / 2 ? j : length_ - j;
      out[j] = in[j] / std::max(frame_.coverage[idx], precond_floor_);
    }
  }

 private:
  const WaveletFrame& frame_;
  std::size_t length_;
  std::size_t hops_;
  cvec fold_;
  double precond_floor_ = 0.0;
};

// Adjoint of the analysis map applied to a coefficient grid, returned as an
// unnormalized length-L spectrum.
cvec adjoint_spectrum(const CoefficientGrid& coeffs, const WaveletFrame& frame) {
  const std::size_t length = frame.spec.signal_length;
  const std::size_t hops = frame.spec.hops();
  cvec out(length, {0.0, 0.0});
  cvec row(hops), row_hat(hops);
  for (std::size_t k = 0; k < coeffs.channels; ++k) {
    std::copy_n(coeffs.wavelet.begin() + static_cast<std::ptrdiff_t>(k * hops),
                hops, row.begin());
    fft::forward(row, row_hat);
    const BandFilter& f = frame.filters[k];
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const std::size_t j = f.first_bin + i;
      out[j] += f.values[i] * row_hat[j % hops];
    }
  }
  for (std::size_t n = 0; n < hops; ++n) row[n] = {coeffs.lowpass[n], 0.0};
  fft::forward(row, row_hat);
  for (std::size_t j = 0; j < length; ++j)
    out[j] += frame.lowpass[j] * row_hat[j % hops];
  hermitian_project(out);
  return out;
}

struct CgOutcome {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

CgOutcome conjugate_gradient(FrameOperator& op, const cvec& rhs, cvec& x,
                             double tol, int maxit) {
  const std::size_t length = rhs.size();
  const double rhs_norm = std::sqrt(real_dot(rhs, rhs));
  CgOutcome outcome;
  if (rhs_norm == 0.0) {
    x.assign(length, {0.0, 0.0});
    outcome.converged = true;
    return outcome;
  }
  if (x.size() != length) x.assign(length, {0.0, 0.0});

  cvec r(length), z(length), p(length), q(length);
  op.apply(x, q);
  for (std::size_t j = 0; j < length; ++j) r[j] = rhs[j] - q[j];
  op.precondition(r, z);
  p = z;
  double rz = real_dot(r, z);
  for (int it = 0; it < maxit; ++it) {
    outcome.residual = std::sqrt(real_dot(r, r)) / rhs_norm;
    if (outcome.residual <= tol) {
      outcome.converged = true;
      return outcome;
    }
    op.apply(p, q);
    const double pq = real_dot(p, q);
    if (!(pq > 0.0)) break;  // operator numerically singular along p
    const double alpha = rz / pq;
    for (std::size_t j = 0; j < length; ++j) {
      x[j] += alpha * p[j];
      r[j] -= alpha * q[j];
    }
    op.precondition(r, z);
    const double rz_next = real_dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t j = 0; j < length; ++j) p[j] = z[j] + beta * p[j];
    outcome.iterations = it + 1;
  }
  outcome.residual = std::sqrt(real_dot(r, r)) / rhs_norm;
  outcome.converged = outcome.residual <= tol;
  return outcome;
}

}  // namespace

void FilterBankSpec::validate(const CauchyParams& params) const {
  if (signal_length == 0)
    throw std::invalid_argument("FilterBankSpec: signal_length must be > 0");
  if (!(sample_rate > 0.0))
    throw std::invalid_argument("FilterBankSpec: sample_rate must be > 0");
  if (channels == 0)
    throw std::invalid_argument("FilterBankSpec: channels must be >= 1");
  if (!(bins_per_octave > 0.0))
    throw std::invalid_argument("FilterBankSpec: bins_per_octave must be > 0");
  if (!(min_scale > 0.0))
    throw std::invalid_argument("FilterBankSpec: min_scale must be > 0");
  if (decimation == 0 || signal_length % decimation != 0)
    throw std::invalid_argument(
        "FilterBankSpec: decimation must divide the signal length");
  const double top = channel_center(*this, params, 0);
  if (!(top < 0.5 * sample_rate))
    throw std::invalid_argument(
        "FilterBankSpec: highest center frequency exceeds xi_s/2");
  if (!(channel_center(*this, params, channels - 1) > 0.0))
    throw std::invalid_argument("FilterBankSpec: center frequencies must be > 0");
}

FilterBankSpec FilterBankSpec::from_frequency_range(
    std::size_t signal_length, double sample_rate, std::size_t channels,
    std::size_t decimation, double f_min, double f_max,
    const CauchyParams& params) {
  if (channels == 0)
    throw std::invalid_argument("from_frequency_range: channels must be >= 1");
  if (!(f_min > 0.0) || !(f_max >= f_min))
    throw std::invalid_argument(
        "from_frequency_range: need 0 < f_min <= f_max");
  FilterBankSpec spec;
  spec.signal_length = signal_length;
  spec.sample_rate = sample_rate;
  spec.channels = channels;
  spec.decimation = decimation;
  const double xi_b = center_frequency(params);
  spec.min_scale = xi_b / f_max;
  spec.bins_per_octave =
      channels > 1 ? static_cast<double>(channels - 1) / std::log2(f_max / f_min)
                   : 1.0;
  return spec;
}

double channel_center(const FilterBankSpec& spec, const CauchyParams& params,
                      std::size_t k) {
  return center_frequency(params) / scale_at(spec, k);
}

std::complex<double> WaveletFrame::filter_value(std::size_t k,
                                                std::size_t bin) const {
  const BandFilter& f = filters[k];
  if (bin < f.first_bin || bin >= f.first_bin + f.values.size())
    return {0.0, 0.0};
  return f.values[bin - f.first_bin];
}

WaveletFrame build_frame(const FilterBankSpec& spec,
                         const CauchyParams& params) {
  spec.validate(params);
  WaveletFrame frame;
  frame.spec = spec;
  frame.params = peak_normalized(params);
  frame.base_center = center_frequency(params);

  const std::size_t length = spec.signal_length;
  const std::size_t half = length / 2;
  const double bin_hz = spec.sample_rate / static_cast<double>(length);

  // Dimensionless support of the normalized response; shared by all channels
  // since only the dilation differs.
  const double u_lo =
      magnitude_drop_frequency(frame.params, kSupportDropLog, false);
  const double u_hi =
      magnitude_drop_frequency(frame.params, kSupportDropLog, true);

  frame.filters.resize(spec.channels);
  frame.centers.resize(spec.channels);
  std::vector<double> psi_sq(half + 1, 0.0);  // Psi over bins 0..L/2

  for (std::size_t k = 0; k < spec.channels; ++k) {
    const double y = scale_at(spec, k);
    frame.centers[k] = frame.base_center / y;
    const double bins_per_unit = 1.0 / (y * bin_hz);
    std::size_t j_lo = static_cast<std::size_t>(
        std::max(1.0, std::ceil(u_lo * bins_per_unit)));
    std::size_t j_hi = static_cast<std::size_t>(
        std::min(static_cast<double>(half), std::floor(u_hi * bins_per_unit)));
    if (j_hi < j_lo) j_lo = j_hi = std::min<std::size_t>(
        half, std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                            frame.centers[k] / bin_hz))));
    BandFilter& f = frame.filters[k];
    f.first_bin = j_lo;
    f.values.resize(j_hi - j_lo + 1);
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
      const std::complex<double> v =
          freq_response(frame.params, y * bin_hz * static_cast<double>(j));
      f.values[j - j_lo] = v;
      psi_sq[j] += std::norm(v);
    }
  }

  const double psi_max = *std::max_element(psi_sq.begin(), psi_sq.end());
  if (!(psi_max > 0.0))
    throw std::runtime_error("build_frame: all wavelet responses vanish");

  // Raised-cosine plateau: 1 up to the lowest center, cosine rolloff to zero
  // at the second-lowest center (one octave up when K == 1).
  const double plateau_end = frame.centers[spec.channels - 1];
  const double roll_end =
      spec.channels >= 2 ? frame.centers[spec.channels - 2] : 2.0 * plateau_end;
  auto plateau = [&](double f_hz) {
    if (f_hz <= plateau_end) return 1.0;
    if (f_hz >= roll_end) return 0.0;
    const double t = (f_hz - plateau_end) / (roll_end - plateau_end);
    return 0.5 * (1.0 + std::cos(std::numbers::pi * t));
  };

  frame.lowpass.assign(length, {0.0, 0.0});
  const double inv_dec = 1.0 / static_cast<double>(spec.decimation);
  for (std::size_t j = 0; j <= half; ++j) {
    const double lp = inv_dec * plateau(bin_hz * static_cast<double>(j)) *
                      std::sqrt(std::max(psi_max - psi_sq[j], 0.0));
    frame.lowpass[j] = {lp, 0.0};
    if (!self_paired(j, length)) frame.lowpass[length - j] = {lp, 0.0};
  }

  // Invertibility precondition: Psi + |a_d psi_lp|^2 must be zero-free.
  double cover_min = std::numeric_limits<double>::infinity();
  double cover_max = 0.0;
  frame.coverage.assign(half + 1, 0.0);
  for (std::size_t j = 0; j <= half; ++j) {
    const double lp_sq = std::norm(frame.lowpass[j]);
    const double total =
        psi_sq[j] + lp_sq * static_cast<double>(spec.decimation) *
                        static_cast<double>(spec.decimation);
    cover_min = std::min(cover_min, total);
    cover_max = std::max(cover_max, total);
    const double weight = self_paired(j, length) ? 1.0 : 0.5;
    frame.coverage[j] = (weight * psi_sq[j] + lp_sq) * inv_dec;
  }
  if (!(cover_min > cover_max * 1e-290)) {
    std::ostringstream msg;
    msg << "build_frame: coverage has a zero (min " << cover_min
        << "), frame not invertible";
    throw std::invalid_argument(msg.str());
  }
  return frame;
}

CoefficientGrid analyze_spectrum(std::span<const std::complex<double>> spectrum,
                                 const WaveletFrame& frame) {
  const std::size_t length = frame.spec.signal_length;
  if (spectrum.size() != length)
    throw std::invalid_argument("analyze_spectrum: spectrum length mismatch");
  const std::size_t hops = frame.spec.hops();
  CoefficientGrid grid;
  grid.channels = frame.spec.channels;
  grid.hops = hops;
  grid.spec = frame.spec;
  grid.centers = frame.centers;
  grid.wavelet.resize(grid.channels * hops);
  grid.lowpass.resize(hops);

  const double inv_len = 1.0 / static_cast<double>(length);
  cvec fold(hops), row(hops);
  for (std::size_t k = 0; k < grid.channels; ++k) {
    std::fill(fold.begin(), fold.end(), std::complex<double>{0.0, 0.0});
    const BandFilter& f = frame.filters[k];
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const std::size_t j = f.first_bin + i;
      fold[j % hops] += spectrum[j] * std::conj(f.values[i]);
    }
    fft::backward(fold, row);
    for (std::size_t n = 0; n < hops; ++n) grid.at(k, n) = row[n] * inv_len;
  }
  std::fill(fold.begin(), fold.end(), std::complex<double>{0.0, 0.0});
  for (std::size_t j = 0; j < length; ++j)
    fold[j % hops] += spectrum[j] * std::conj(frame.lowpass[j]);
  fft::backward(fold, row);
  for (std::size_t n = 0; n < hops; ++n)
    grid.lowpass[n] = row[n].real() * inv_len;
  return grid;
}

CoefficientGrid analyze(std::span<const double> signal,
                        const WaveletFrame& frame) {
  if (signal.size() != frame.spec.signal_length)
    throw std::invalid_argument("analyze: signal length mismatch");
  return analyze_spectrum(fft::forward_real(signal), frame);
}

SynthesisResult synthesize_ls(const CoefficientGrid& coeffs,
                              const WaveletFrame& frame, double cg_tol,
                              int cg_maxit,
                              const std::vector<std::complex<double>>* warm) {
  if (coeffs.channels != frame.spec.channels ||
      coeffs.hops != frame.spec.hops())
    throw std::invalid_argument("synthesize: grid does not match frame");
  const std::size_t length = frame.spec.signal_length;

  FrameOperator op(frame);
  cvec rhs = adjoint_spectrum(coeffs, frame);
  cvec x;
  if (warm != nullptr && warm->size() == length) x = *warm;
  const CgOutcome cg = conjugate_gradient(op, rhs, x, cg_tol, cg_maxit);

  SynthesisResult result;
  result.iterations = cg.iterations;
  result.residual = cg.residual;
  result.converged = cg.converged;
  cvec time(length);
  fft::backward(x, time);
  result.signal.resize(length);
  const double inv_len = 1.0 / static_cast<double>(length);
  for (std::size_t l = 0; l < length; ++l)
    result.signal[l] = time[l].real() * inv_len;
  result.spectrum = std::move(x);
  return result;
}

std::vector<double> synthesize(const CoefficientGrid& coeffs,
                               const WaveletFrame& frame, double cg_tol,
                               int cg_maxit) {
  SynthesisResult result = synthesize_ls(coeffs, frame, cg_tol, cg_maxit);
  if (!result.converged) {
    std::ostringstream msg;
    msg << "synthesize: CG did not reach tol " << cg_tol << " within "
        << cg_maxit << " iterations (residual " << result.residual << ")";
    throw std::runtime_error(msg.str());
  }
  return std::move(result.signal);
}

double frame_bound_ratio(const WaveletFrame& frame, int iters,
                         std::uint64_t seed) {
  const std::size_t length = frame.spec.signal_length;
  FrameOperator op(frame);

  auto random_spectrum = [&](std::uint64_t s) {
    SplitMix rng(splitmix64(s));
    cvec v(length);
    for (auto& z : v) z = {rng.gaussian(), rng.gaussian()};
    hermitian_project(v);
    return v;
  };
  auto normalize = [](cvec& v) {
    const double n = std::sqrt(real_dot(v, v));
    for (auto& z : v) z /= n;
  };

  cvec v = random_spectrum(seed), w(length);
  normalize(v);
  double lambda_max = 0.0;
  for (int it = 0; it < iters; ++it) {
    op.apply(v, w);
    lambda_max = real_dot(v, w);
    normalize(w);
    std::swap(v, w);
  }

  cvec u = random_spectrum(seed + 1);
  normalize(u);
  cvec z;
  for (int it = 0; it < iters; ++it) {
    z.assign(length, {0.0, 0.0});
    const CgOutcome cg = conjugate_gradient(op, u, z, 1e-10, 2000);
    if (!cg.converged)
      throw std::runtime_error(
          "frame_bound_ratio: inverse iteration stalled (near-singular frame)");
    normalize(z);
    std::swap(u, z);
  }
  op.apply(u, w);
  const double lambda_min = real_dot(u, w) / real_dot(u, u);
  if (!(lambda_min > 0.0))
    throw std::runtime_error("frame_bound_ratio: nonpositive lower bound");
  return std::max(lambda_max / lambda_min, 1.0);
}

std::vector<double> total_coverage(const WaveletFrame& frame) {
  const std::size_t half = frame.spec.signal_length / 2;
  const double dec_sq = static_cast<double>(frame.spec.decimation) *
                        static_cast<double>(frame.spec.decimation);
  std::vector<double> cover(half + 1, 0.0);
  for (const BandFilter& f : frame.filters)
    for (std::size_t i = 0; i < f.values.size(); ++i)
      cover[f.first_bin + i] += std::norm(f.values[i]);
  for (std::size_t j = 0; j <= half; ++j)
    cover[j] += dec_sq * std::norm(frame.lowpass[j]);
  return cover;
}

}  // namespace wavephase
