#include "wavephase/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "wavephase/rng.hpp"

namespace wavephase {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

MagnitudeGrid magnitude(const CoefficientGrid& grid, double log_floor_db) {
  MagnitudeGrid m;
  m.channels = grid.channels;
  m.hops = grid.hops;
  m.centers = grid.centers;
  m.hop_seconds = grid.spec.hop_seconds();
  m.log_floor_db = log_floor_db;
  m.spec = grid.spec;
  m.values.resize(grid.wavelet.size());
  for (std::size_t i = 0; i < grid.wavelet.size(); ++i)
    m.values[i] = std::abs(grid.wavelet[i]);
  m.lowpass.resize(grid.lowpass.size());
  for (std::size_t i = 0; i < grid.lowpass.size(); ++i)
    m.lowpass[i] = std::abs(grid.lowpass[i]);
  return m;
}

std::vector<double> log_magnitude(const MagnitudeGrid& m) {
  double peak = 0.0;
  for (double v : m.values) peak = std::max(peak, v);
  const double reference = peak > 0.0 ? peak : 1.0;
  const double floor = reference * std::pow(10.0, m.log_floor_db / 20.0);
  std::vector<double> out(m.values.size());
  for (std::size_t i = 0; i < m.values.size(); ++i)
    out[i] = std::log(std::max(m.values[i], floor));
  return out;
}

std::vector<double> time_diff(std::span<const double> g, std::size_t channels,
                              std::size_t hops, double hop_seconds, bool wrap) {
  if (hops < 3) throw std::invalid_argument("time_diff: need at least 3 hops");
  if (g.size() != channels * hops)
    throw std::invalid_argument("time_diff: grid size mismatch");
  std::vector<double> out(g.size());
  const double half = 1.0 / (2.0 * hop_seconds);
  for (std::size_t k = 0; k < channels; ++k) {
    const double* row = g.data() + k * hops;
    double* dst = out.data() + k * hops;
    for (std::size_t n = 1; n + 1 < hops; ++n)
      dst[n] = (row[n + 1] - row[n - 1]) * half;
    if (wrap) {
      dst[0] = (row[1] - row[hops - 1]) * half;
      dst[hops - 1] = (row[0] - row[hops - 2]) * half;
    } else {
      dst[0] = (row[1] - row[0]) / hop_seconds;
      dst[hops - 1] = (row[hops - 1] - row[hops - 2]) / hop_seconds;
    }
  }
  return out;
}

std::vector<double> scale_diff(std::span<const double> g, std::size_t channels,
                               std::size_t hops,
                               std::span<const double> centers) {
  if (channels < 3)
    throw std::invalid_argument("scale_diff: need at least 3 channels");
  if (g.size() != channels * hops || centers.size() != channels)
    throw std::invalid_argument("scale_diff: grid size mismatch");
  std::vector<double> out(g.size());
  for (std::size_t k = 0; k < channels; ++k) {
    const double* row = g.data() + k * hops;
    const double* next = k + 1 < channels ? row + hops : nullptr;
    const double* prev = k > 0 ? row - hops : nullptr;
    double* dst = out.data() + k * hops;
    if (k == 0) {
      const double inv = 1.0 / (centers[1] - centers[0]);
      for (std::size_t n = 0; n < hops; ++n)
        dst[n] = (next[n] - row[n]) * inv;
    } else if (k == channels - 1) {
      const double inv = 1.0 / (centers[k] - centers[k - 1]);
      for (std::size_t n = 0; n < hops; ++n)
        dst[n] = (row[n] - prev[n]) * inv;
    } else {
      const double up = 0.5 / (centers[k + 1] - centers[k]);
      const double down = 0.5 / (centers[k] - centers[k - 1]);
      for (std::size_t n = 0; n < hops; ++n)
        dst[n] = (next[n] - row[n]) * up + (row[n] - prev[n]) * down;
    }
  }
  return out;
}

PhaseDerivativeGrids phase_derivatives(std::span<const double> logm,
                                       std::size_t channels, std::size_t hops,
                                       const CauchyParams& params,
                                       std::span<const double> centers,
                                       double hop_seconds) {
  if (!(params.alpha > 1.0))
    throw std::invalid_argument("phase_derivatives: requires alpha > 1");
  if (params.gamma_re != 1.0 || params.gamma_im != 0.0)
    throw std::invalid_argument(
        "phase_derivatives: discrete relations implemented for gamma = 1");
  const std::vector<double> dk = scale_diff(logm, channels, hops, centers);
  const std::vector<double> dn =
      time_diff(logm, channels, hops, hop_seconds, /*wrap=*/true);

  PhaseDerivativeGrids out;
  out.channels = channels;
  out.hops = hops;
  out.dphi_dx.resize(logm.size());
  out.dphi_dxi.resize(logm.size());
  for (std::size_t k = 0; k < channels; ++k) {
    const double xi = centers[k];
    const double to_x = 2.0 * kTwoPi * xi * xi / (params.alpha - 1.0);
    const double to_xi = -(params.alpha - 1.0) / (2.0 * kTwoPi * xi * xi);
    const double chirp = params.beta / xi;
    for (std::size_t n = 0; n < hops; ++n) {
      const std::size_t i = k * hops + n;
      out.dphi_dx[i] = to_x * dk[i] + kTwoPi * xi;
      out.dphi_dxi[i] = to_xi * dn[i] + chirp;
    }
  }
  return out;
}

namespace {

struct HeapItem {
  double mag;
  std::uint32_t k;
  std::uint32_t n;
};

// Max-heap on magnitude; ties broken on indices so traversal order (and with
// it the integration result) is fully deterministic.
struct HeapLess {
  bool operator()(const HeapItem& a, const HeapItem& b) const {
    if (a.mag != b.mag) return a.mag < b.mag;
    if (a.k != b.k) return a.k > b.k;
    return a.n > b.n;
  }
};

}  // namespace

PhaseGrid wpghi(const MagnitudeGrid& m, const PhaseDerivativeGrids& d,
                double tol, std::uint64_t seed, WpghiStats* stats) {
  if (d.channels != m.channels || d.hops != m.hops)
    throw std::invalid_argument("wpghi: derivative grid size mismatch");
  if (!(tol > 0.0) || tol > 1.0)
    throw std::invalid_argument("wpghi: tol must lie in (0, 1]");
  const std::size_t channels = m.channels;
  const std::size_t hops = m.hops;
  const std::size_t cells = channels * hops;

  PhaseGrid out;
  out.channels = channels;
  out.hops = hops;
  out.values.assign(cells, 0.0);
  out.reliable.assign(cells, 0);
  out.component.assign(cells, -1);
  if (stats != nullptr) {
    stats->heap_pops = 0;
    stats->components = 0;
    stats->pop_counts.assign(cells, 0);
  }
  if (cells == 0) return out;

  double peak = 0.0;
  for (double v : m.values) peak = std::max(peak, v);
  const double abstol = tol * peak;

  std::size_t remaining = 0;
  for (std::size_t i = 0; i < cells; ++i) {
    if (m.values[i] > abstol) {
      out.reliable[i] = 1;
      ++remaining;
    } else {
      out.values[i] = kTwoPi * hash_unit(seed, i);
    }
  }

  // Cells sorted by descending magnitude provide the per-component argmax
  // seeds without rescanning the grid.
  std::vector<std::uint32_t> order(cells);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (m.values[a] != m.values[b]) return m.values[a] > m.values[b];
    return a < b;
  });
  std::size_t order_pos = 0;

  std::vector<std::uint8_t> pending(out.reliable.begin(), out.reliable.end());
  std::priority_queue<HeapItem, std::vector<HeapItem>, HeapLess> heap;
  const double half_hop = 0.5 * m.hop_seconds;
  std::int32_t component = -1;

  auto integrate = [&](std::size_t from, std::size_t k_to, std::size_t n_to,
                       int time_step, double dxi) {
    const std::size_t to = k_to * hops + n_to;
    double phase = out.values[from];
    if (time_step != 0)
      phase += half_hop * static_cast<double>(time_step) *
               (d.dphi_dx[from] + d.dphi_dx[to]);
    if (dxi != 0.0) phase += 0.5 * dxi * (d.dphi_dxi[from] + d.dphi_dxi[to]);
    out.values[to] = phase;
    out.component[to] = component;
    pending[to] = 0;
    --remaining;
    heap.push({m.values[to], static_cast<std::uint32_t>(k_to),
               static_cast<std::uint32_t>(n_to)});
  };

  while (remaining > 0) {
    // Seed a new component at the largest pending magnitude.
    while (order_pos < cells && !pending[order[order_pos]]) ++order_pos;
    const std::size_t seed_cell = order[order_pos];
    ++component;
    out.values[seed_cell] = 0.0;
    out.component[seed_cell] = component;
    pending[seed_cell] = 0;
    --remaining;
    heap.push({m.values[seed_cell],
               static_cast<std::uint32_t>(seed_cell / hops),
               static_cast<std::uint32_t>(seed_cell % hops)});

    while (!heap.empty()) {
      const HeapItem top = heap.top();
      heap.pop();
      const std::size_t k = top.k;
      const std::size_t n = top.n;
      const std::size_t cur = k * hops + n;
      if (stats != nullptr) {
        ++stats->heap_pops;
        ++stats->pop_counts[cur];
      }
      const std::size_t n_next = n + 1 < hops ? n + 1 : 0;
      const std::size_t n_prev = n > 0 ? n - 1 : hops - 1;
      if (pending[k * hops + n_next]) integrate(cur, k, n_next, +1, 0.0);
      if (pending[k * hops + n_prev]) integrate(cur, k, n_prev, -1, 0.0);
      if (k + 1 < channels && pending[(k + 1) * hops + n])
        integrate(cur, k + 1, n, 0, m.centers[k + 1] - m.centers[k]);
      if (k > 0 && pending[(k - 1) * hops + n])
        integrate(cur, k - 1, n, 0, m.centers[k - 1] - m.centers[k]);
    }
  }
  if (stats != nullptr) stats->components = static_cast<std::size_t>(component + 1);
  return out;
}

CoefficientGrid combine(const MagnitudeGrid& m, const PhaseGrid& p) {
  if (p.channels != m.channels || p.hops != m.hops)
    throw std::invalid_argument("combine: grid size mismatch");
  CoefficientGrid grid;
  grid.channels = m.channels;
  grid.hops = m.hops;
  grid.spec = m.spec;
  grid.centers = m.centers;
  grid.wavelet.resize(m.values.size());
  for (std::size_t i = 0; i < m.values.size(); ++i)
    grid.wavelet[i] = std::polar(m.values[i], p.values[i]);
  grid.lowpass = m.lowpass;
  return grid;
}

PhaseGrid wpghi_from_magnitude(const MagnitudeGrid& m,
                               const CauchyParams& params, double tol,
                               std::uint64_t seed) {
  const std::vector<double> logm = log_magnitude(m);
  const PhaseDerivativeGrids d = phase_derivatives(
      logm, m.channels, m.hops, params, m.centers, m.hop_seconds);
  return wpghi(m, d, tol, seed);
}

}  // namespace wavephase
