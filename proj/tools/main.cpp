// Command-line front end: analysis, synthesis, phaseless reconstruction,
// evaluation sweeps, and the numerical verification suite.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wavephase/dense.hpp"
#include "wavephase/filterbank.hpp"
#include "wavephase/grid_io.hpp"
#include "wavephase/griffin_lim.hpp"
#include "wavephase/identities.hpp"
#include "wavephase/metrics.hpp"
#include "wavephase/phase.hpp"
#include "wavephase/reassign.hpp"
#include "wavephase/testsignals.hpp"
#include "wavephase/wav.hpp"

namespace {

using namespace wavephase;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct FrameOptions {
  double alpha = 300.0;
  double beta = 0.0;
  double gamma_re = 1.0;
  double gamma_im = 0.0;
  std::size_t channels = 240;
  std::size_t decimation = 12;
  // Frequencies are relative to the sample rate; defaults follow the
  // geometric range (1/20) * [2^-6, 2^3.3]. Alternatively the grid can be
  // pinned directly through (K, bins_per_octave, min_scale).
  double f_min = std::exp2(-6.0) / 20.0;
  double f_max = std::exp2(3.3) / 20.0;
  double bins_per_octave = 0.0;  // 0 = derive from f_min/f_max
  double min_scale = 0.0;        // seconds; 0 = derive from f_max

  CauchyParams params() const {
    return CauchyParams(alpha, beta, gamma_re, gamma_im);
  }
  FilterBankSpec spec(std::size_t length, double rate) const {
    if (bins_per_octave > 0.0 || min_scale > 0.0) {
      if (!(bins_per_octave > 0.0) || !(min_scale > 0.0))
        throw CLI::ValidationError(
            "--bins-per-octave",
            "--bins-per-octave and --min-scale must be given together");
      FilterBankSpec spec;
      spec.signal_length = length;
      spec.sample_rate = rate;
      spec.channels = channels;
      spec.decimation = decimation;
      spec.bins_per_octave = bins_per_octave;
      spec.min_scale = min_scale;
      return spec;
    }
    return FilterBankSpec::from_frequency_range(length, rate, channels,
                                                decimation, f_min * rate,
                                                f_max * rate, params());
  }
};

struct MethodOptions {
  double tol = 1e-6;
  std::uint64_t seed = 0;
  int max_iter = 150;
  double momentum = 0.99;
  double cg_tol = 1e-10;
  int cg_maxit = 500;
};

void add_frame_options(CLI::App* cmd, FrameOptions& opt) {
  cmd->add_option("--alpha", opt.alpha, "Wavelet order alpha (> 1)");
  cmd->add_option("--beta", opt.beta, "Hyperbolic chirp parameter beta");
  cmd->add_option("--gamma-re", opt.gamma_re, "Re(gamma), scale factor (> 0)");
  cmd->add_option("--gamma-im", opt.gamma_im, "Im(gamma), shift factor");
  cmd->add_option("--channels,-K", opt.channels, "Number of wavelet channels K");
  cmd->add_option("--decimation", opt.decimation,
                  "Decimation step a_d (must divide the signal length)");
  cmd->add_option("--fmin", opt.f_min,
                  "Lowest channel center, relative to the sample rate");
  cmd->add_option("--fmax", opt.f_max,
                  "Highest channel center, relative to the sample rate");
  cmd->add_option("--bins-per-octave,-B", opt.bins_per_octave,
                  "Channels per octave (overrides --fmin/--fmax; needs "
                  "--min-scale)");
  cmd->add_option("--min-scale", opt.min_scale,
                  "Minimum scale y_m in seconds (with --bins-per-octave)");
}

void add_method_options(CLI::App* cmd, MethodOptions& opt) {
  cmd->add_option("--tol", opt.tol, "Relative magnitude tolerance for WPGHI");
  cmd->add_option("--seed", opt.seed, "Random seed (below-tolerance phases)");
  cmd->add_option("--max-iter", opt.max_iter, "Fast Griffin-Lim iteration cap");
  cmd->add_option("--momentum", opt.momentum, "Fast Griffin-Lim momentum");
  cmd->add_option("--cg-tol", opt.cg_tol, "CG tolerance for synthesis");
  cmd->add_option("--cg-maxit", opt.cg_maxit, "CG iteration cap for synthesis");
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// --config FILE reads flat key=value lines ('#' comments allowed) and turns
// them into --key=value flags inserted right after the subcommand name, so
// that explicitly given flags override the file (options take the last
// occurrence).
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size())
        throw std::runtime_error("--config requires a file path");
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot read config file " + config_path);
  std::vector<std::string> extra;
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config: empty key in '" + line + "'");
    extra.push_back("--" + key + "=" + value);
  }

  // Insert after the subcommand token (the first non-flag argument).
  auto at = args.begin();
  while (at != args.end() && !at->empty() && (*at)[0] == '-') ++at;
  if (at != args.end()) ++at;
  args.insert(at, extra.begin(), extra.end());
  return args;
}

struct MethodRun {
  std::vector<double> signal;
  double sc_db = 0.0;
};

// Shared pipeline: strip the phase, reconstruct with the chosen method, and
// score against the input magnitudes (same frame on both sides).
MethodRun run_method(const std::string& method, const MagnitudeGrid& m,
                     const WaveletFrame& frame, const CauchyParams& params,
                     const MethodOptions& opt) {
  MethodRun run;
  if (method == "wpghi") {
    PhaseGrid phase = wpghi_from_magnitude(m, params, opt.tol, opt.seed);
    run.signal = synthesize(combine(m, phase), frame, opt.cg_tol, opt.cg_maxit);
  } else if (method == "rfglim" || method == "wfglim") {
    FglimConfig cfg;
    cfg.max_iter = opt.max_iter;
    cfg.momentum = opt.momentum;
    cfg.seed = opt.seed;
    cfg.cg_tol = opt.cg_tol;
    cfg.cg_maxit = opt.cg_maxit;
    PhaseGrid warm;
    if (method == "wfglim") {
      warm = wpghi_from_magnitude(m, params, opt.tol, opt.seed);
      cfg.init = FglimInit::WarmStart;
      cfg.warm_start = &warm;
    }
    run.signal = fast_griffin_lim(m, frame, cfg).signal;
  } else {
    throw CLI::ValidationError("method", "unknown method '" + method + "'");
  }
  run.sc_db = spectral_convergence(magnitude(analyze(run.signal, frame)), m);
  return run;
}

int cmd_analyze(const std::string& in_path, const std::string& out_path,
                const FrameOptions& frame_opt) {
  const WavData wav = read_wav(in_path);
  const FilterBankSpec spec =
      frame_opt.spec(wav.samples.size(), wav.sample_rate);
  const CauchyParams params = frame_opt.params();
  spec.validate(params);
  const WaveletFrame frame = build_frame(spec, params);
  const CoefficientGrid grid = analyze(wav.samples, frame);
  save_grid(out_path, grid, params);
  std::printf("analyzed %s: L=%zu K=%zu a_d=%zu redundancy=%.3f\n",
              in_path.c_str(), spec.signal_length, spec.channels,
              spec.decimation,
              static_cast<double>(spec.channels) /
                  static_cast<double>(spec.decimation));
  std::printf("frame bound ratio ~= %.4g\n", frame_bound_ratio(frame, 12));
  return 0;
}

int cmd_synth(const std::string& in_path, const std::string& out_path,
              const MethodOptions& opt) {
  const LoadedGrid loaded = load_grid(in_path);
  const WaveletFrame frame = build_frame(loaded.grid.spec, loaded.params);
  const std::vector<double> signal =
      synthesize(loaded.grid, frame, opt.cg_tol, opt.cg_maxit);
  const std::size_t clipped =
      write_wav(out_path, signal, loaded.grid.spec.sample_rate);
  if (clipped > 0)
    std::fprintf(stderr, "warning: %zu samples clipped\n", clipped);
  std::printf("wrote %s (%zu samples)\n", out_path.c_str(), signal.size());
  return 0;
}

int cmd_reconstruct(const std::string& in_path, const std::string& method,
                    const std::string& out_path, const std::string& report_path,
                    const MethodOptions& opt) {
  const LoadedGrid loaded = load_grid(in_path);
  const WaveletFrame frame = build_frame(loaded.grid.spec, loaded.params);
  const MagnitudeGrid m = magnitude(loaded.grid);

  const double t0 = now_ms();
  const MethodRun run = run_method(method, m, frame, loaded.params, opt);
  const double elapsed = now_ms() - t0;

  if (!out_path.empty()) {
    const std::size_t clipped =
        write_wav(out_path, run.signal, loaded.grid.spec.sample_rate);
    if (clipped > 0)
      std::fprintf(stderr, "warning: %zu samples clipped\n", clipped);
  }
  ReconstructionReport report;
  report.signal_id = std::filesystem::path(in_path).stem().string();
  report.method = method;
  report.alpha = loaded.params.alpha;
  report.beta = loaded.params.beta;
  report.decimation = loaded.grid.spec.decimation;
  report.channels = loaded.grid.spec.channels;
  report.bins_per_octave = loaded.grid.spec.bins_per_octave;
  report.sc_db = run.sc_db;
  report.runtime_ms = elapsed;
  report.seed = opt.seed;
  if (!report_path.empty()) {
    const bool fresh = !std::filesystem::exists(report_path);
    std::ofstream out(report_path, std::ios::app);
    if (!out) throw std::runtime_error("cannot write report " + report_path);
    if (fresh) out << kReportCsvHeader << '\n';
    out << report_csv_row(report) << '\n';
  }
  std::printf("%s: SC = %.4f dB (%.1f ms)\n", method.c_str(), run.sc_db,
              elapsed);
  return 0;
}

struct EvalTuple {
  double alpha;
  std::size_t decimation;
  std::size_t channels;
};

int cmd_evaluate(const std::string& corpus_dir, const std::string& out_path,
                 std::vector<std::string> tuple_args, const FrameOptions& base,
                 const MethodOptions& opt, unsigned jobs) {
  std::vector<EvalTuple> tuples;
  if (tuple_args.empty()) tuple_args.push_back("300,12,240");
  for (const std::string& arg : tuple_args) {
    EvalTuple t{};
    if (std::sscanf(arg.c_str(), "%lf,%zu,%zu", &t.alpha, &t.decimation,
                    &t.channels) != 3)
      throw CLI::ValidationError("--tuple", "expected alpha,a_d,K: " + arg);
    tuples.push_back(t);
  }

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::runtime_error("evaluate: no .wav files in " + corpus_dir);

  const std::vector<std::string> methods = {"wpghi", "rfglim", "wfglim"};
  struct Task {
    std::size_t file_index, tuple_index;
  };
  std::vector<Task> tasks;
  for (std::size_t f = 0; f < files.size(); ++f)
    for (std::size_t t = 0; t < tuples.size(); ++t) tasks.push_back({f, t});

  // One result slot per (task, method); workers own disjoint slots.
  std::vector<std::optional<ReconstructionReport>> results(tasks.size() *
                                                           methods.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= tasks.size()) return;
      const Task task = tasks[index];
      const EvalTuple tuple = tuples[task.tuple_index];
      const std::string id = files[task.file_index].stem().string();
      try {
        const WavData wav = read_wav(files[task.file_index].string());
        std::size_t length =
            wav.samples.size() - wav.samples.size() % tuple.decimation;
        if (length == 0)
          throw std::runtime_error("signal shorter than one hop");
        std::vector<double> samples(wav.samples.begin(),
                                    wav.samples.begin() +
                                        static_cast<std::ptrdiff_t>(length));
        FrameOptions frame_opt = base;
        frame_opt.alpha = tuple.alpha;
        frame_opt.decimation = tuple.decimation;
        frame_opt.channels = tuple.channels;
        const CauchyParams params = frame_opt.params();
        const WaveletFrame frame =
            build_frame(frame_opt.spec(length, wav.sample_rate), params);
        const MagnitudeGrid m = magnitude(analyze(samples, frame));
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
          const double t0 = now_ms();
          const MethodRun run = run_method(methods[mi], m, frame, params, opt);
          ReconstructionReport r;
          r.signal_id = id;
          r.method = methods[mi];
          r.alpha = tuple.alpha;
          r.beta = frame_opt.beta;
          r.decimation = tuple.decimation;
          r.channels = tuple.channels;
          r.bins_per_octave = frame.spec.bins_per_octave;
          r.sc_db = run.sc_db;
          r.runtime_ms = now_ms() - t0;
          r.seed = opt.seed;
          results[index * methods.size() + mi] = std::move(r);
        }
      } catch (const std::exception& e) {
        std::scoped_lock lock(log_mutex);
        std::fprintf(stderr, "evaluate: %s (alpha=%g,a_d=%zu,K=%zu): %s\n",
                     id.c_str(), tuple.alpha, tuple.decimation, tuple.channels,
                     e.what());
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<ReconstructionReport> rows;
  for (auto& r : results)
    if (r.has_value()) rows.push_back(std::move(*r));

  // Summary rows: mean and standard deviation per (method, tuple).
  std::vector<ReconstructionReport> summary;
  for (const EvalTuple& tuple : tuples) {
    for (const std::string& method : methods) {
      std::vector<double> scs;
      double runtime = 0.0;
      for (const auto& r : rows)
        if (r.method == method && r.alpha == tuple.alpha &&
            r.decimation == tuple.decimation && r.channels == tuple.channels) {
          scs.push_back(r.sc_db);
          runtime += r.runtime_ms;
        }
      if (scs.empty()) continue;
      double mean = 0.0;
      for (double v : scs) mean += v;
      mean /= static_cast<double>(scs.size());
      double var = 0.0;
      for (double v : scs) var += (v - mean) * (v - mean);
      var /= static_cast<double>(scs.size());
      ReconstructionReport r;
      r.method = method;
      r.alpha = tuple.alpha;
      r.decimation = tuple.decimation;
      r.channels = tuple.channels;
      r.runtime_ms = runtime / static_cast<double>(scs.size());
      r.seed = opt.seed;
      r.signal_id = "mean";
      r.sc_db = mean;
      summary.push_back(r);
      r.signal_id = "std";
      r.sc_db = std::sqrt(var);
      r.runtime_ms = 0.0;
      summary.push_back(r);
    }
  }
  rows.insert(rows.end(), summary.begin(), summary.end());

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  write_report_csv(out, rows);
  std::printf("evaluated %zu signals x %zu tuples -> %s\n", files.size(),
              tuples.size(), out_path.c_str());
  return 0;
}

// Built-in continuous test signals for the verification sweeps.
SignalSpec verify_tone() {
  SignalSpec sig;
  sig.duration = 1.0;
  sig.fn = [](double t) {
    const double u = (t - 0.5) / 0.08;
    return std::exp(-0.5 * u * u) * std::cos(kTwoPi * 60.0 * t);
  };
  return sig;
}

SignalSpec verify_chirp() {
  SignalSpec sig;
  sig.duration = 1.0;
  sig.fn = [](double t) {
    const double u = (t - 0.5) / 0.1;
    return std::exp(-0.5 * u * u) * std::cos(kTwoPi * (40.0 * t + 20.0 * t * t));
  };
  return sig;
}

DenseCheckConfig verify_config(const CauchyParams& params) {
  DenseCheckConfig cfg;
  cfg.base_samples = 1024;
  cfg.base_scales = 21;
  const double y0 = center_frequency(params) / 60.0;
  cfg.y_lo = 0.7 * y0;
  cfg.y_hi = 1.4 * y0;
  return cfg;
}

void csv_row(std::ostream& out, const std::string& check, double spacing,
             double rms, double max, double ratio) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%.10g,%.10g", check.c_str(),
                spacing, rms, max, ratio);
  out << buf << '\n';
}

int cmd_verify(const std::string& check, const std::string& out_path,
               const FrameOptions& frame_opt, int refine,
               const std::string& wavelet) {
  const CauchyParams params = frame_opt.params();
  std::ostringstream csv;
  csv << "check,spacing,rms_residual,max_residual,refinement_ratio\n";

  if (check == "thm1") {
    const DenseCheckConfig cfg = verify_config(params);
    DerivativeCheckReport prev{};
    for (int level = 0; level < refine; ++level) {
      const DerivativeCheckReport rep =
          wt_derivative_check(verify_tone(), params, cfg, level);
      csv_row(csv, "thm1_x", rep.x.spacing_x, rep.x.rms, rep.x.max,
              level > 0 ? prev.x.rms / rep.x.rms : 0.0);
      csv_row(csv, "thm1_y", rep.y.spacing_y, rep.y.rms, rep.y.max,
              level > 0 ? prev.y.rms / rep.y.rms : 0.0);
      prev = rep;
    }
  } else if (check == "cr") {
    const DenseCheckConfig cfg = verify_config(params);
    CrReport prev{};
    for (int level = 0; level < refine; ++level) {
      const CrReport rep = cr_residual(verify_chirp(), params, cfg, level);
      csv_row(csv, "cr_x", rep.x.spacing_x, rep.x.rms, rep.x.max,
              level > 0 ? prev.x.rms / rep.x.rms : 0.0);
      csv_row(csv, "cr_y", rep.y.spacing_y, rep.y.rms, rep.y.max,
              level > 0 ? prev.y.rms / rep.y.rms : 0.0);
      prev = rep;
    }
  } else if (check == "laplace") {
    const DenseCheckConfig cfg = verify_config(params);
    LaplacianReport prev{};
    for (int level = 0; level < refine; ++level) {
      const LaplacianReport rep =
          laplacian_check(verify_chirp(), params, cfg, level);
      csv_row(csv, "laplace_mag", rep.magnitude.spacing_x, rep.magnitude.rms,
              rep.magnitude.max,
              level > 0 ? prev.magnitude.rms / rep.magnitude.rms : 0.0);
      csv_row(csv, "laplace_phase", rep.phase.spacing_x, rep.phase.rms,
              rep.phase.max, level > 0 ? prev.phase.rms / rep.phase.rms : 0.0);
      prev = rep;
    }
  } else if (check == "reassign") {
    const DenseCheckConfig cfg = verify_config(params);
    double prev_x = 0.0, prev_xi = 0.0;
    for (int level = 0; level < refine; ++level) {
      const std::size_t n = level_samples(cfg, level);
      const std::vector<double> samples = sample_signal(verify_chirp(), n);
      const double rate = static_cast<double>(n);
      const ReassignmentPair pair = reassignment_map(
          samples, rate, level_scales(cfg, level), params, cfg.mask_rel);
      csv_row(csv, "reassign_x", 1.0 / rate, pair.agree_x_rms_samples, 0.0,
              level > 0 ? prev_x / pair.agree_x_rms_samples : 0.0);
      csv_row(csv, "reassign_xi", 1.0 / rate, pair.agree_xi_rms_rel, 0.0,
              level > 0 ? prev_xi / pair.agree_xi_rms_rel : 0.0);
      prev_x = pair.agree_x_rms_samples;
      prev_xi = pair.agree_xi_rms_rel;
    }
  } else if (check == "ridge") {
    const DenseCheckConfig cfg = verify_config(params);
    const std::size_t n = level_samples(cfg, refine > 1 ? 1 : 0);
    const std::vector<double> samples = sample_signal(verify_chirp(), n);
    const double rate = static_cast<double>(n);
    const double xi_b = center_frequency(params);
    std::vector<double> scales = uniform_scales(
        0.5 * cfg.y_lo, 3.0 * cfg.y_hi, 127);
    KernelSet kernels = wavelet == "twopeak"
                            ? two_peak_kernels(params, CauchyParams(
                                                           params.alpha * 1.7))
                            : cauchy_kernels(peak_normalized(params));
    const DenseGrid grid = dense_analyze(samples, rate, scales, kernels.psi,
                                         WtConvention::ScaleUnitary);
    const RidgeCoincidence c =
        ridge_coincidence(ridge_points(grid, xi_b, 1e-2), scales);
    csv_row(csv, "ridge_" + wavelet, scales[1] - scales[0],
            1.0 - c.matched_fraction, c.max_distance_cells, 0.0);
  } else if (check == "gabor") {
    const DenseCheckConfig cfg = verify_config(params);
    double prev = 0.0;
    for (int level = 0; level < refine; ++level) {
      const std::size_t n = level_samples(cfg, level);
      const std::vector<double> samples = sample_signal(verify_chirp(), n);
      const GaborReassignReport rep = gabor_reassignment_check(
          samples, static_cast<double>(n), level_scales(cfg, level),
          center_frequency(params), cfg.mask_rel);
      csv_row(csv, "gabor_x", 1.0 / static_cast<double>(n),
              rep.agree_x_rms_samples, 0.0,
              level > 0 ? prev / rep.agree_x_rms_samples : 0.0);
      prev = rep.agree_x_rms_samples;
    }
  } else if (check == "pole") {
    // Exploratory dump of the phase derivative near transform zeros; no
    // pass/fail semantics attached.
    const DenseCheckConfig cfg = verify_config(params);
    SignalSpec two_tones;
    two_tones.duration = 1.0;
    two_tones.fn = [](double t) {
      return std::cos(kTwoPi * 55.0 * t) + std::cos(kTwoPi * 65.0 * t);
    };
    const std::size_t n = level_samples(cfg, 0);
    const std::vector<double> samples = sample_signal(two_tones, n);
    const DenseGrid grid = dense_analyze(
        samples, static_cast<double>(n), level_scales(cfg, 1),
        cauchy_kernels(peak_normalized(params)).psi,
        WtConvention::ScaleUnitary);
    csv.str("");
    csv << "x,y,magnitude,dphi_dx,dphi_dy\n";
    for (std::size_t j = 1; j + 1 < grid.n_scales; ++j)
      for (std::size_t m = 1; m + 1 < grid.n_times; ++m) {
        const auto w = grid.at(j, m);
        const double dx =
            std::arg(grid.at(j, m + 1) * std::conj(grid.at(j, m - 1))) /
            (2.0 * grid.dt);
        const double dy =
            std::arg(grid.at(j + 1, m) * std::conj(grid.at(j - 1, m))) /
            (2.0 * (grid.scales[1] - grid.scales[0]));
        char buf[192];
        std::snprintf(buf, sizeof(buf), "%.8g,%.8g,%.8g,%.8g,%.8g",
                      grid.dt * static_cast<double>(m), grid.scales[j],
                      std::abs(w), dx, dy);
        csv << buf << '\n';
      }
  } else {
    throw CLI::ValidationError("--check", "unknown check '" + check + "'");
  }

  if (out_path.empty() || out_path == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << csv.str();
  }
  return 0;
}

int cmd_reassign(const std::string& in_path, const std::string& out_path,
                 const FrameOptions& frame_opt, std::size_t n_scales) {
  const WavData wav = read_wav(in_path);
  const CauchyParams params = frame_opt.params();
  const double xi_b = center_frequency(params);
  const double rate = wav.sample_rate;
  const std::vector<double> scales = uniform_scales(
      xi_b / (frame_opt.f_max * rate), xi_b / (frame_opt.f_min * rate),
      n_scales);
  const ReassignmentPair pair =
      reassignment_map(wav.samples, rate, scales, params);

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << "x,xi,xhat,xihat,xhat_mag,xihat_mag\n";
  const DenseGrid grid = dense_analyze(
      wav.samples, rate, scales, cauchy_kernels(peak_normalized(params)).psi,
      WtConvention::ScaleUnitary);
  for (std::size_t j = 0; j < pair.quotient.n_scales; ++j)
    for (std::size_t m = 0; m < pair.quotient.n_times; ++m) {
      const std::size_t i = j * pair.quotient.n_times + m;
      if (!pair.quotient.valid[i]) continue;
      char buf[224];
      std::snprintf(buf, sizeof(buf), "%.8g,%.8g,%.8g,%.8g,%.8g,%.8g",
                    static_cast<double>(m) / rate, xi_b / grid.scales[j],
                    pair.quotient.xhat[i], pair.quotient.xihat[i],
                    pair.magnitude_based.valid[i] ? pair.magnitude_based.xhat[i]
                                                  : 0.0,
                    pair.magnitude_based.valid[i]
                        ? pair.magnitude_based.xihat[i]
                        : 0.0);
      out << buf << '\n';
    }
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete continuous wavelet transform with Cauchy wavelets, "
               "phaseless reconstruction (WPGHI / fast Griffin-Lim), and a "
               "numerical verification suite"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.footer("Any subcommand also accepts --config FILE with flat key=value "
             "lines; command-line flags override the file.");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Wavelet-analyze a WAV "
                                         "file into a coefficient grid");
  std::string in_path, out_path;
  FrameOptions frame_opt;
  analyze_cmd->add_option("--in", in_path, "Input WAV")->required();
  analyze_cmd->add_option("--out", out_path, "Output grid file")->required();
  add_frame_options(analyze_cmd, frame_opt);

  // synth
  auto* synth_cmd =
      app.add_subcommand("synth", "Synthesize a signal from a grid file");
  std::string synth_in, synth_out;
  MethodOptions synth_opt;
  synth_cmd->add_option("--in", synth_in, "Input grid file")->required();
  synth_cmd->add_option("--out", synth_out, "Output WAV")->required();
  add_method_options(synth_cmd, synth_opt);

  // reconstruct
  auto* rec_cmd = app.add_subcommand(
      "reconstruct", "Phaseless reconstruction from grid magnitudes");
  std::string rec_in, rec_out, rec_report;
  std::string rec_method = "wpghi";
  MethodOptions rec_opt;
  rec_cmd->add_option("--in", rec_in, "Input grid file")->required();
  rec_cmd->add_option("--method", rec_method, "wpghi | rfglim | wfglim");
  rec_cmd->add_option("--out", rec_out, "Output WAV");
  rec_cmd->add_option("--report", rec_report, "Append a CSV report row here");
  add_method_options(rec_cmd, rec_opt);

  // evaluate
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "Run all methods over a corpus directory of WAV files");
  std::string eval_corpus, eval_out;
  std::vector<std::string> eval_tuples;
  unsigned eval_jobs = 1;
  FrameOptions eval_frame;
  MethodOptions eval_opt;
  eval_cmd->add_option("--corpus", eval_corpus, "Directory of WAV files")
      ->required();
  eval_cmd->add_option("--out", eval_out, "Output CSV")->required();
  eval_cmd
      ->add_option("--tuple", eval_tuples,
                   "Parameter tuple alpha,a_d,K (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  eval_cmd->add_option("--jobs", eval_jobs, "Worker threads");
  add_frame_options(eval_cmd, eval_frame);
  add_method_options(eval_cmd, eval_opt);

  // verify
  auto* verify_cmd = app.add_subcommand(
      "verify", "Numerical checks of the derivative and phase-magnitude "
                "identities with refinement sweeps");
  std::string verify_check, verify_out = "-", verify_wavelet = "cauchy";
  int verify_refine = 3;
  FrameOptions verify_frame;
  verify_frame.alpha = 100.0;
  verify_cmd
      ->add_option("--check", verify_check,
                   "thm1 | cr | laplace | reassign | ridge | gabor | pole")
      ->required();
  verify_cmd->add_option("--out", verify_out, "Output CSV ('-' for stdout)");
  verify_cmd->add_option("--refine", verify_refine, "Refinement levels");
  verify_cmd->add_option("--wavelet", verify_wavelet,
                         "cauchy | twopeak (ridge check only)");
  add_frame_options(verify_cmd, verify_frame);

  // reassign
  auto* reassign_cmd = app.add_subcommand(
      "reassign", "Dump the reassignment field of a WAV file as CSV");
  std::string reassign_in, reassign_out;
  std::size_t reassign_scales = 96;
  FrameOptions reassign_frame;
  reassign_frame.alpha = 100.0;
  reassign_cmd->add_option("--in", reassign_in, "Input WAV")->required();
  reassign_cmd->add_option("--out", reassign_out, "Output CSV")->required();
  reassign_cmd->add_option("--scales", reassign_scales, "Scale rows");
  add_frame_options(reassign_cmd, reassign_frame);

  std::vector<std::string> args;
  try {
    args = expand_config_args(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  std::vector<const char*> argv2;
  argv2.push_back(argv[0]);
  for (const std::string& a : args) argv2.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv2.size()), argv2.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (analyze_cmd->parsed())
      return cmd_analyze(in_path, out_path, frame_opt);
    if (synth_cmd->parsed()) return cmd_synth(synth_in, synth_out, synth_opt);
    if (rec_cmd->parsed())
      return cmd_reconstruct(rec_in, rec_method, rec_out, rec_report, rec_opt);
    if (eval_cmd->parsed())
      return cmd_evaluate(eval_corpus, eval_out, eval_tuples, eval_frame,
                          eval_opt, eval_jobs);
    if (verify_cmd->parsed())
      return cmd_verify(verify_check, verify_out, verify_frame, verify_refine,
                        verify_wavelet);
    if (reassign_cmd->parsed())
      return cmd_reassign(reassign_in, reassign_out, reassign_frame,
                          reassign_scales);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
