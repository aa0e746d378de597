#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wavephase/grid_io.hpp"
#include "wavephase/metrics.hpp"
#include "wavephase/testsignals.hpp"
#include "wavephase/wav.hpp"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int status = -1;
  std::string output;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "wavephase_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CmdResult run_cli(const std::string& args) {
  const fs::path log = work_dir() / "last_output.txt";
  const std::string cmd = std::string(CLI_BINARY_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CmdResult result;
  result.status = raw == -1 ? -1 : WEXITSTATUS(raw);
  std::ifstream in(log);
  std::stringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  return result;
}

std::string make_tone_wav(std::size_t length, std::size_t bin,
                          const std::string& name) {
  const fs::path path = work_dir() / name;
  wavephase::write_wav(path.string(), wavephase::tone(length, bin),
                       static_cast<double>(length));
  return path.string();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Strip the runtime_ms column (second to last) from a report row.
std::string without_runtime(const std::string& row) {
  const std::size_t last = row.rfind(',');
  const std::size_t prev = row.rfind(',', last - 1);
  return row.substr(0, prev) + row.substr(last);
}

std::vector<double> column(const std::vector<std::string>& lines,
                           const std::string& key, std::size_t col) {
  std::vector<double> values;
  for (const std::string& line : lines) {
    if (line.rfind(key, 0) != 0) continue;
    std::stringstream ss(line);
    std::string field;
    for (std::size_t c = 0; c <= col; ++c) std::getline(ss, field, ',');
    values.push_back(std::stod(field));
  }
  return values;
}

}  // namespace

TEST_CASE("analyze writes a grid with K wavelet rows plus the lowpass") {
  const std::string wav = make_tone_wav(8192, 410, "tone.wav");
  const std::string grid = (work_dir() / "tone.dcwt").string();
  CmdResult r = run_cli("analyze --in " + wav + " --out " + grid +
                        " --alpha 300 --channels 320 --decimation 16");
  CHECK(r.status == 0);
  CHECK(r.output.find("redundancy=20") != std::string::npos);
  CHECK(r.output.find("frame bound ratio") != std::string::npos);

  wavephase::LoadedGrid loaded = wavephase::load_grid(grid);
  CHECK(loaded.grid.channels == 320);
  CHECK(loaded.grid.hops == 8192 / 16);
  CHECK(loaded.grid.lowpass.size() == 8192 / 16);  // the K+1-th row
  CHECK(loaded.params.alpha == 300.0);
}

TEST_CASE("analyze validates the decimation step before computing") {
  const std::string wav = make_tone_wav(8192, 410, "tone_val.wav");
  CmdResult r = run_cli("analyze --in " + wav + " --out " +
                        (work_dir() / "nope.dcwt").string() +
                        " --decimation 13");
  CHECK(r.status != 0);
  CHECK(r.output.find("decimation") != std::string::npos);
}

TEST_CASE("missing input paths give a nonzero exit") {
  CmdResult r = run_cli("analyze --in /nonexistent/in.wav --out " +
                        (work_dir() / "x.dcwt").string());
  CHECK(r.status != 0);
  CmdResult r2 = run_cli("reconstruct --in /nonexistent/in.dcwt");
  CHECK(r2.status != 0);
}

TEST_CASE("unknown methods and checks are usage errors") {
  const std::string wav = make_tone_wav(4096, 200, "tone_m.wav");
  const std::string grid = (work_dir() / "tone_m.dcwt").string();
  REQUIRE(run_cli("analyze --in " + wav + " --out " + grid +
                  " --channels 80 --decimation 16")
              .status == 0);
  CmdResult r = run_cli("reconstruct --in " + grid + " --method nonsense");
  CHECK(r.status != 0);
  CHECK(r.output.find("unknown method") != std::string::npos);
  CmdResult r2 = run_cli("verify --check nonsense");
  CHECK(r2.status != 0);
}

TEST_CASE("wpghi reconstruction of a tone reaches -25 dB at redundancy 20") {
  const std::string wav = make_tone_wav(8192, 410, "tone_rec.wav");
  const std::string grid = (work_dir() / "tone_rec.dcwt").string();
  const std::string report = (work_dir() / "tone_rec.csv").string();
  REQUIRE(run_cli("analyze --in " + wav + " --out " + grid +
                  " --alpha 300 --channels 320 --decimation 16")
              .status == 0);
  CmdResult r = run_cli("reconstruct --in " + grid + " --method wpghi --out " +
                        (work_dir() / "tone_rec_out.wav").string() +
                        " --report " + report);
  CHECK(r.status == 0);
  const auto lines = read_lines(report);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == std::string(wavephase::kReportCsvHeader));
  const auto sc = column(lines, "tone_rec,wpghi", 7);
  REQUIRE(sc.size() == 1);
  CHECK(sc[0] <= -25.0);
}

TEST_CASE("wfglim runs wpghi first and then refines") {
  const std::string wav = make_tone_wav(4096, 200, "tone_w.wav");
  const std::string grid = (work_dir() / "tone_w.dcwt").string();
  const std::string report = (work_dir() / "tone_w.csv").string();
  REQUIRE(run_cli("analyze --in " + wav + " --out " + grid +
                  " --alpha 100 --channels 160 --decimation 8")
              .status == 0);
  REQUIRE(run_cli("reconstruct --in " + grid +
                  " --method wpghi --report " + report)
              .status == 0);
  REQUIRE(run_cli("reconstruct --in " + grid +
                  " --method wfglim --max-iter 30 --report " + report)
              .status == 0);
  const auto lines = read_lines(report);
  REQUIRE(lines.size() == 3);
  const double sc_wpghi = column(lines, "tone_w,wpghi", 7)[0];
  const double sc_wfglim = column(lines, "tone_w,wfglim", 7)[0];
  CHECK(sc_wfglim <= sc_wpghi + 1e-9);  // warm start never loses
}

TEST_CASE("synth inverts an analysis grid") {
  const std::string wav = make_tone_wav(4096, 200, "tone_s.wav");
  const std::string grid = (work_dir() / "tone_s.dcwt").string();
  const std::string out = (work_dir() / "tone_s_rec.wav").string();
  REQUIRE(run_cli("analyze --in " + wav + " --out " + grid +
                  " --alpha 100 --channels 160 --decimation 8")
              .status == 0);
  REQUIRE(run_cli("synth --in " + grid + " --out " + out).status == 0);
  wavephase::WavData original = wavephase::read_wav(wav);
  wavephase::WavData rec = wavephase::read_wav(out);
  REQUIRE(rec.samples.size() == original.samples.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    num += (rec.samples[i] - original.samples[i]) *
           (rec.samples[i] - original.samples[i]);
    den += original.samples[i] * original.samples[i];
  }
  CHECK(std::sqrt(num / den) < 1e-6);  // float32 wav quantization floor
}

TEST_CASE("verify cr emits refinement rows with decreasing residuals") {
  const std::string out = (work_dir() / "cr.csv").string();
  CmdResult r = run_cli("verify --check cr --alpha 100 --refine 3 --out " + out);
  CHECK(r.status == 0);
  const auto lines = read_lines(out);
  REQUIRE(lines.size() == 7);  // header + 2 rows per level
  CHECK(lines[0] == "check,spacing,rms_residual,max_residual,refinement_ratio");
  const auto rms = column(lines, "cr_x", 2);
  REQUIRE(rms.size() == 3);
  CHECK(rms[0] > rms[1]);
  CHECK(rms[1] > rms[2]);
}

TEST_CASE("verify ridge separates cauchy from the two-peak control") {
  const std::string out_c = (work_dir() / "ridge_c.csv").string();
  const std::string out_t = (work_dir() / "ridge_t.csv").string();
  REQUIRE(run_cli("verify --check ridge --wavelet cauchy --out " + out_c)
              .status == 0);
  REQUIRE(run_cli("verify --check ridge --wavelet twopeak --out " + out_t)
              .status == 0);
  const double cauchy_div = column(read_lines(out_c), "ridge_cauchy", 2)[0];
  const double twopeak_div = column(read_lines(out_t), "ridge_twopeak", 2)[0];
  CHECK(cauchy_div < 0.05);    // 1 - matched fraction
  CHECK(twopeak_div > 0.3);
}

TEST_CASE("commands are deterministic given config and seed") {
  const std::string out_a = (work_dir() / "det_a.csv").string();
  const std::string out_b = (work_dir() / "det_b.csv").string();
  REQUIRE(run_cli("verify --check thm1 --refine 2 --out " + out_a).status == 0);
  REQUIRE(run_cli("verify --check thm1 --refine 2 --out " + out_b).status == 0);
  CHECK(read_lines(out_a) == read_lines(out_b));

  const std::string wav = make_tone_wav(4096, 200, "tone_d.wav");
  const std::string grid = (work_dir() / "tone_d.dcwt").string();
  REQUIRE(run_cli("analyze --in " + wav + " --out " + grid +
                  " --alpha 100 --channels 160 --decimation 8")
              .status == 0);
  const std::string rep_a = (work_dir() / "det_rep_a.csv").string();
  const std::string rep_b = (work_dir() / "det_rep_b.csv").string();
  REQUIRE(run_cli("reconstruct --in " + grid + " --method wpghi --seed 5 "
                  "--report " + rep_a).status == 0);
  REQUIRE(run_cli("reconstruct --in " + grid + " --method wpghi --seed 5 "
                  "--report " + rep_b).status == 0);
  const auto a = read_lines(rep_a);
  const auto b = read_lines(rep_b);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(without_runtime(a[i]) == without_runtime(b[i]));
}

TEST_CASE("evaluate emits per-signal rows plus summary rows") {
  const fs::path corpus = work_dir() / "corpus";
  fs::create_directories(corpus);
  const auto signals = wavephase::desk_corpus(4000, 4000.0);
  wavephase::write_wav((corpus / "a_tone.wav").string(), signals[0].samples,
                       4000.0);
  wavephase::write_wav((corpus / "b_chirp.wav").string(), signals[3].samples,
                       4000.0);
  const std::string out = (work_dir() / "eval.csv").string();
  CmdResult r = run_cli("evaluate --corpus " + corpus.string() + " --out " +
                        out + " --tuple 30,5,100 --max-iter 25 --jobs 2");
  CHECK(r.status == 0);
  const auto lines = read_lines(out);
  // header + 2 signals x 3 methods + mean/std x 3 methods
  REQUIRE(lines.size() == 1 + 6 + 6);
  CHECK(column(lines, "a_tone,wpghi", 7).size() == 1);
  CHECK(column(lines, "b_chirp,wfglim", 7).size() == 1);
  CHECK(column(lines, "mean,rfglim", 7).size() == 1);
  CHECK(column(lines, "std,wpghi", 7).size() == 1);
}

TEST_CASE("analyze at the (300,12,240) tuple yields K+1 coefficient rows") {
  const std::string wav = make_tone_wav(16200, 810, "tone_tuple.wav");
  const std::string grid = (work_dir() / "tone_tuple.dcwt").string();
  CmdResult r = run_cli("analyze --in " + wav + " --out " + grid +
                        " --alpha 300 --channels 240 --decimation 12");
  CHECK(r.status == 0);
  wavephase::LoadedGrid loaded = wavephase::load_grid(grid);
  CHECK(loaded.grid.channels == 240);        // K wavelet rows
  CHECK(loaded.grid.lowpass.size() == 1350); // plus the lowpass row
}

TEST_CASE("evaluate logs per-signal failures and keeps going") {
  const fs::path corpus = work_dir() / "corpus_bad";
  fs::create_directories(corpus);
  const auto signals = wavephase::desk_corpus(4000, 4000.0);
  wavephase::write_wav((corpus / "good.wav").string(), signals[0].samples,
                       4000.0);
  std::ofstream(corpus / "broken.wav") << "not really a wav file";
  const std::string out = (work_dir() / "eval_bad.csv").string();
  CmdResult r = run_cli("evaluate --corpus " + corpus.string() + " --out " +
                        out + " --tuple 30,5,100 --max-iter 10");
  CHECK(r.status == 0);
  CHECK(r.output.find("broken") != std::string::npos);  // logged to stderr
  const auto lines = read_lines(out);
  CHECK(column(lines, "good,wpghi", 7).size() == 1);  // run continued
  CHECK(column(lines, "broken", 7).empty());
}

TEST_CASE("evaluate rejects an empty corpus directory") {
  const fs::path empty = work_dir() / "empty_corpus";
  fs::create_directories(empty);
  CmdResult r = run_cli("evaluate --corpus " + empty.string() + " --out " +
                        (work_dir() / "eval_empty.csv").string());
  CHECK(r.status != 0);
  CHECK(r.output.find("no .wav files") != std::string::npos);
}

TEST_CASE("the grid can be pinned via bins-per-octave and min-scale") {
  const std::string wav = make_tone_wav(4096, 200, "tone_bpo.wav");
  const std::string grid = (work_dir() / "tone_bpo.dcwt").string();
  // y_m = xi_b / f_max with f_max = 0.3 relative: xi_b(100) / (0.3 * 4096).
  CmdResult r = run_cli("analyze --in " + wav + " --out " + grid +
                        " --alpha 100 --channels 120 --decimation 8 "
                        "--bins-per-octave 24 --min-scale 0.0064114");
  CHECK(r.status == 0);
  wavephase::LoadedGrid loaded = wavephase::load_grid(grid);
  CHECK(loaded.grid.spec.bins_per_octave == 24.0);
  CHECK(loaded.grid.spec.min_scale == 0.0064114);

  CmdResult bad = run_cli("analyze --in " + wav + " --out " + grid +
                          " --bins-per-octave 24");
  CHECK(bad.status != 0);  // needs --min-scale as well
}

TEST_CASE("config file values are applied and overridden by flags") {
  const std::string wav = make_tone_wav(4096, 200, "tone_cfg.wav");
  const fs::path cfg = work_dir() / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "alpha=200\n";
    out << "channels=100\n";
    out << "decimation=8\n";
  }
  const std::string grid = (work_dir() / "tone_cfg.dcwt").string();
  CmdResult r = run_cli("analyze --config " + cfg.string() + " --in " + wav +
                        " --out " + grid + " --channels 120");
  CHECK(r.status == 0);
  wavephase::LoadedGrid loaded = wavephase::load_grid(grid);
  CHECK(loaded.params.alpha == 200.0);  // from the config file
  CHECK(loaded.grid.channels == 120);   // flag overrides the file
  CHECK(loaded.grid.spec.decimation == 8);
}
