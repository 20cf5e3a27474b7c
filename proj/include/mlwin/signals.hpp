#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mlwin {

using RealFn = std::function<double(double)>;

// One term A(t) cos(2 pi phi(t)). Derivatives are optional; missing ones are
// estimated by central differences on the check grid.
struct ImtComponent {
  RealFn amplitude;
  RealFn phase;
  RealFn amplitude_d;
  RealFn phase_d;
  RealFn phase_dd;
};

struct ModelParams {
  double epsilon = 1.0;
  double d = 0.0;
  double c1 = 0.0;
  double c2 = 1e300;
};

struct ImtSpec {
  std::vector<ImtComponent> components;  // in increasing IF order
  double fs = 0;
  double duration = 0;  // seconds; samples at t = i / fs, i < round(duration * fs)
  ModelParams params;
};

// Throws ErrorKind::model_violation naming the failed condition and the worst
// grid point.
void check_model(const ImtSpec& spec);
std::vector<double> gen_imt(const ImtSpec& spec);

// x(t) = cos(4 pi t + 30 cos(pi t / 15)), IF 2 - sin(pi t / 15).
ImtSpec chirp_example(double fs = 100.0, double duration = 30.0);
ImtSpec pure_tone(double freq, double fs, double duration, double amplitude = 1.0);

struct NoteModel {
  double min_gap = 0.25;    // seconds between onsets, >= 0.2
  double max_gap = 0.5;
  double lead = 0.3;        // silence before the first onset
  double tail = 0.5;        // after the last onset
  double f0_min = 220.0;
  double f0_max = 880.0;
  double amp_min = 1e-3;     // peak level -60..-54 dBFS; SF thresholds are absolute
  double amp_max = 2e-3;
  double decay_min = 0.02;  // exponential time constants, seconds
  double decay_max = 0.05;
  int harmonics = 6;
  double attack = 0.001;    // linear attack ramp, seconds
  std::optional<double> snr_db;  // white Gaussian noise when set
};

struct OnsetCorpus {
  std::vector<double> samples;
  std::vector<double> onsets;  // seconds, exact attack sample times
  double fs = 0;
};

OnsetCorpus gen_onset_corpus(std::uint64_t seed, std::size_t n_events, double fs,
                             const NoteModel& model = {});

// Annotation text: one onset time in seconds per line; '#' lines ignored.
std::vector<double> read_annotations(std::istream& in);
std::vector<double> load_annotations(const std::string& path);
void write_annotations(std::ostream& out, const std::vector<double>& onsets);
void save_annotations(const std::string& path, const std::vector<double>& onsets);

}  // namespace mlwin
