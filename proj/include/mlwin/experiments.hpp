#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mlwin/onset.hpp"
#include "mlwin/signals.hpp"
#include "mlwin/tfr.hpp"
#include "mlwin/window.hpp"

namespace mlwin {

struct MpSettings {
  double epsilon = 1e-8;
  std::size_t oversample = 32;
};

struct LatencyRow {
  std::string name;
  std::size_t n = 0;
  double t_o = 0, t_e = 0, t_l = 0;  // units of N tau
  MpSettings mp;
  bool mp_applied = false;
};

// Symmetric (Hann), MP flat-top, MP 2-term alpha = 0.30 and G.729 rows. The
// G.729 window is a fixed design and keeps its own length (240 in the codec;
// any multiple of 6 is accepted).
std::vector<LatencyRow> latency_table(std::size_t n = 65, const MpSettings& mp = {},
                                      std::size_t g729_n = 240);

struct SweepPoint {
  double alpha0 = 0;
  std::optional<double> latency;  // units of N tau; empty if the MP step failed
};

struct SweepResult {
  double alpha_opt = 0;
  double latency_min = 0;  // units of N tau
  std::vector<SweepPoint> curve;
  std::size_t n = 0;
  double step = 0;
  MpSettings mp;
};

// alpha0 over (0, 0.5) on a uniform grid; each point is [alpha0, 1 - alpha0]
// on the symmetric grid, MP-transformed.
SweepResult sweep_alpha(std::size_t n = 65, double step = 0.005, const MpSettings& mp = {});

struct ChirpSettings {
  double fs = 100.0;
  double duration = 30.0;
  double window_seconds = 5.0;
  std::size_t hop = 5;
  std::size_t nfft = 4096;
  double band_lo = 1.6;
  double band_hi = 2.4;
  double max_lag_seconds = 2.0;
  MpSettings mp;
};

struct ChirpShiftResult {
  double predicted = 0;     // t_l(h) - t_l(h_mp), seconds
  double sst_shift = 0;     // measured lead of the MP ridge, seconds
  double rm_shift = 0;
  double stft_shift = 0;
  double hop_seconds = 0;
  std::size_t frames_used = 0;
  std::vector<RidgePoint> sst_ridge_sym, sst_ridge_mp, rm_ridge_sym, rm_ridge_mp;
  ChirpSettings settings;
};

// Flat-top vs MP flat-top on the chirp example. Shifts are found by
// least-squares alignment of ridge curves over the frames whose ridge sits
// inside the band, restricted to the middle 60% of the record.
ChirpShiftResult chirp_shift_experiment(const ChirpSettings& s = {});

// Lead (seconds) that best aligns `lead` onto `ref`: lead(t) ~ ref(t + shift).
// Sub-hop resolution by parabolic refinement of the squared-error curve.
double ridge_lead(const std::vector<RidgePoint>& ref, const std::vector<RidgePoint>& lead,
                  double max_lag_seconds, double t_lo, double t_hi,
                  std::size_t* used = nullptr);

struct WindowFamily {
  std::string name;
  std::vector<double> coefficients;  // empty for g729
  bool g729 = false;
  bool mp = false;
};

std::vector<WindowFamily> benchmark_families();
Window build_window(const WindowFamily& f, std::size_t n, double tau, const MpSettings& mp = {});

struct BenchmarkSettings {
  double fs = 5512.5;
  std::size_t hop = 16;
  std::vector<double> lengths_ms = {5, 10, 15, 20, 30, 50, 75, 100};
  std::vector<OnsetFeature> features = {OnsetFeature::stft, OnsetFeature::sst};
  std::size_t n_events = 40;
  double noisy_snr_db = 20.0;
  FrameStamp stamp = FrameStamp::observation;
  MpSettings mp;
};

struct BenchmarkRow {
  std::string window;
  OnsetFeature feature = OnsetFeature::stft;
  std::string corpus;  // clean | noisy
  double length_ms = 0;
  std::size_t n = 0;
  double latency_ms = 0;
  EvalReport eval;
  double mean_offset = 0;  // seconds, detected - truth over matches
};

std::vector<BenchmarkRow> onset_benchmark(const std::vector<WindowFamily>& windows,
                                          std::uint64_t seed, const BenchmarkSettings& s = {});

struct LatencyTransfer {
  double offset_sym = 0;  // mean detected - truth, seconds
  double offset_mp = 0;
  double predicted = 0;   // t_l(h) - t_l(h_mp)
  double hop_seconds = 0;
  double f_sym = 0, f_mp = 0;
  double odf_shift = 0;   // lag of the symmetric ODF behind the MP one, seconds
};

// Observation-time stamping for both windows, clean corpus.
LatencyTransfer latency_transfer(const WindowFamily& symmetric, double length_ms,
                                 std::uint64_t seed, const BenchmarkSettings& s = {});

void write_latency_table(std::ostream& out, const std::vector<LatencyRow>& rows);
void write_sweep(std::ostream& out, const SweepResult& r);
void write_chirp(std::ostream& out, const ChirpShiftResult& r);
void write_benchmark(std::ostream& out, const std::vector<BenchmarkRow>& rows);

const char* feature_tag(OnsetFeature f);

}  // namespace mlwin
