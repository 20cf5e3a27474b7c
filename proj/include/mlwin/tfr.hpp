#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlwin/fft.hpp"
#include "mlwin/window.hpp"

namespace mlwin {

// Where a frame's time stamp sits inside its window. Times are sample-point
// times: frame f starts at sample f * hop and uses samples start .. start+N-1.
enum class FrameStamp { center, observation, estimation };

struct TfrAxes {
  std::size_t frames = 0;
  std::size_t bins = 0;       // nfft / 2 + 1
  std::size_t nfft = 0;
  std::size_t hop = 0;        // samples
  std::size_t window_size = 0;
  double fs = 0;
  double hop_s = 0;
  double bin_hz = 0;
  double t0 = 0;              // time of frame 0, seconds
  FrameStamp stamp = FrameStamp::center;

  double frame_time(std::size_t f) const { return t0 + hop_s * static_cast<double>(f); }
  double bin_freq(std::size_t k) const { return bin_hz * static_cast<double>(k); }
  std::vector<double> frame_times() const;
  std::vector<double> bin_freqs() const;
};

struct ComplexTFR {
  TfrAxes axes;
  std::vector<cplx> values;  // frames x bins, row-major
  cplx at(std::size_t f, std::size_t k) const { return values[f * axes.bins + k]; }
};

struct RealTFR {
  TfrAxes axes;
  std::vector<double> values;
  std::size_t dropped = 0;  // masked cells whose target fell outside the grid
  double at(std::size_t f, std::size_t k) const { return values[f * axes.bins + k]; }
  double& at(std::size_t f, std::size_t k) { return values[f * axes.bins + k]; }
};

inline constexpr double unassigned = -std::numeric_limits<double>::infinity();

struct ReassignmentFields {
  TfrAxes axes;
  std::vector<double> omega_hat;  // Hz; `unassigned` outside the mask
  std::vector<double> omega_raw;  // -Im(V_Dh / V_h), rad/s as written in the model
  std::vector<double> gamma;      // seconds from the frame stamp
  std::vector<unsigned char> mask;
  double theta = 0;
  std::size_t masked_count() const;
};

struct StftOptions {
  std::size_t hop = 1;
  std::size_t nfft = 0;  // 0: smallest power of two >= N with bin spacing <= max_bin_hz
  double max_bin_hz = 10.0;
  FrameStamp stamp = FrameStamp::center;
  std::optional<double> theta;  // default 1e-6 * RMS of the signal
};

// Smallest power of two >= n_min whose bin spacing fs / nfft is <= max_bin_hz.
std::size_t auto_nfft(double fs, std::size_t n_min, double max_bin_hz = 10.0);

ComplexTFR stft(std::span<const double> signal, double fs, const Window& w,
                const StftOptions& opt);

struct Analysis {
  ComplexTFR V;
  ReassignmentFields fields;
};

// STFT plus reassignment fields from the Dh and Th companions of w.
Analysis analyze(std::span<const double> signal, double fs, const Window& w,
                 const StftOptions& opt);

ReassignmentFields reassignment_fields(std::span<const double> signal, double fs,
                                       const Window& w, const StftOptions& opt);

double default_theta(std::span<const double> signal);

// A rejection rule built from a taper's own reassignment fields. A cell is
// kept iff |omega_hat - eta| (in TFR bins) lies inside [band_lo, band_hi].
struct RejectionRule {
  ReassignmentFields fields;
  double delta = 0;  // bins
  double band_lo = 0;
  double band_hi = 0;
  bool accepts(std::size_t cell, double eta_hz, double bin_hz) const;
};

enum class RuleShape {
  main_lobe,  // |dev| <= delta
  offset,     // ||dev| - delta| <= delta / 2, for the derivative taper
};

// Quarter of the main-lobe width of w (first-null to first-null), expressed
// in bins of an nfft-point TFR.
double auto_delta_bins(const Window& w, std::size_t nfft);

RejectionRule make_rejection_rule(std::span<const double> signal, double fs,
                                  const Window& taper, const StftOptions& opt,
                                  RuleShape shape, double delta_bins);

RealTFR sst(const ComplexTFR& V, const ReassignmentFields& fields,
            std::span<const RejectionRule> rules = {});
RealTFR rm(const ComplexTFR& V, const ReassignmentFields& fields);
RealTFR magnitude(const ComplexTFR& V);

struct RidgePoint {
  double time;
  double freq;  // NaN when the band is all zero in this frame
  bool valid;
};

std::vector<RidgePoint> ridge_extract(const RealTFR& T, double lo_hz, double hi_hz);

// Binary export: little-endian float32, row-major, plus a "<path>.hdr" text
// sidecar with the axes.
void save_tfr(const std::string& path, const RealTFR& T);
RealTFR load_tfr(const std::string& path);
void write_tfr_csv(std::ostream& out, const RealTFR& T);
void write_ridge_csv(std::ostream& out, std::span<const RidgePoint> ridge);

std::string stamp_tag(FrameStamp s);
std::optional<FrameStamp> stamp_from_tag(const std::string& s);

}  // namespace mlwin
