#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mlwin/tfr.hpp"
#include "mlwin/window.hpp"

namespace mlwin {

struct Odf {
  std::vector<double> values;
  std::vector<double> frame_times;
  double p = 0.5;
  std::size_t mu = 3;
  std::size_t eta = 1;
};

// Power-scaled spectral flux with maximum filtering across +-eta bins,
// differenced mu frames apart. Frames n < mu are 0.
Odf spectral_flux(const RealTFR& X, double p = 0.5, std::size_t mu = 3, std::size_t eta = 1);

struct PeakParams {
  double delta = 0.15;
  double max_window = 0.030;   // seconds, trailing, includes the current frame
  double mean_window = 0.150;  // seconds, trailing, includes the current frame
  double combine = 0.030;      // seconds; no onset within this span after the previous one, 0 disables
};

// Strictly causal: the decision at frame n reads only frames <= n.
std::vector<double> pick_peaks(const Odf& odf, const PeakParams& params = {});
// Same decisions as frame indices.
std::vector<std::size_t> pick_peak_frames(const Odf& odf, const PeakParams& params = {});

struct EvalReport {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0, recall = 0, f_score = 0;
  double sigma = 0.05;
  std::vector<double> offsets;  // detected - truth for each match
};

// Greedy one-to-one matching in time order: each truth takes the nearest
// unmatched detection within +-sigma.
EvalReport evaluate(std::span<const double> detected, std::span<const double> truth,
                    double sigma = 0.05);

enum class OnsetFeature { stft, sst };

struct OnsetParams {
  OnsetFeature feature = OnsetFeature::stft;
  double p = 0.5;
  std::size_t mu = 3;
  std::size_t eta = 1;
  PeakParams peaks;
  // Widen the combine span to the window length plus the flux lag, so one
  // onset sweeping through the window is reported once.
  bool combine_over_window = true;
  std::size_t hop = 16;
  std::size_t nfft = 0;  // 0: auto, <= 10 Hz bins
  FrameStamp stamp = FrameStamp::observation;
};

struct OnsetResult {
  Odf odf;
  std::vector<double> onsets;
};

// Full pipeline. Magnitudes are divided by sum |h| so the ODF scale (and the
// meaning of delta) does not depend on the window length, and the SST mask
// threshold is fixed at 1e-6 on that scale; both keep the pipeline causal.
OnsetResult detect_onsets(std::span<const double> signal, double fs, const Window& w,
                          const OnsetParams& params = {});

void write_odf_csv(std::ostream& out, const Odf& odf);
void write_onsets_csv(std::ostream& out, std::span<const double> onsets);
void write_eval(std::ostream& out, const EvalReport& r);

}  // namespace mlwin
