#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "mlwin/mp_transform.hpp"
#include "mlwin/onset.hpp"
#include "mlwin/signals.hpp"
#include "mlwin/window.hpp"

using namespace mlwin;

namespace {

RealTFR grid(std::size_t frames, std::size_t bins, double hop_s = 0.005) {
  RealTFR T;
  T.axes.frames = frames;
  T.axes.bins = bins;
  T.axes.nfft = 2 * (bins - 1);
  T.axes.hop_s = hop_s;
  T.axes.bin_hz = 1.0;
  T.values.assign(frames * bins, 0.0);
  return T;
}

Odf series(std::vector<double> v, double hop_s = 0.005) {
  Odf o;
  o.values = std::move(v);
  for (std::size_t i = 0; i < o.values.size(); ++i) o.frame_times.push_back(hop_s * i);
  return o;
}

PeakParams literal() {
  PeakParams p;
  p.combine = 0.0;
  return p;
}

}  // namespace

TEST_CASE("spectral flux: silence") {
  for (double v : spectral_flux(grid(20, 9)).values) CHECK(v == 0.0);
}

TEST_CASE("spectral flux: single-bin step") {
  auto T = grid(12, 5);
  const std::size_t n0 = 5;
  const double a = 4.0;
  for (std::size_t f = n0; f < 12; ++f) T.at(f, 2) = a;
  const auto odf = spectral_flux(T, 0.5, 3, 0);
  for (std::size_t n = 0; n < 12; ++n) {
    const double expect = n >= n0 && n < n0 + 3 ? std::sqrt(a) : 0.0;
    CHECK(odf.values[n] == doctest::Approx(expect));
  }
}

TEST_CASE("spectral flux: max filter across neighbouring bins") {
  auto T = grid(8, 6);
  for (std::size_t f = 0; f < 4; ++f) T.at(f, 2) = 1.0;
  for (std::size_t f = 4; f < 8; ++f) T.at(f, 3) = 1.0;  // the partial moves one bin up
  CHECK(spectral_flux(T, 0.5, 1, 1).values[4] == 0.0);
  CHECK(spectral_flux(T, 0.5, 1, 0).values[4] == doctest::Approx(1.0));
}

TEST_CASE("spectral flux: decaying spectrum gives zero") {
  auto T = grid(30, 10);
  for (std::size_t f = 0; f < 30; ++f)
    for (std::size_t k = 0; k < 10; ++k) T.at(f, k) = std::exp(-0.1 * f) * (1.0 + k);
  for (std::size_t n = 0; n < 30; ++n) CHECK(spectral_flux(T).values[n] == 0.0);
}

TEST_CASE("spectral flux: scale covariance") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto T = grid(60, 16);
  for (auto& v : T.values) v = u(rng);
  for (double p : {0.5, 1.0, 2.0}) {
    const auto base = spectral_flux(T, p);
    for (double c : {0.01, 3.0, 1e4}) {
      auto S = T;
      for (auto& v : S.values) v *= c;
      const auto scaled = spectral_flux(S, p);
      for (std::size_t n = 0; n < base.values.size(); ++n)
        CHECK(scaled.values[n] == doctest::Approx(std::pow(c, p) * base.values[n]).epsilon(1e-10));
      PeakParams pp;
      pp.delta = 0.0;
      CHECK(pick_peak_frames(scaled, pp) == pick_peak_frames(base, pp));
    }
  }
}

TEST_CASE("peaks: isolated peak and sub-threshold values") {
  std::vector<double> v(100, 0.0);
  v[40] = 1.0;
  CHECK(pick_peak_frames(series(v), literal()) == std::vector<std::size_t>{40});
  std::vector<double> low(100, 0.0);
  for (std::size_t i = 10; i < 100; i += 17) low[i] = 0.1;
  CHECK(pick_peak_frames(series(low), literal()).empty());
}

TEST_CASE("peaks: two peaks 15 ms apart") {
  // 5 ms frames: the 30 ms max window spans frames n-6..n.
  std::vector<double> rising(10, 0.0), falling(10, 0.0);
  rising[2] = 1.0;
  rising[5] = 2.0;
  falling[2] = 2.0;
  falling[5] = 1.0;
  // Frame 2: max of {0,0,1}, mean 1/3, 1 >= 0.483. Frame 5: max of frames 0..5, mean 0.5.
  CHECK(pick_peak_frames(series(rising), literal()) == std::vector<std::size_t>{2, 5});
  // Frame 5 is not the trailing max (frame 2 is larger and within 30 ms).
  CHECK(pick_peak_frames(series(falling), literal()) == std::vector<std::size_t>{2});
  // Default inter-onset rule keeps only the first.
  CHECK(pick_peak_frames(series(rising)) == std::vector<std::size_t>{2});
}

TEST_CASE("evaluate: count arithmetic") {
  const std::vector<double> truth = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5};
  CHECK(evaluate(truth, truth).f_score == 1.0);
  auto det = truth;
  det.push_back(5.5);
  const auto r = evaluate(det, truth);
  CHECK(r.tp == 9);
  CHECK(r.fp == 1);
  CHECK(r.precision == doctest::Approx(0.9));
  CHECK(r.recall == 1.0);
  CHECK(r.f_score == doctest::Approx(2 * 0.9 / 1.9));
  const auto off = evaluate(std::vector<double>{1.06}, std::vector<double>{1.0});
  CHECK(off.tp == 0);
  CHECK(off.fp == 1);
  CHECK(off.fn == 1);
  CHECK(off.f_score == 0.0);
  CHECK(evaluate(std::vector<double>{}, std::vector<double>{}).f_score == 0.0);
}

TEST_CASE("evaluate: one detection serves one truth") {
  const auto r = evaluate(std::vector<double>{1.0}, std::vector<double>{0.98, 1.01});
  CHECK(r.tp == 1);
  CHECK(r.fn == 1);
  REQUIRE(r.offsets.size() == 1);
  // Greedy in time order: the earlier truth takes the detection.
  CHECK(r.offsets[0] == doctest::Approx(0.02));
}

TEST_CASE("detect_onsets: causal under truncation") {
  const auto c = gen_onset_corpus(2, 8, 5512.5);
  const Window h = make_cosine_window(coeffs::flat_top, 165, 1.0 / 5512.5);
  for (const Window& w : {h, eps_mp_transform(h)}) {
    for (auto feat : {OnsetFeature::stft, OnsetFeature::sst}) {
      OnsetParams p;
      p.feature = feat;
      const auto full = detect_onsets(c.samples, c.fs, w, p);
      for (std::size_t cut : {4000u, 9001u, 15000u}) {
        const std::vector<double> part(c.samples.begin(), c.samples.begin() + cut);
        const auto r = detect_onsets(part, c.fs, w, p);
        REQUIRE(r.odf.values.size() <= full.odf.values.size());
        for (std::size_t n = 0; n < r.odf.values.size(); ++n)
          CHECK(r.odf.values[n] == full.odf.values[n]);
        for (std::size_t i = 0; i < r.onsets.size(); ++i) CHECK(r.onsets[i] == full.onsets[i]);
        const double last = r.odf.frame_times.empty() ? -1.0 : r.odf.frame_times.back();
        std::size_t expect = 0;
        for (double t : full.onsets) expect += t <= last;
        CHECK(r.onsets.size() == expect);
      }
    }
  }
}

TEST_CASE("detect_onsets: deterministic and finds clean onsets") {
  const auto c = gen_onset_corpus(4, 20, 5512.5);
  const Window w = make_cosine_window(coeffs::hann, 165, 1.0 / 5512.5);
  const auto a = detect_onsets(c.samples, c.fs, w);
  const auto b = detect_onsets(c.samples, c.fs, w);
  CHECK(a.onsets == b.onsets);
  CHECK(a.odf.values == b.odf.values);
  CHECK(evaluate(a.onsets, c.onsets).f_score == 1.0);
  for (double v : a.odf.values) CHECK(v >= 0.0);
}

TEST_CASE("csv writers") {
  std::ostringstream o;
  write_onsets_csv(o, std::vector<double>{0.5, 1.0});
  CHECK(o.str().find("0.5") != std::string::npos);
  std::ostringstream e;
  write_eval(e, evaluate(std::vector<double>{1.0}, std::vector<double>{1.0}));
  CHECK(e.str().find("f_score") != std::string::npos);
}
