#include "mlwin/onset.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mlwin/error.hpp"
#include "mlwin/format.hpp"

namespace mlwin {

namespace {

std::size_t frames_for(double seconds, const std::vector<double>& times) {
  if (times.size() < 2) return 0;
  const double hop = times[1] - times[0];
  return static_cast<std::size_t>(std::llround(seconds / hop));
}

}  // namespace

Odf spectral_flux(const RealTFR& X, double p, std::size_t mu, std::size_t eta) {
  if (mu < 1) throw Error(ErrorKind::invalid_spec, "mu must be at least 1");
  if (!(p > 0.0)) throw Error(ErrorKind::invalid_spec, "p must be positive");
  const TfrAxes& ax = X.axes;
  if (X.values.size() != ax.frames * ax.bins)
    throw Error(ErrorKind::shape, "TFR values do not match its axes");

  Odf odf;
  odf.p = p;
  odf.mu = mu;
  odf.eta = eta;
  odf.frame_times = ax.frame_times();
  odf.values.assign(ax.frames, 0.0);

  std::vector<double> powed(X.values.size());
  for (std::size_t i = 0; i < powed.size(); ++i)
    powed[i] = p == 0.5 ? std::sqrt(X.values[i]) : std::pow(X.values[i], p);

  for (std::size_t n = mu; n < ax.frames; ++n) {
    const double* cur = powed.data() + n * ax.bins;
    const double* ref = powed.data() + (n - mu) * ax.bins;
    double sf = 0.0;
    for (std::size_t k = 0; k < ax.bins; ++k) {
      const std::size_t lo = k >= eta ? k - eta : 0;
      const std::size_t hi = std::min(ax.bins - 1, k + eta);
      double m = ref[lo];
      for (std::size_t j = lo + 1; j <= hi; ++j) m = std::max(m, ref[j]);
      const double d = cur[k] - m;
      if (d > 0.0) sf += d;
    }
    odf.values[n] = sf;
  }
  return odf;
}

std::vector<std::size_t> pick_peak_frames(const Odf& odf, const PeakParams& params) {
  const std::size_t wmax = frames_for(params.max_window, odf.frame_times);
  const std::size_t wmean = frames_for(params.mean_window, odf.frame_times);
  const std::size_t wcomb = frames_for(params.combine, odf.frame_times);
  const auto& sf = odf.values;
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < sf.size(); ++n) {
    const std::size_t lo_max = n >= wmax ? n - wmax : 0;
    bool is_max = true;
    for (std::size_t m = lo_max; m < n && is_max; ++m)
      if (sf[m] > sf[n]) is_max = false;
    if (!is_max) continue;
    const std::size_t count = std::min(n, wmean) + 1;
    double mean = 0.0;
    for (std::size_t m = n + 1 - count; m <= n; ++m) mean += sf[m];
    mean /= static_cast<double>(count);
    if (sf[n] < mean + params.delta) continue;
    if (wcomb > 0 && !out.empty() && n - out.back() <= wcomb) continue;
    out.push_back(n);
  }
  return out;
}

std::vector<double> pick_peaks(const Odf& odf, const PeakParams& params) {
  std::vector<double> t;
  for (std::size_t n : pick_peak_frames(odf, params)) t.push_back(odf.frame_times[n]);
  return t;
}

EvalReport evaluate(std::span<const double> detected, std::span<const double> truth,
                    double sigma) {
  EvalReport r;
  r.sigma = sigma;
  std::vector<bool> used(detected.size(), false);
  std::size_t start = 0;
  for (double t : truth) {
    while (start < detected.size() && detected[start] < t - sigma) ++start;
    std::size_t best = detected.size();
    double best_d = 0.0;
    for (std::size_t i = start; i < detected.size() && detected[i] <= t + sigma; ++i) {
      if (used[i]) continue;
      const double d = std::abs(detected[i] - t);
      if (best == detected.size() || d < best_d) {
        best = i;
        best_d = d;
      }
    }
    if (best < detected.size()) {
      used[best] = true;
      ++r.tp;
      r.offsets.push_back(detected[best] - t);
    } else {
      ++r.fn;
    }
  }
  r.fp = detected.size() - r.tp;
  const auto tp = static_cast<double>(r.tp);
  r.precision = detected.empty() ? 0.0 : tp / static_cast<double>(detected.size());
  r.recall = truth.empty() ? 0.0 : tp / static_cast<double>(truth.size());
  r.f_score = r.precision + r.recall > 0.0
                  ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                  : 0.0;
  return r;
}

OnsetResult detect_onsets(std::span<const double> signal, double fs, const Window& w,
                          const OnsetParams& params) {
  double hsum = 0.0;
  for (double v : w.taps()) hsum += std::abs(v);
  StftOptions opt;
  opt.hop = params.hop;
  opt.nfft = params.nfft;
  opt.stamp = params.stamp;
  opt.theta = 1e-6 * hsum;

  RealTFR X;
  if (params.feature == OnsetFeature::stft) {
    X = magnitude(stft(signal, fs, w, opt));
  } else {
    const Analysis a = analyze(signal, fs, w, opt);
    X = sst(a.V, a.fields);
  }
  for (double& v : X.values) v /= hsum;

  OnsetResult out;
  out.odf = spectral_flux(X, params.p, params.mu, params.eta);
  PeakParams peaks = params.peaks;
  if (params.combine_over_window)
    peaks.combine = std::max(peaks.combine,
                             static_cast<double>(w.size() + params.mu * params.hop) / fs);
  out.onsets = pick_peaks(out.odf, peaks);
  return out;
}

void write_odf_csv(std::ostream& out, const Odf& odf) {
  out << "time,value\n";
  for (std::size_t i = 0; i < odf.values.size(); ++i)
    out << format_double(odf.frame_times[i]) << ',' << format_double(odf.values[i]) << '\n';
}

void write_onsets_csv(std::ostream& out, std::span<const double> onsets) {
  out << "time\n";
  for (double t : onsets) out << format_double(t) << '\n';
}

void write_eval(std::ostream& out, const EvalReport& r) {
  out << "tp,fp,fn,precision,recall,f_score,sigma\n"
      << r.tp << ',' << r.fp << ',' << r.fn << ',' << format_double(r.precision) << ','
      << format_double(r.recall) << ',' << format_double(r.f_score) << ','
      << format_double(r.sigma) << '\n';
}

}  // namespace mlwin
