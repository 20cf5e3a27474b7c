#include "mlwin/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "mlwin/error.hpp"
#include "mlwin/format.hpp"
#include "mlwin/mp_transform.hpp"

namespace mlwin {

namespace {

LatencyRow make_row(std::string name, const Window& w, const MpSettings& mp, bool applied) {
  const LatencyReport r = latency_report(w);
  const double unit = w.duration();
  return {std::move(name), w.size(), r.observation_time / unit, r.estimation_time / unit,
          r.intrinsic_latency / unit, mp, applied};
}

// Argmax ridge refined to the magnitude centroid of the two neighbours on
// each side, so that ridge curves are not quantized to whole bins.
std::vector<RidgePoint> refined_ridge(const RealTFR& T, double lo, double hi) {
  std::vector<RidgePoint> r = ridge_extract(T, lo, hi);
  const TfrAxes& ax = T.axes;
  for (std::size_t f = 0; f < r.size(); ++f) {
    if (!r[f].valid) continue;
    const auto k = static_cast<std::size_t>(std::llround(r[f].freq / ax.bin_hz));
    double num = 0.0, den = 0.0;
    for (std::size_t j = k >= 2 ? k - 2 : 0; j <= std::min(ax.bins - 1, k + 2); ++j) {
      num += T.at(f, j) * ax.bin_freq(j);
      den += T.at(f, j);
    }
    if (den > 0.0) r[f].freq = num / den;
  }
  return r;
}

}  // namespace

std::vector<LatencyRow> latency_table(std::size_t n, const MpSettings& mp, std::size_t g729_n) {
  std::vector<LatencyRow> rows;
  rows.push_back(make_row("symmetric (Hann)", make_cosine_window(coeffs::hann, n, 1.0), mp, false));
  rows.push_back(make_row("MP flat-top",
                          eps_mp_transform(make_cosine_window(coeffs::flat_top, n, 1.0),
                                           mp.epsilon, mp.oversample),
                          mp, true));
  const double two_term[] = {0.30, 0.70};
  rows.push_back(make_row("MP 2-term alpha=0.30",
                          eps_mp_transform(make_cosine_window(two_term, n, 1.0), mp.epsilon,
                                           mp.oversample),
                          mp, true));
  rows.push_back(make_row("ITU-T G.729", make_g729_window(g729_n, 1.0), mp, false));
  return rows;
}

SweepResult sweep_alpha(std::size_t n, double step, const MpSettings& mp) {
  if (!(step > 0.0 && step < 0.5)) throw Error(ErrorKind::invalid_spec, "step must lie in (0, 0.5)");
  SweepResult r;
  r.n = n;
  r.step = step;
  r.mp = mp;
  r.latency_min = std::numeric_limits<double>::infinity();
  const auto count = static_cast<std::size_t>(std::ceil(0.5 / step - 1e-9));
  for (std::size_t i = 1; i < count; ++i) {
    const double a = static_cast<double>(i) * step;
    SweepPoint p{a, std::nullopt};
    try {
      const double c[] = {a, 1.0 - a};
      const Window w = eps_mp_transform(make_cosine_window(c, n, 1.0), mp.epsilon, mp.oversample);
      p.latency = intrinsic_latency(w) / w.duration();
    } catch (const Error&) {
      // recorded as a gap
    }
    if (p.latency && *p.latency < r.latency_min) {
      r.latency_min = *p.latency;
      r.alpha_opt = a;
    }
    r.curve.push_back(p);
  }
  return r;
}

double ridge_lead(const std::vector<RidgePoint>& ref, const std::vector<RidgePoint>& lead,
                  double max_lag_seconds, double t_lo, double t_hi, std::size_t* used) {
  if (ref.size() != lead.size() || ref.size() < 3)
    throw Error(ErrorKind::shape, "ridge curves must share a frame grid");
  const double hop = ref[1].time - ref[0].time;
  const auto max_lag = static_cast<std::ptrdiff_t>(std::llround(max_lag_seconds / hop));
  const auto n = static_cast<std::ptrdiff_t>(ref.size());

  std::size_t in_window = 0, usable = 0;
  for (std::ptrdiff_t f = 0; f < n; ++f) {
    if (lead[f].time < t_lo || lead[f].time > t_hi) continue;
    ++in_window;
    if (lead[f].valid) ++usable;
  }
  if (in_window == 0 || usable < 0.8 * static_cast<double>(in_window) || usable < 3)
    throw Error(ErrorKind::unreliable, "ridge has gaps in more than 20% of the measured frames");

  std::vector<double> err(static_cast<std::size_t>(2 * max_lag + 1),
                          std::numeric_limits<double>::infinity());
  std::vector<std::size_t> counts(err.size(), 0);
  for (std::ptrdiff_t lag = -max_lag; lag <= max_lag; ++lag) {
    double s = 0.0;
    std::size_t c = 0;
    for (std::ptrdiff_t f = 0; f < n; ++f) {
      const std::ptrdiff_t g = f + lag;
      if (g < 0 || g >= n) continue;
      if (lead[f].time < t_lo || lead[f].time > t_hi) continue;
      if (!lead[f].valid || !ref[g].valid) continue;
      const double d = lead[f].freq - ref[g].freq;
      s += d * d;
      ++c;
    }
    const auto i = static_cast<std::size_t>(lag + max_lag);
    if (c >= usable / 2 && c > 0) {
      err[i] = s / static_cast<double>(c);
      counts[i] = c;
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(err.begin(), err.end()) - err.begin());
  if (!std::isfinite(err[best])) throw Error(ErrorKind::unreliable, "ridges never overlap");
  double frac = 0.0;
  if (best > 0 && best + 1 < err.size() && std::isfinite(err[best - 1]) &&
      std::isfinite(err[best + 1])) {
    const double a = err[best - 1], b = err[best], c = err[best + 1];
    const double den = a - 2.0 * b + c;
    if (den > 0.0) frac = 0.5 * (a - c) / den;
  }
  if (used) *used = counts[best];
  return (static_cast<double>(best) - static_cast<double>(max_lag) + frac) * hop;
}

ChirpShiftResult chirp_shift_experiment(const ChirpSettings& s) {
  ChirpShiftResult r;
  r.settings = s;
  const double tau = 1.0 / s.fs;
  const auto n = static_cast<std::size_t>(std::llround(s.window_seconds * s.fs));
  const Window h = make_cosine_window(coeffs::flat_top, n, tau);
  const Window hmp = eps_mp_transform(h, s.mp.epsilon, s.mp.oversample);
  r.predicted = intrinsic_latency(h) - intrinsic_latency(hmp);

  const std::vector<double> x = gen_imt(chirp_example(s.fs, s.duration));
  StftOptions opt;
  opt.hop = s.hop;
  opt.nfft = s.nfft;
  opt.stamp = FrameStamp::center;
  const Analysis a = analyze(x, s.fs, h, opt);
  const Analysis b = analyze(x, s.fs, hmp, opt);
  r.hop_seconds = a.V.axes.hop_s;

  // The ridge is traced over the whole spectrum and kept only where it sits
  // strictly inside the band, so frames whose energy lies elsewhere are gaps.
  const double bin = a.V.axes.bin_hz;
  auto banded = [&](const RealTFR& T) {
    std::vector<RidgePoint> ridge = refined_ridge(T, 0.0, 0.5 * s.fs);
    for (auto& p : ridge)
      if (p.valid && (p.freq <= s.band_lo + bin || p.freq >= s.band_hi - bin)) p.valid = false;
    return ridge;
  };
  const double t_lo = 0.2 * s.duration, t_hi = 0.8 * s.duration;

  r.sst_ridge_sym = banded(sst(a.V, a.fields));
  r.sst_ridge_mp = banded(sst(b.V, b.fields));
  r.rm_ridge_sym = banded(rm(a.V, a.fields));
  r.rm_ridge_mp = banded(rm(b.V, b.fields));
  const auto stft_sym = banded(magnitude(a.V));
  const auto stft_mp = banded(magnitude(b.V));

  // Measure where both ridges are inside the band.
  auto measure = [&](const std::vector<RidgePoint>& ref, const std::vector<RidgePoint>& lead,
                     std::size_t* used) {
    double lo = -std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* ridge : {&ref, &lead}) {
      double a0 = std::numeric_limits<double>::infinity(), a1 = -a0;
      for (const auto& p : *ridge)
        if (p.valid && p.time >= t_lo && p.time <= t_hi) {
          a0 = std::min(a0, p.time);
          a1 = std::max(a1, p.time);
        }
      lo = std::max(lo, a0);
      hi = std::min(hi, a1);
    }
    if (!(lo < hi)) throw Error(ErrorKind::unreliable, "no usable ridge inside the band");
    return ridge_lead(ref, lead, s.max_lag_seconds, lo, hi, used);
  };
  r.sst_shift = measure(r.sst_ridge_sym, r.sst_ridge_mp, &r.frames_used);
  r.rm_shift = measure(r.rm_ridge_sym, r.rm_ridge_mp, nullptr);
  r.stft_shift = measure(stft_sym, stft_mp, nullptr);
  return r;
}

std::vector<WindowFamily> benchmark_families() {
  return {
      {"blackman", {0.42, 0.50, 0.08}, false, false},
      {"flat-top", {0.28, 0.52, 0.20}, false, false},
      {"mp-flat-top", {0.28, 0.52, 0.20}, false, true},
      {"hamming", {0.54, 0.46}, false, false},
      {"alpha-0.30", {0.30, 0.70}, false, false},
      {"mp-alpha-0.30", {0.30, 0.70}, false, true},
      {"g729", {}, true, false},
  };
}

Window build_window(const WindowFamily& f, std::size_t n, double tau, const MpSettings& mp) {
  if (f.g729) {
    const std::size_t n6 = std::max<std::size_t>(6, 6 * static_cast<std::size_t>(std::llround(n / 6.0)));
    return make_g729_window(n6, tau);
  }
  const Window w = make_cosine_window(f.coefficients, n, tau);
  return f.mp ? eps_mp_transform(w, mp.epsilon, mp.oversample) : w;
}

namespace {

// Lag (in frames, parabolically refined) that best aligns b delayed onto a.
double xcorr_lag(const std::vector<double>& a, const std::vector<double>& b, std::size_t max_lag) {
  const auto n = static_cast<std::ptrdiff_t>(std::min(a.size(), b.size()));
  const auto m = static_cast<std::ptrdiff_t>(max_lag);
  std::vector<double> c(static_cast<std::size_t>(2 * m + 1), 0.0);
  for (std::ptrdiff_t lag = -m; lag <= m; ++lag) {
    double acc = 0.0;
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, lag); i < n && i - lag < n; ++i)
      acc += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i - lag)];
    c[static_cast<std::size_t>(lag + m)] = acc;
  }
  const auto best = static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
  double frac = 0.0;
  if (best > 0 && best + 1 < c.size()) {
    const double den = c[best - 1] - 2.0 * c[best] + c[best + 1];
    if (den < 0.0) frac = 0.5 * (c[best - 1] - c[best + 1]) / den;
  }
  return static_cast<double>(best) - static_cast<double>(m) + frac;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<BenchmarkRow> onset_benchmark(const std::vector<WindowFamily>& windows,
                                          std::uint64_t seed, const BenchmarkSettings& s) {
  NoteModel clean_model;
  NoteModel noisy_model;
  noisy_model.snr_db = s.noisy_snr_db;
  const OnsetCorpus clean = gen_onset_corpus(seed, s.n_events, s.fs, clean_model);
  const OnsetCorpus noisy = gen_onset_corpus(seed, s.n_events, s.fs, noisy_model);

  std::vector<BenchmarkRow> rows;
  for (const auto& fam : windows) {
    for (double ms : s.lengths_ms) {
      const auto n = std::max<std::size_t>(
          2, static_cast<std::size_t>(std::llround(ms * 1e-3 * s.fs)));
      const Window w = build_window(fam, n, 1.0 / s.fs, s.mp);
      for (OnsetFeature feat : s.features) {
        for (const OnsetCorpus* c : {&clean, &noisy}) {
          OnsetParams p;
          p.feature = feat;
          p.hop = s.hop;
          p.stamp = s.stamp;
          const OnsetResult res = detect_onsets(c->samples, c->fs, w, p);
          BenchmarkRow row;
          row.window = fam.name;
          row.feature = feat;
          row.corpus = c == &clean ? "clean" : "noisy";
          row.length_ms = ms;
          row.n = w.size();
          row.latency_ms = 1e3 * intrinsic_latency(w);
          row.eval = evaluate(res.onsets, c->onsets);
          row.mean_offset = mean_of(row.eval.offsets);
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

LatencyTransfer latency_transfer(const WindowFamily& symmetric, double length_ms,
                                 std::uint64_t seed, const BenchmarkSettings& s) {
  const OnsetCorpus c = gen_onset_corpus(seed, s.n_events, s.fs, NoteModel{});
  const auto n = static_cast<std::size_t>(std::llround(length_ms * 1e-3 * s.fs));
  WindowFamily sym = symmetric, mp = symmetric;
  sym.mp = false;
  mp.mp = true;
  const Window h = build_window(sym, n, 1.0 / s.fs, s.mp);
  const Window hmp = build_window(mp, n, 1.0 / s.fs, s.mp);
  OnsetParams p;
  p.hop = s.hop;
  p.stamp = FrameStamp::observation;
  const OnsetResult da = detect_onsets(c.samples, c.fs, h, p);
  const OnsetResult db = detect_onsets(c.samples, c.fs, hmp, p);
  const EvalReport a = evaluate(da.onsets, c.onsets);
  const EvalReport b = evaluate(db.onsets, c.onsets);
  LatencyTransfer r;
  r.offset_sym = mean_of(a.offsets);
  r.offset_mp = mean_of(b.offsets);
  r.predicted = intrinsic_latency(h) - intrinsic_latency(hmp);
  r.hop_seconds = static_cast<double>(s.hop) / s.fs;
  r.f_sym = a.f_score;
  r.f_mp = b.f_score;
  r.odf_shift = xcorr_lag(da.odf.values, db.odf.values, 64) * r.hop_seconds;
  return r;
}

const char* feature_tag(OnsetFeature f) { return f == OnsetFeature::stft ? "stft" : "sst"; }

void write_latency_table(std::ostream& out, const std::vector<LatencyRow>& rows) {
  out << "window,N,t_o_over_Ntau,t_e_over_Ntau,t_l_over_Ntau,mp,epsilon,oversample\n";
  for (const auto& r : rows)
    out << r.name << ',' << r.n << ',' << format_double(r.t_o) << ',' << format_double(r.t_e)
        << ',' << format_double(r.t_l) << ',' << (r.mp_applied ? "yes" : "no") << ','
        << format_double(r.mp.epsilon) << ',' << r.mp.oversample << '\n';
}

void write_sweep(std::ostream& out, const SweepResult& r) {
  out << "# N=" << r.n << " step=" << format_double(r.step) << " epsilon="
      << format_double(r.mp.epsilon) << " oversample=" << r.mp.oversample
      << " alpha_opt=" << format_double(r.alpha_opt)
      << " latency_min=" << format_double(r.latency_min) << '\n';
  out << "alpha0,t_l_over_Ntau\n";
  for (const auto& p : r.curve)
    out << format_double(p.alpha0) << ',' << (p.latency ? format_double(*p.latency) : "nan") << '\n';
}

void write_chirp(std::ostream& out, const ChirpShiftResult& r) {
  const auto& s = r.settings;
  out << "predicted_s,sst_shift_s,rm_shift_s,stft_shift_s,hop_s,frames_used,fs,window_s,hop,nfft,"
         "epsilon,oversample\n"
      << format_double(r.predicted) << ',' << format_double(r.sst_shift) << ','
      << format_double(r.rm_shift) << ',' << format_double(r.stft_shift) << ','
      << format_double(r.hop_seconds) << ',' << r.frames_used << ',' << format_double(s.fs)
      << ',' << format_double(s.window_seconds) << ',' << s.hop << ',' << s.nfft << ','
      << format_double(s.mp.epsilon) << ',' << s.mp.oversample << '\n';
}

void write_benchmark(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  out << "window,feature,corpus,length_ms,N,latency_ms,tp,fp,fn,precision,recall,f_score,"
         "mean_offset_s\n";
  for (const auto& r : rows)
    out << r.window << ',' << feature_tag(r.feature) << ',' << r.corpus << ','
        << format_double(r.length_ms) << ',' << r.n << ',' << format_double(r.latency_ms) << ','
        << r.eval.tp << ',' << r.eval.fp << ',' << r.eval.fn << ','
        << format_double(r.eval.precision) << ',' << format_double(r.eval.recall) << ','
        << format_double(r.eval.f_score) << ',' << format_double(r.mean_offset) << '\n';
}

}  // namespace mlwin
