#include "mlwin/tfr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "mlwin/error.hpp"

namespace mlwin {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double mag(const cplx& v) { return std::sqrt(std::norm(v)); }

double stamp_offset(const Window& w, FrameStamp stamp) {
  const auto h = w.taps();
  switch (stamp) {
    case FrameStamp::center: return 0.5 * static_cast<double>(h.size() - 1);
    case FrameStamp::observation: return static_cast<double>(h.size() - 1);
    case FrameStamp::estimation: {
      double num = 0.0;
      for (std::size_t n = 0; n < h.size(); ++n) num += static_cast<double>(n) * h[n] * h[n];
      return num / w.energy();
    }
  }
  return 0.0;
}

TfrAxes make_axes(std::size_t len, double fs, const Window& w, const StftOptions& opt) {
  if (len == 0) throw Error(ErrorKind::size, "signal is empty");
  if (!(fs > 0.0)) throw Error(ErrorKind::invalid_spec, "sampling rate must be positive");
  if (opt.hop < 1) throw Error(ErrorKind::invalid_spec, "hop must be at least 1 sample");
  const std::size_t n = w.size();
  if (len < n) throw Error(ErrorKind::size, "signal is shorter than the window");
  TfrAxes a;
  a.nfft = opt.nfft ? opt.nfft : auto_nfft(fs, n, opt.max_bin_hz);
  if (a.nfft < n) throw Error(ErrorKind::invalid_spec, "nfft must be at least the window length");
  a.frames = (len - n) / opt.hop + 1;
  a.bins = a.nfft / 2 + 1;
  a.hop = opt.hop;
  a.window_size = n;
  a.fs = fs;
  a.hop_s = static_cast<double>(opt.hop) / fs;
  a.bin_hz = fs / static_cast<double>(a.nfft);
  a.stamp = opt.stamp;
  a.t0 = stamp_offset(w, opt.stamp) / fs;
  return a;
}

// Runs body(begin, end) over [0, count) on a few threads when the job is big.
template <class F>
void parallel_frames(std::size_t count, std::size_t cost_per_item, F body) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads = std::min<std::size_t>(
      {hw, 8, std::max<std::size_t>(1, count * cost_per_item / 200000)});
  if (threads <= 1 || count < 2 * threads) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t b = t * chunk, e = std::min(count, b + chunk);
    if (b < e) pool.emplace_back(body, b, e);
  }
  for (auto& th : pool) th.join();
}

// Windowed DFTs of one frame for a set of tapers, with the absolute-time
// phase factor applied.
struct FrameKernel {
  const TfrAxes& axes;
  std::span<const double> signal;
  std::vector<std::span<const double>> tapers;

  void run(std::size_t begin, std::size_t end,
           const std::vector<std::vector<cplx>*>& outs) const {
    Fft fft(axes.nfft);
    std::vector<cplx> twiddle(axes.nfft);
    for (std::size_t j = 0; j < axes.nfft; ++j) {
      const double ph = -two_pi * static_cast<double>(j) / static_cast<double>(axes.nfft);
      twiddle[j] = {std::cos(ph), std::sin(ph)};
    }
    // Two real tapers share one complex transform: x*a + i*x*b.
    const std::size_t nfft = axes.nfft;
    std::vector<cplx> buf(nfft), spec(nfft);
    for (std::size_t f = begin; f < end; ++f) {
      const std::size_t start = f * axes.hop;
      for (std::size_t t = 0; t < tapers.size(); t += 2) {
        const bool pair = t + 1 < tapers.size();
        std::fill(buf.begin(), buf.end(), cplx{});
        for (std::size_t n = 0; n < axes.window_size; ++n) {
          const double x = signal[start + n];
          buf[n] = {x * tapers[t][n], pair ? x * tapers[t + 1][n] : 0.0};
        }
        fft.forward(buf, spec);
        cplx* a = outs[t]->data() + f * axes.bins;
        cplx* b = pair ? outs[t + 1]->data() + f * axes.bins : nullptr;
        for (std::size_t k = 0; k < axes.bins; ++k) {
          const cplx rot = twiddle[(k * start) % nfft];
          if (!pair) {
            a[k] = spec[k] * rot;
            continue;
          }
          const cplx zk = spec[k], zm = std::conj(spec[(nfft - k) % nfft]);
          a[k] = 0.5 * (zk + zm) * rot;
          b[k] = cplx{0.0, -0.5} * (zk - zm) * rot;
        }
      }
    }
  }
};

}  // namespace

std::vector<double> TfrAxes::frame_times() const {
  std::vector<double> t(frames);
  for (std::size_t f = 0; f < frames; ++f) t[f] = frame_time(f);
  return t;
}

std::vector<double> TfrAxes::bin_freqs() const {
  std::vector<double> v(bins);
  for (std::size_t k = 0; k < bins; ++k) v[k] = bin_freq(k);
  return v;
}

std::size_t ReassignmentFields::masked_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

std::size_t auto_nfft(double fs, std::size_t n_min, double max_bin_hz) {
  if (!(max_bin_hz > 0.0)) throw Error(ErrorKind::invalid_spec, "bin spacing must be positive");
  std::size_t n = next_pow2(std::max<std::size_t>(n_min, 1));
  while (fs / static_cast<double>(n) > max_bin_hz) n *= 2;
  return n;
}

double default_theta(std::span<const double> signal) {
  if (signal.empty()) return 0.0;
  double s = 0.0;
  for (double v : signal) s += v * v;
  return 1e-6 * std::sqrt(s / static_cast<double>(signal.size()));
}

ComplexTFR stft(std::span<const double> signal, double fs, const Window& w,
                const StftOptions& opt) {
  ComplexTFR V;
  V.axes = make_axes(signal.size(), fs, w, opt);
  V.values.assign(V.axes.frames * V.axes.bins, cplx{});
  FrameKernel kernel{V.axes, signal, {w.taps()}};
  parallel_frames(V.axes.frames, V.axes.nfft, [&](std::size_t b, std::size_t e) {
    kernel.run(b, e, {&V.values});
  });
  return V;
}

Analysis analyze(std::span<const double> signal, double fs, const Window& w,
                 const StftOptions& opt) {
  Analysis out;
  ComplexTFR& V = out.V;
  V.axes = make_axes(signal.size(), fs, w, opt);
  const TfrAxes& ax = V.axes;
  const std::size_t cells = ax.frames * ax.bins;

  const std::vector<double> dh = time_derivative(w);
  const double origin = stamp_offset(w, opt.stamp);
  std::vector<double> th(w.size());
  for (std::size_t n = 0; n < w.size(); ++n)
    th[n] = (static_cast<double>(n) - origin) / fs * w.taps()[n];

  std::vector<cplx> vd(cells), vt(cells);
  V.values.assign(cells, cplx{});
  FrameKernel kernel{ax, signal, {w.taps(), dh, th}};
  parallel_frames(ax.frames, 3 * ax.nfft, [&](std::size_t b, std::size_t e) {
    kernel.run(b, e, {&V.values, &vd, &vt});
  });

  ReassignmentFields& R = out.fields;
  R.axes = ax;
  R.theta = opt.theta ? *opt.theta : default_theta(signal);
  R.omega_hat.assign(cells, unassigned);
  R.omega_raw.assign(cells, unassigned);
  R.gamma.assign(cells, unassigned);
  R.mask.assign(cells, 0);
  for (std::size_t f = 0; f < ax.frames; ++f) {
    for (std::size_t k = 0; k < ax.bins; ++k) {
      const std::size_t i = f * ax.bins + k;
      const cplx v = V.values[i];
      if (!(mag(v) > R.theta)) continue;
      const double nv = std::norm(v);
      const double raw = -(vd[i] * std::conj(v)).imag() / nv;
      R.mask[i] = 1;
      R.omega_raw[i] = raw;
      R.omega_hat[i] = ax.bin_freq(k) + raw / two_pi;
      R.gamma[i] = (vt[i] * std::conj(v)).real() / nv;
    }
  }
  return out;
}

ReassignmentFields reassignment_fields(std::span<const double> signal, double fs,
                                       const Window& w, const StftOptions& opt) {
  return analyze(signal, fs, w, opt).fields;
}

bool RejectionRule::accepts(std::size_t cell, double eta_hz, double bin_hz) const {
  if (!fields.mask[cell]) return false;
  const double dev = std::abs(fields.omega_hat[cell] - eta_hz) / bin_hz;
  return dev >= band_lo && dev <= band_hi;
}

double auto_delta_bins(const Window& w, std::size_t nfft) {
  const std::size_t m = next_pow2(64 * w.size());
  Fft fft(m);
  const auto spec = fft.forward_real(w.taps());
  // Flat-top lobes ripple near DC, so look for the null only past the half-height point.
  const double half = 0.5 * std::abs(spec[0]);
  std::size_t k = 0;
  while (k + 1 < m / 2 && std::abs(spec[k]) > half) ++k;
  while (k + 1 < m / 2 && std::abs(spec[k + 1]) <= std::abs(spec[k])) ++k;
  if (k == 0 || k + 1 >= m / 2) throw Error(ErrorKind::degenerate, "window spectrum has no main lobe");
  // First null at k/m cycles per sample; a quarter of the full lobe is half of that.
  return 0.5 * static_cast<double>(k) / static_cast<double>(m) * static_cast<double>(nfft);
}

RejectionRule make_rejection_rule(std::span<const double> signal, double fs,
                                  const Window& taper, const StftOptions& opt,
                                  RuleShape shape, double delta_bins) {
  if (!(delta_bins > 0.0)) throw Error(ErrorKind::invalid_spec, "delta must be positive");
  RejectionRule r;
  r.fields = reassignment_fields(signal, fs, taper, opt);
  r.delta = delta_bins;
  if (shape == RuleShape::main_lobe) {
    r.band_lo = 0.0;
    r.band_hi = delta_bins;
  } else {
    r.band_lo = 0.5 * delta_bins;
    r.band_hi = 1.5 * delta_bins;
  }
  return r;
}

RealTFR magnitude(const ComplexTFR& V) {
  RealTFR T;
  T.axes = V.axes;
  T.values.resize(V.values.size());
  std::transform(V.values.begin(), V.values.end(), T.values.begin(),
                 [](const cplx& v) { return mag(v); });
  return T;
}

RealTFR sst(const ComplexTFR& V, const ReassignmentFields& fields,
            std::span<const RejectionRule> rules) {
  const TfrAxes& ax = V.axes;
  if (fields.omega_hat.size() != V.values.size() || fields.axes.bins != ax.bins)
    throw Error(ErrorKind::shape, "reassignment fields do not match the TFR");
  for (const auto& r : rules)
    if (r.fields.omega_hat.size() != V.values.size())
      throw Error(ErrorKind::shape, "rejection rule grid does not match the TFR");

  RealTFR T;
  T.axes = ax;
  T.values.assign(V.values.size(), 0.0);
  std::vector<std::size_t> dropped(ax.frames, 0);
  // Each frame only writes its own row, so frames can run independently.
  parallel_frames(ax.frames, ax.bins, [&](std::size_t b, std::size_t e) {
    for (std::size_t f = b; f < e; ++f) {
      for (std::size_t k = 0; k < ax.bins; ++k) {
        const std::size_t i = f * ax.bins + k;
        if (!fields.mask[i]) continue;
        const double eta = ax.bin_freq(k);
        bool keep = true;
        for (const auto& r : rules)
          if (!r.accepts(i, eta, ax.bin_hz)) { keep = false; break; }
        if (!keep) continue;
        const double j = std::round(fields.omega_hat[i] / ax.bin_hz);
        if (!(j >= 0.0 && j < static_cast<double>(ax.bins))) {
          ++dropped[f];
          continue;
        }
        T.values[f * ax.bins + static_cast<std::size_t>(j)] += mag(V.values[i]);
      }
    }
  });
  for (auto d : dropped) T.dropped += d;
  return T;
}

RealTFR rm(const ComplexTFR& V, const ReassignmentFields& fields) {
  const TfrAxes& ax = V.axes;
  if (fields.omega_hat.size() != V.values.size() || fields.axes.bins != ax.bins)
    throw Error(ErrorKind::shape, "reassignment fields do not match the TFR");
  RealTFR T;
  T.axes = ax;
  T.values.assign(V.values.size(), 0.0);
  for (std::size_t f = 0; f < ax.frames; ++f) {
    for (std::size_t k = 0; k < ax.bins; ++k) {
      const std::size_t i = f * ax.bins + k;
      if (!fields.mask[i]) continue;
      const double j = std::round(fields.omega_hat[i] / ax.bin_hz);
      const double g = std::round(static_cast<double>(f) + fields.gamma[i] / ax.hop_s);
      if (!(j >= 0.0 && j < static_cast<double>(ax.bins) && g >= 0.0 &&
            g < static_cast<double>(ax.frames))) {
        ++T.dropped;
        continue;
      }
      T.at(static_cast<std::size_t>(g), static_cast<std::size_t>(j)) += mag(V.values[i]);
    }
  }
  return T;
}

std::vector<RidgePoint> ridge_extract(const RealTFR& T, double lo_hz, double hi_hz) {
  const TfrAxes& ax = T.axes;
  if (!(lo_hz <= hi_hz) || lo_hz < 0.0)
    throw Error(ErrorKind::invalid_spec, "ridge band must satisfy 0 <= lo <= hi");
  const auto k0 = static_cast<std::size_t>(std::ceil(lo_hz / ax.bin_hz - 1e-9));
  const double hi_idx = std::floor(hi_hz / ax.bin_hz + 1e-9);
  const std::size_t k1 = std::min(ax.bins - 1, static_cast<std::size_t>(std::max(0.0, hi_idx)));
  if (k0 >= ax.bins || k0 > k1 || hi_idx < 0.0)
    throw Error(ErrorKind::invalid_spec, "ridge band contains no frequency bins");

  std::vector<RidgePoint> out(ax.frames);
  for (std::size_t f = 0; f < ax.frames; ++f) {
    std::size_t best = k0;
    double best_v = T.at(f, k0);
    for (std::size_t k = k0 + 1; k <= k1; ++k)
      if (T.at(f, k) > best_v) { best_v = T.at(f, k); best = k; }
    out[f].time = ax.frame_time(f);
    out[f].valid = best_v > 0.0;
    out[f].freq = out[f].valid ? ax.bin_freq(best) : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::string stamp_tag(FrameStamp s) {
  switch (s) {
    case FrameStamp::center: return "center";
    case FrameStamp::observation: return "observation";
    case FrameStamp::estimation: return "estimation";
  }
  return "center";
}

std::optional<FrameStamp> stamp_from_tag(const std::string& s) {
  if (s == "center") return FrameStamp::center;
  if (s == "observation") return FrameStamp::observation;
  if (s == "estimation") return FrameStamp::estimation;
  return std::nullopt;
}

}  // namespace mlwin
