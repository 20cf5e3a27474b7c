#include "mlwin/mp_transform.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>

#include "mlwin/error.hpp"
#include "mlwin/fft.hpp"
#include "mlwin/polynomial.hpp"

namespace mlwin {

namespace {

// The MP factor is defined up to sign; keep the sign of the input's DC gain.
void match_dc_sign(std::span<const double> ref, std::vector<double>& taps) {
  double a = 0.0, b = 0.0;
  for (double v : ref) a += v;
  for (double v : taps) b += v;
  if (a * b < 0.0)
    for (double& v : taps) v = -v;
}

Window from_observation_order(std::vector<double> obs, double tau) {
  std::reverse(obs.begin(), obs.end());
  return Window(std::move(obs), tau, {WindowKind::mp_derived, {}, CosineGrid::symmetric});
}

double peak_magnitude(const Window& w, std::size_t grid) {
  Fft fft(grid);
  double m = 0.0;
  for (const cplx& v : fft.forward_real(w.taps())) m = std::max(m, std::abs(v));
  return m;
}

// Homomorphic MP of an observation-order sequence on a len-point grid.
std::vector<double> cepstral_mp(std::span<const double> obs, double epsilon, std::size_t len) {
  const std::size_t n = obs.size();
  Fft fft(len);
  const auto spec = fft.forward_real(obs);

  std::vector<double> mag(len);
  double peak = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    mag[k] = std::abs(spec[k]);
    peak = std::max(peak, mag[k]);
  }
  const double floor = epsilon * peak;
  std::vector<cplx> logmag(len);
  for (std::size_t k = 0; k < len; ++k) {
    const double m = mag[k] + floor;
    if (!(m > 0.0) || (epsilon == 0.0 && m <= 1e-13 * peak))
      throw Error(ErrorKind::zero_magnitude,
                  "magnitude spectrum has zeros; use a positive epsilon");
    logmag[k] = std::log(m);
    if (!std::isfinite(logmag[k].real()))
      throw Error(ErrorKind::zero_magnitude, "log magnitude is not finite; use a positive epsilon");
  }

  // Real cepstrum, folded onto positive quefrencies.
  std::vector<cplx> ceps(len), folded(len, cplx{});
  fft.inverse(logmag, ceps);
  const double inv = 1.0 / static_cast<double>(len);
  folded[0] = ceps[0].real() * inv;
  for (std::size_t q = 1; q < (len + 1) / 2; ++q) folded[q] = 2.0 * ceps[q].real() * inv;
  if (len % 2 == 0) folded[len / 2] = ceps[len / 2].real() * inv;

  std::vector<cplx> expo(len), mp(len);
  fft.forward(folded, expo);
  for (auto& v : expo) v = std::exp(v);
  fft.inverse(expo, mp);

  std::vector<double> taps(n);
  for (std::size_t i = 0; i < n; ++i) taps[i] = mp[i].real() * inv;
  return taps;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Angle-sorted, bit-reversed order keeps intermediate products bounded.
std::vector<cplx> spread_order(std::vector<cplx> z) {
  std::sort(z.begin(), z.end(), [](cplx a, cplx b) { return std::arg(a) < std::arg(b); });
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < z.size()) ++bits;
  std::vector<cplx> out;
  out.reserve(z.size());
  for (std::size_t i = 0; i < (std::size_t{1} << bits); ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b)
      if (i >> b & 1) r |= std::size_t{1} << (bits - 1 - b);
    if (r < z.size()) out.push_back(z[r]);
  }
  return out;
}

struct CircleSplit {
  std::vector<double> circle;  // monic, zeros on |z| = 1, highest degree first
  std::vector<double> rest;    // obs = circle * rest
};

// Zeros on the unit circle are their own MP factors, but their log
// singularities alias badly on any finite grid. Split them off by root finding
// when that is well conditioned; empty result means "do not split".
std::optional<CircleSplit> split_circle(std::span<const double> obs) {
  constexpr std::size_t max_degree = 1024;
  constexpr double on_circle = 1e-6;
  if (obs.size() < 3 || obs.size() > max_degree || obs.front() == 0.0) return std::nullopt;
  // Exact (z -/+ 1) factors first: repeated zeros at +-1 (odd-length Hann,
  // Blackman) defeat the root finder's accuracy.
  std::vector<double> core(obs.begin(), obs.end());
  std::vector<cplx> circle, off;
  double scale = 0.0;
  for (double v : obs) scale += std::abs(v);
  for (double r : {-1.0, 1.0}) {
    while (core.size() > 1) {
      double at = 0.0;
      for (double v : core) at = at * r + v;
      if (std::abs(at) > 1e-12 * scale) break;
      std::vector<double> q(core.size() - 1);
      double acc = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) q[i] = acc = acc * r + core[i];
      core = std::move(q);
      circle.push_back(r);
    }
  }
  if (core.size() > 1) {
    RootResult rr;
    try {
      rr = find_roots(core, 1e-8);
    } catch (const Error&) {
      return std::nullopt;
    }
    for (const cplx& z : rr.roots)
      (std::abs(std::abs(z) - 1.0) < on_circle ? circle : off).push_back(z);
  }
  if (circle.empty()) return std::nullopt;
  CircleSplit s;
  s.circle = poly_from_roots(spread_order(circle), 1.0);
  s.rest = poly_from_roots(spread_order(off), obs.front());

  // Accept the split only if it reproduces the input.
  const auto back = convolve(s.circle, s.rest);
  double norm = 0.0, resid = 0.0;
  for (double v : obs) norm = std::max(norm, std::abs(v));
  for (std::size_t i = 0; i < obs.size(); ++i) resid = std::max(resid, std::abs(back[i] - obs[i]));
  if (!(resid <= 1e-9 * norm)) return std::nullopt;
  return s;
}

}  // namespace

Window eps_mp_transform(const Window& w, double epsilon, std::size_t oversample) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw Error(ErrorKind::invalid_spec, "epsilon must be finite and non-negative");
  if (oversample < 4) throw Error(ErrorKind::invalid_spec, "oversample factor must be at least 4");

  const std::size_t n = w.size();
  const std::size_t len = oversample * n;
  const auto obs = w.observation_order();
  if (auto split = split_circle(obs)) {
    // The floor is taken relative to the full spectrum so epsilon keeps its meaning.
    const double ratio = peak_magnitude(Window(split->rest, 1.0), len) /
                         peak_magnitude(w, len);
    const auto rest = cepstral_mp(split->rest, epsilon * ratio, len);
    auto taps = convolve(split->circle, rest);
    match_dc_sign(obs, taps);
    return from_observation_order(std::move(taps), w.tau());
  }
  auto taps = cepstral_mp(obs, epsilon, len);
  match_dc_sign(obs, taps);
  return from_observation_order(std::move(taps), w.tau());
}

Window root_reflection_mp(const Window& w, double tol_circle) {
  if (w.size() > 256) throw Error(ErrorKind::size, "root reflection supports N <= 256");
  const auto obs = w.observation_order();
  if (obs.size() == 1) return from_observation_order(obs, w.tau());

  // Leading zeros in observation order are delays; keep them in front.
  std::size_t lead = 0;
  while (obs[lead] == 0.0) ++lead;
  const std::span<const double> core(obs.data() + lead, obs.size() - lead);

  const RootResult rr = find_roots(core, 1e-6);
  std::vector<cplx> roots = rr.roots;
  double scale = core[0];
  for (cplx& z : roots) {
    const double r = std::abs(z);
    if (r > 1.0 + tol_circle) {
      scale *= r;
      z = 1.0 / std::conj(z);
    }
  }
  std::vector<double> taps = poly_from_roots(roots, scale);
  match_dc_sign(obs, taps);
  taps.insert(taps.begin(), lead, 0.0);
  return from_observation_order(std::move(taps), w.tau());
}

EnergyConcentration energy_concentration_report(const Window& h, const Window& hmp,
                                                double epsilon) {
  if (h.size() != hmp.size())
    throw Error(ErrorKind::shape, "windows must have the same length");
  const std::size_t n = h.size();
  const auto a = h.observation_order();
  const auto b = hmp.observation_order();

  EnergyConcentration r;
  r.margins.resize(n);
  double sa = 0.0, sb = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sa += a[k] * a[k];
    sb += b[k] * b[k];
    r.margins[k] = sb - sa;
  }
  r.min_margin = *std::min_element(r.margins.begin(), r.margins.end());

  // Energy added by the epsilon floor is at most (2 eps + eps^2) max|Fh|^2;
  // whatever the truncation to N taps changed shows up in the total.
  const double peak = peak_magnitude(h, next_pow2(32 * n));
  r.eps_abs = (2.0 * epsilon + epsilon * epsilon) * peak * peak +
              std::abs(sb - sa) + 1e-12 * h.energy();
  r.holds = r.min_margin >= -r.eps_abs;
  return r;
}

}  // namespace mlwin
