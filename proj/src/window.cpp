#include "mlwin/window.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mlwin/error.hpp"
#include "mlwin/fft.hpp"
#include "mlwin/wvd.hpp"

namespace mlwin {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct GridMap {
  double offset;  // n + offset
  double period;  // T
};

GridMap grid_map(CosineGrid grid, std::size_t n) {
  const double nd = static_cast<double>(n);
  return grid == CosineGrid::symmetric ? GridMap{1.0, nd + 1.0} : GridMap{0.0, nd};
}

void check_design_args(std::size_t n, double tau) {
  if (n < 2) throw Error(ErrorKind::size, "window length must be at least 2");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw Error(ErrorKind::invalid_spec, "sampling period must be positive");
}

}  // namespace

Window::Window(std::vector<double> taps, double tau, Provenance provenance)
    : taps_(std::move(taps)), tau_(tau), energy_(0.0),
      provenance_(std::move(provenance)) {
  if (taps_.empty()) throw Error(ErrorKind::size, "window has no taps");
  if (!(tau_ > 0.0) || !std::isfinite(tau_))
    throw Error(ErrorKind::invalid_spec, "sampling period must be positive and finite");
  for (double v : taps_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_spec, "window tap is not finite");
    energy_ += v * v;
  }
  if (!(energy_ > 0.0)) throw Error(ErrorKind::degenerate, "window has zero energy");
}

std::vector<double> Window::observation_order() const {
  return {taps_.rbegin(), taps_.rend()};
}

bool Window::is_symmetric(double rel_tol) const {
  double peak = 0.0;
  for (double v : taps_) peak = std::max(peak, std::abs(v));
  const std::size_t n = taps_.size();
  for (std::size_t i = 0; i < n / 2; ++i)
    if (std::abs(taps_[i] - taps_[n - 1 - i]) > rel_tol * peak) return false;
  return true;
}

Window make_cosine_window(std::span<const double> coefficients, std::size_t n,
                          double tau, CosineGrid grid) {
  if (coefficients.empty())
    throw Error(ErrorKind::invalid_spec, "cosine window needs at least one coefficient");
  double sum = 0.0;
  for (double a : coefficients) {
    if (!(a > 0.0) || !std::isfinite(a))
      throw Error(ErrorKind::invalid_spec, "cosine window coefficients must be positive");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(ErrorKind::invalid_spec, "cosine window coefficients must sum to 1");
  check_design_args(n, tau);

  const auto [offset, period] = grid_map(grid, n);
  std::vector<double> taps(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    double sign = 1.0;
    for (std::size_t k = 0; k < coefficients.size(); ++k, sign = -sign)
      v += sign * coefficients[k] *
           std::cos(two_pi * static_cast<double>(k) * (static_cast<double>(i) + offset) / period);
    taps[i] = v;
  }
  return Window(std::move(taps), tau,
                {WindowKind::cosine_series, {coefficients.begin(), coefficients.end()}, grid});
}

Window make_derivative_window(std::span<const double> coefficients,
                              std::size_t n, double tau, CosineGrid grid) {
  if (coefficients.size() < 2)
    throw Error(ErrorKind::invalid_spec,
                "derivative taper needs at least one non-constant term");
  double sum = 0.0;
  for (double a : coefficients) {
    if (!std::isfinite(a)) throw Error(ErrorKind::invalid_spec, "coefficient is not finite");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(ErrorKind::invalid_spec, "cosine window coefficients must sum to 1");
  check_design_args(n, tau);

  const auto [offset, period] = grid_map(grid, n);
  std::vector<double> taps(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    double sign = -1.0;
    for (std::size_t k = 1; k < coefficients.size(); ++k, sign = -sign)
      v += sign * coefficients[k] *
           std::sin(two_pi * static_cast<double>(k) * (static_cast<double>(i) + offset) / period);
    taps[i] = v;
  }
  return Window(std::move(taps), tau,
                {WindowKind::sine_taper, {coefficients.begin(), coefficients.end()}, grid});
}

Window make_g729_window(std::size_t n, double tau) {
  if (n < 6 || n % 6 != 0)
    throw Error(ErrorKind::size, "G.729 window length must be a positive multiple of 6");
  check_design_args(n, tau);
  const double nd = static_cast<double>(n);
  const std::size_t tail = n / 6;
  const std::size_t rise = n - tail;
  std::vector<double> taps(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i);
    if (i < rise)
      taps[i] = 0.54 - 0.46 * std::cos(two_pi * x / (5.0 * nd / 3.0 - 1.0));
    else
      taps[i] = std::cos(two_pi * (x - static_cast<double>(rise)) / (2.0 * nd / 3.0 - 1.0));
  }
  return Window(std::move(taps), tau, {WindowKind::g729, {}, CosineGrid::symmetric});
}

std::vector<double> time_derivative(const Window& w) {
  const std::size_t n = w.size();
  const Provenance& p = w.provenance();
  std::vector<double> d(n, 0.0);

  if ((p.kind == WindowKind::cosine_series || p.kind == WindowKind::sine_taper) &&
      !p.coefficients.empty()) {
    const auto [offset, period] = grid_map(p.grid, n);
    const bool cosine = p.kind == WindowKind::cosine_series;
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      for (std::size_t k = 1; k < p.coefficients.size(); ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        const double omega = two_pi * static_cast<double>(k) / period;
        const double arg = omega * (static_cast<double>(i) + offset);
        v += cosine ? -sign * p.coefficients[k] * omega * std::sin(arg)
                    : sign * p.coefficients[k] * omega * std::cos(arg);
      }
      d[i] = v / w.tau();
    }
    return d;
  }

  // Band-limited differentiation on a zero-padded grid, truncated to the
  // window support.
  const std::size_t m = next_pow2(8 * n);
  Fft fft(m);
  auto spec = fft.forward_real(w.taps());
  for (std::size_t k = 0; k < m; ++k) {
    double nu = static_cast<double>(k) / static_cast<double>(m);
    if (k > m / 2) nu -= 1.0;
    if (k == m / 2) nu = 0.0;
    spec[k] *= cplx{0.0, two_pi * nu};
  }
  std::vector<cplx> out(m);
  fft.inverse(spec, out);
  for (std::size_t i = 0; i < n; ++i)
    d[i] = out[i].real() / static_cast<double>(m) / w.tau();
  return d;
}

double intrinsic_latency(const Window& w) {
  const auto taps = w.taps();
  double num = 0.0;
  for (std::size_t i = 0; i < taps.size(); ++i)
    num += (static_cast<double>(i) + 0.5) * taps[i] * taps[i];
  return w.duration() - w.tau() * num / w.energy();
}

LatencyReport latency_report(const Window& w, std::span<const double> chirp_rates) {
  LatencyReport r;
  const auto taps = w.taps();
  r.observation_time = w.duration();
  r.intrinsic_latency = intrinsic_latency(w);
  r.estimation_time = r.observation_time - r.intrinsic_latency;

  double sum = 0.0, abs_sum = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    sum += taps[i];
    abs_sum += std::abs(taps[i]);
    moment += (static_cast<double>(i) + 0.5) * taps[i];
  }
  if (std::abs(sum) > 1e-12 * abs_sum)
    r.narrowband_latency = r.observation_time - w.tau() * moment / sum;

  if (!chirp_rates.empty()) {
    const WvdGrid grid = wvd(w, 0);
    for (double c : chirp_rates)
      r.extrinsic_curve.emplace_back(
          c, 0.5 * w.duration() - extrinsic_latency(grid, w, c));
  }
  return r;
}

std::string kind_tag(WindowKind kind) {
  switch (kind) {
    case WindowKind::cosine_series: return "cosine-series";
    case WindowKind::sine_taper: return "sine-taper";
    case WindowKind::g729: return "g729";
    case WindowKind::mp_derived: return "mp-derived";
    case WindowKind::custom: return "custom";
  }
  return "custom";
}

}  // namespace mlwin
