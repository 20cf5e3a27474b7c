#include "mlwin/wvd.hpp"

#include <algorithm>
#include <cmath>

#include "mlwin/error.hpp"
#include "mlwin/fft.hpp"

namespace mlwin {

double WvdGrid::sample(std::size_t r, double cycles) const {
  double x = cycles - std::floor(cycles);
  x *= static_cast<double>(cols);
  auto k0 = static_cast<std::size_t>(x);
  if (k0 >= cols) k0 = 0;
  const double frac = x - static_cast<double>(k0);
  const std::size_t k1 = (k0 + 1) % cols;
  return (1.0 - frac) * at(r, k0) + frac * at(r, k1);
}

WvdGrid wvd(const Window& w, std::size_t nfreq) {
  const std::size_t n = w.size();
  if (nfreq == 0) nfreq = next_pow2(2 * n);
  if (nfreq < 2 * n)
    throw Error(ErrorKind::size, "WVD frequency grid must have at least 2N bins");

  WvdGrid g;
  g.rows = 2 * n - 1;
  g.cols = nfreq;
  g.values.assign(g.rows * g.cols, 0.0);
  g.dt = 0.5 * w.tau();
  g.df = 1.0 / (static_cast<double>(nfreq) * w.tau());
  g.t0 = 0.5 * w.tau();

  const auto h = w.taps();
  Fft fft(nfreq);
  std::vector<cplx> buf(nfreq), out(nfreq);
  for (std::size_t p = 0; p < g.rows; ++p) {
    std::fill(buf.begin(), buf.end(), cplx{});
    const std::size_t a_lo = p >= n - 1 ? p - (n - 1) : 0;
    const std::size_t a_hi = std::min(p, n - 1);
    for (std::size_t a = a_lo; a <= a_hi; ++a) {
      const std::size_t b = p - a;
      const auto m = static_cast<std::ptrdiff_t>(a) - static_cast<std::ptrdiff_t>(b);
      const std::size_t idx = m >= 0 ? static_cast<std::size_t>(m)
                                     : nfreq - static_cast<std::size_t>(-m);
      buf[idx] += h[a] * h[b];
    }
    fft.forward(buf, out);
    for (std::size_t k = 0; k < nfreq; ++k) {
      g.values[p * nfreq + k] = out[k].real();
      g.max_imag = std::max(g.max_imag, std::abs(out[k].imag()));
    }
  }
  return g;
}

std::vector<double> frequency_marginal(const WvdGrid& g) {
  std::vector<double> m(g.rows, 0.0);
  for (std::size_t r = 0; r < g.rows; ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.cols; ++k) s += g.at(r, k);
    m[r] = s / static_cast<double>(g.cols);
  }
  return m;
}

double extrinsic_latency(const WvdGrid& g, const Window& w, double chirp_rate) {
  if (g.rows != 2 * w.size() - 1)
    throw Error(ErrorKind::shape, "WVD grid does not belong to this window");
  const double tau = w.tau();
  const double centre = 0.5 * static_cast<double>(w.size() - 1);
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < g.rows; ++p) {
    const double s = (0.5 * static_cast<double>(p) - centre) * tau;  // seconds
    const double v = g.sample(p, chirp_rate * s * tau);
    num += s * v;
    den += v;
  }
  if (std::abs(den) < 1e-12 * w.energy())
    throw Error(ErrorKind::numeric, "WVD line integral is ill-conditioned at this chirp rate");
  return num / den;
}

double extrinsic_latency(const Window& w, double chirp_rate) {
  return extrinsic_latency(wvd(w, 0), w, chirp_rate);
}

}  // namespace mlwin
