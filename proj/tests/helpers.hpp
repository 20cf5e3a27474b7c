#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "mlwin/polynomial.hpp"

#include "mlwin/window.hpp"

namespace testutil {

inline std::vector<double> random_taps(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                       double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

// Brute-force DTFT magnitude at frequency f (cycles per sample).
inline double dtft_mag(const std::vector<double>& h, double f) {
  double re = 0, im = 0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    const double a = -2.0 * M_PI * f * static_cast<double>(n);
    re += h[n] * std::cos(a);
    im += h[n] * std::sin(a);
  }
  return std::hypot(re, im);
}

inline std::vector<double> to_vec(const mlwin::Window& w) {
  return {w.taps().begin(), w.taps().end()};
}

struct LabelledPolynomial {
  std::vector<double> coeffs;
  bool on_circle = false;
};

// Even-degree palindromic polynomial (degree 2K, K <= max_k) with a known root
// layout: either all zeros on the circle, or one reciprocal off-circle pair or
// quadruple with radius in [1.1, 3] plus on-circle pairs. On-circle angles are
// stratified so neighbouring roots stay well separated, and the product is
// formed in bit-reversed order to keep the coefficients well scaled.
inline LabelledPolynomial random_palindromic(std::mt19937_64& rng, int max_k = 32) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_k));
  LabelledPolynomial out;
  out.on_circle = u(rng) < 0.5;
  std::vector<mlwin::cplx> off;
  if (!out.on_circle) {
    const double rad = 1.1 + 1.9 * u(rng);
    if (k >= 2 && u(rng) < 0.5) {
      const double th = 0.1 + 2.9 * u(rng);
      off = {std::polar(rad, th), std::polar(rad, -th), std::polar(1 / rad, th),
             std::polar(1 / rad, -th)};
    } else {
      const double r = u(rng) < 0.5 ? -rad : rad;
      off = {r, 1 / r};
    }
  }
  const int pairs = (2 * k - static_cast<int>(off.size())) / 2;
  std::vector<double> angles(pairs);
  for (int j = 0; j < pairs; ++j) angles[j] = M_PI * (j + 0.2 + 0.6 * u(rng)) / pairs;
  std::vector<std::pair<double, int>> order;
  for (int j = 0; j < pairs; ++j) {
    double v = 0, b = 0.5;
    for (int x = j; x; x >>= 1, b /= 2)
      if (x & 1) v += b;
    order.push_back({v, j});
  }
  std::sort(order.begin(), order.end());
  std::vector<mlwin::cplx> roots;
  for (const auto& o : order) {
    roots.push_back(std::polar(1.0, angles[o.second]));
    roots.push_back(std::polar(1.0, -angles[o.second]));
  }
  roots.insert(roots.end(), off.begin(), off.end());
  out.coeffs = mlwin::poly_from_roots(roots, 0.5 + 1.5 * u(rng));
  const std::size_t n = out.coeffs.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double a = 0.5 * (out.coeffs[i] + out.coeffs[n - 1 - i]);
    out.coeffs[i] = out.coeffs[n - 1 - i] = a;
  }
  return out;
}

}  // namespace testutil
