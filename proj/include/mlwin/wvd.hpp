#pragma once

#include <cstddef>
#include <vector>

#include "mlwin/window.hpp"

namespace mlwin {

// Discrete Wigner-Ville distribution of a window on the half-sample lattice.
// Row p is the lag centre t = p/2 (in taps, p = 0..2N-2); column k is the
// frequency k/cols cycles per sample. Both lattice points inside each product
// h(a) h(b), a + b = p, are actual taps, so no interpolation of h is needed.
struct WvdGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
  double dt = 0;               // seconds between rows (tau / 2)
  double df = 0;               // Hz between columns
  double t0 = 0;               // time of row 0 from the start of the frame
  double max_imag = 0;         // largest discarded imaginary part

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  // Periodic linear interpolation in frequency (cycles per sample).
  double sample(std::size_t r, double cycles) const;
};

// nfreq = 0 picks the smallest power of two >= 2N.
WvdGrid wvd(const Window& w, std::size_t nfreq = 0);

// Frequency marginal per row, (1/cols) sum_k W(p, k). Equals h(p/2)^2 on even
// rows and 0 on odd rows.
std::vector<double> frequency_marginal(const WvdGrid& g);

// Offset (seconds, positive towards the observation end) of the W-weighted
// centroid along the line eta = chirp_rate * s through the window centre,
// where s is the time from the centre.
double extrinsic_latency(const WvdGrid& g, const Window& w, double chirp_rate);
double extrinsic_latency(const Window& w, double chirp_rate);

}  // namespace mlwin
