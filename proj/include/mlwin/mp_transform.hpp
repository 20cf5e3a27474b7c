#pragma once

#include <cstddef>
#include <vector>

#include "mlwin/window.hpp"

namespace mlwin {

// Epsilon-minimum-phase companion of w via the real cepstrum of
// log(|F h| + epsilon * max |F h|) on an (oversample * N)-point grid,
// truncated back to N taps. epsilon is relative to the peak magnitude.
// The result is returned in natural time like every other Window.
Window eps_mp_transform(const Window& w, double epsilon = 1e-8,
                        std::size_t oversample = 32);

// Exact minimum-phase companion by reflecting every zero with
// |z| > 1 + tol_circle to 1 / conj(z) and rescaling. N <= 256.
Window root_reflection_mp(const Window& w, double tol_circle = 1e-9);

struct EnergyConcentration {
  std::vector<double> margins;  // index 0 = observation end
  double min_margin = 0;
  double eps_abs = 0;
  bool holds = false;           // min_margin >= -eps_abs
};

// Partial-energy margins sum_{n<=k} |h_mp|^2 - sum_{n<=k} |h|^2 with k counted
// from the observation end.
EnergyConcentration energy_concentration_report(const Window& h, const Window& hmp,
                                                double epsilon = 1e-8);

}  // namespace mlwin
