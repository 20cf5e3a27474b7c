#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mlwin {

enum class WindowKind { cosine_series, sine_taper, g729, mp_derived, custom };

// Sampling grid for cosine-series windows.
//  symmetric: c_k(n) = cos(2 pi k (n+1) / (N+1)), h(n) == h(N-1-n)
//  periodic:  c_k(n) = cos(2 pi k n / N), h(n) == h(N-n) for n >= 1
enum class CosineGrid { symmetric, periodic };

struct Provenance {
  WindowKind kind = WindowKind::custom;
  std::vector<double> coefficients;  // alpha_k for cosine / sine families
  CosineGrid grid = CosineGrid::symmetric;
};

// A finite real window in natural time: taps()[0] is the earliest sample and
// taps()[N-1] the latest one, i.e. the observation end of the frame. The
// minimum-phase code works in the reversed ("observation first") order; use
// observation_order() to get that view.
//
// Tap n is taken to cover [n tau, (n+1) tau), so a window of N taps spans
// N tau and its observation time is N tau after the start of the frame.
class Window {
 public:
  Window(std::vector<double> taps, double tau, Provenance provenance = {});

  std::span<const double> taps() const noexcept { return taps_; }
  std::size_t size() const noexcept { return taps_.size(); }
  double tau() const noexcept { return tau_; }
  double duration() const noexcept { return tau_ * static_cast<double>(taps_.size()); }
  double energy() const noexcept { return energy_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  std::vector<double> observation_order() const;
  bool is_symmetric(double rel_tol = 1e-12) const;

 private:
  std::vector<double> taps_;
  double tau_;
  double energy_;
  Provenance provenance_;
};

Window make_cosine_window(std::span<const double> coefficients, std::size_t n,
                          double tau, CosineGrid grid = CosineGrid::symmetric);

// Orthogonal companion taper h'(n) = sum_{k>=1} (-1)^k alpha_k sin(2 pi k n / T)
// on the same grid as make_cosine_window.
Window make_derivative_window(std::span<const double> coefficients,
                              std::size_t n, double tau,
                              CosineGrid grid = CosineGrid::symmetric);

// ITU-T G.729 hybrid Hamming-cosine window. n must be a multiple of 6.
Window make_g729_window(std::size_t n, double tau);

// Named coefficient sets used throughout the project.
namespace coeffs {
inline constexpr double hann[] = {0.5, 0.5};
inline constexpr double hamming[] = {0.54, 0.46};
inline constexpr double blackman[] = {0.42, 0.50, 0.08};
inline constexpr double flat_top[] = {0.28, 0.52, 0.20};
}  // namespace coeffs

// Window time-derivative dh/dt (per second), used for frequency reassignment.
// Closed form for cosine-series and sine-taper windows, spectral
// differentiation otherwise.
std::vector<double> time_derivative(const Window& w);

struct LatencyReport {
  double observation_time = 0;     // from the start of the frame, seconds
  double estimation_time = 0;      // |h|^2-weighted centroid, seconds
  double intrinsic_latency = 0;    // observation_time - estimation_time
  std::optional<double> narrowband_latency;  // h-weighted centroid version
  std::vector<std::pair<double, double>> extrinsic_curve;  // (Hz/s, seconds)
};

LatencyReport latency_report(const Window& w,
                             std::span<const double> chirp_rates = {});

// Intrinsic latency only; cheap enough for sweeps.
double intrinsic_latency(const Window& w);

// Window CSV: header "# tau=<seconds> kind=<tag>[ coeffs=a,b,c][ grid=...]"
// followed by one tap per line.
void write_window_csv(std::ostream& out, const Window& w);
Window read_window_csv(std::istream& in);
void save_window(const std::string& path, const Window& w);
Window load_window(const std::string& path);

std::string kind_tag(WindowKind kind);

}  // namespace mlwin
