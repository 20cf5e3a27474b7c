#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mlwin {

using cplx = std::complex<double>;

// Thin FFTW wrapper. Plans are created once per (size, direction) and cached
// process-wide; execution is thread-safe.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  // Unnormalized forward transform: X[k] = sum_n x[n] exp(-2 pi i k n / N).
  void forward(std::span<const cplx> in, std::span<cplx> out) const;
  // Unnormalized inverse transform (no 1/N factor).
  void inverse(std::span<const cplx> in, std::span<cplx> out) const;

  // Zero-padded forward transform of a real sequence (x.size() <= size()).
  std::vector<cplx> forward_real(std::span<const double> x) const;

 private:
  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

std::size_t next_pow2(std::size_t n);

}  // namespace mlwin
