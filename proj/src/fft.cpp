#include "mlwin/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "mlwin/error.hpp"

namespace mlwin {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_spec: return "invalid-spec";
    case ErrorKind::size: return "size";
    case ErrorKind::shape: return "shape";
    case ErrorKind::degenerate: return "degenerate-window";
    case ErrorKind::zero_magnitude: return "zero-magnitude";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::classification: return "classification";
    case ErrorKind::model_violation: return "model-violation";
    case ErrorKind::parse: return "parse";
    case ErrorKind::unreliable: return "unreliable-measurement";
  }
  return "unknown";
}

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex);
    auto it = plans.find({n, sign});
    if (it != plans.end()) return it->second;
    // FFTW's planner is not thread-safe; it only ever runs under this lock.
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans.emplace(std::pair{n, sign}, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(void* plan, std::size_t n, std::span<const cplx> in,
         std::span<cplx> out) {
  if (in.size() != n || out.size() != n)
    throw Error(ErrorKind::shape, "fft: buffer size does not match plan size");
  std::vector<cplx> scratch(in.begin(), in.end());
  fftw_execute_dft(static_cast<fftw_plan>(plan),
                   reinterpret_cast<fftw_complex*>(scratch.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw Error(ErrorKind::size, "fft: size must be positive");
  forward_plan_ = cache().get(n, FFTW_FORWARD);
  inverse_plan_ = cache().get(n, FFTW_BACKWARD);
}

void Fft::forward(std::span<const cplx> in, std::span<cplx> out) const {
  run(forward_plan_, n_, in, out);
}

void Fft::inverse(std::span<const cplx> in, std::span<cplx> out) const {
  run(inverse_plan_, n_, in, out);
}

std::vector<cplx> Fft::forward_real(std::span<const double> x) const {
  if (x.size() > n_)
    throw Error(ErrorKind::size, "fft: input longer than transform size");
  std::vector<cplx> buf(n_, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = x[i];
  std::vector<cplx> out(n_);
  forward(buf, out);
  return out;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace mlwin
