#pragma once

#include <span>
#include <vector>

#include "mlwin/fft.hpp"

namespace mlwin {

// Polynomials are stored highest degree first: c[0] x^n + ... + c[n].

struct RootResult {
  std::vector<cplx> roots;
  double max_residual = 0;  // max |p(z)| / sum |c_k| |z|^k over the roots
};

// All zeros via companion-matrix eigenvalues, each polished by Newton steps in
// long double. Leading zero coefficients are dropped; trailing zeros give
// roots at the origin. Throws ErrorKind::numeric if the polished residual
// stays above max_residual.
RootResult find_roots(std::span<const double> coeffs, double max_residual = 1e-6);

// Real coefficients of scale * prod (x - r_i); conjugate pairs are assumed.
std::vector<double> poly_from_roots(std::span<const cplx> roots, double scale = 1.0);

cplx poly_eval(std::span<const double> coeffs, cplx z);

}  // namespace mlwin
