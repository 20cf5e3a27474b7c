#include "mlwin/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "mlwin/error.hpp"

namespace mlwin {

namespace {

using lcplx = std::complex<long double>;

// |p(z)| relative to the natural rounding scale of the evaluation.
double relative_residual(std::span<const double> c, cplx z) {
  lcplx acc = 0;
  long double scale = 0;
  const long double az = std::abs(lcplx(z));
  for (double v : c) {
    acc = acc * lcplx(z) + static_cast<long double>(v);
    scale = scale * az + std::abs(static_cast<long double>(v));
  }
  return scale > 0 ? static_cast<double>(std::abs(acc) / scale) : 0.0;
}

cplx polish(std::span<const double> c, cplx z0) {
  lcplx z(z0);
  double best_res = relative_residual(c, z0);
  cplx best = z0;
  for (int it = 0; it < 20; ++it) {
    lcplx p = 0, dp = 0;
    for (double v : c) {
      dp = dp * z + p;
      p = p * z + static_cast<long double>(v);
    }
    if (std::abs(dp) == 0.0L) break;
    const lcplx step = p / dp;
    z -= step;
    const cplx zd(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    const double res = relative_residual(c, zd);
    if (!std::isfinite(res)) break;
    if (res < best_res) {
      best_res = res;
      best = zd;
    }
    if (std::abs(step) <= 1e-18L * std::max<long double>(1.0L, std::abs(z))) break;
  }
  return best;
}

}  // namespace

cplx poly_eval(std::span<const double> coeffs, cplx z) {
  cplx acc = 0;
  for (double v : coeffs) acc = acc * z + v;
  return acc;
}

RootResult find_roots(std::span<const double> coeffs, double max_residual) {
  std::size_t lead = 0;
  while (lead < coeffs.size() && coeffs[lead] == 0.0) ++lead;
  std::size_t end = coeffs.size();
  while (end > lead && coeffs[end - 1] == 0.0) --end;
  if (lead == end) throw Error(ErrorKind::degenerate, "zero polynomial has no defined roots");

  RootResult out;
  out.roots.assign(coeffs.size() - end, cplx{0.0, 0.0});
  const auto c = coeffs.subspan(lead, end - lead);
  const std::size_t n = c.size() - 1;
  if (n == 0) return out;

  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                 static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j)
    comp(0, static_cast<Eigen::Index>(j)) = -c[j + 1] / c[0];
  for (std::size_t i = 1; i < n; ++i)
    comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::numeric, "companion eigenvalue iteration did not converge");
  const auto& ev = solver.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const cplx z = polish(c, ev[i]);
    out.max_residual = std::max(out.max_residual, relative_residual(c, z));
    out.roots.push_back(z);
  }
  if (out.max_residual > max_residual)
    throw Error(ErrorKind::numeric, "root finder residual " + std::to_string(out.max_residual) +
                                        " exceeds " + std::to_string(max_residual));
  return out;
}

std::vector<double> poly_from_roots(std::span<const cplx> roots, double scale) {
  std::vector<lcplx> p{lcplx(scale)};
  for (const cplx& r : roots) {
    p.push_back(0);
    for (std::size_t k = p.size() - 1; k > 0; --k) p[k] -= lcplx(r) * p[k - 1];
  }
  std::vector<double> out(p.size());
  std::transform(p.begin(), p.end(), out.begin(),
                 [](const lcplx& v) { return static_cast<double>(v.real()); });
  return out;
}

}  // namespace mlwin
