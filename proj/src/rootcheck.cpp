#include "mlwin/rootcheck.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "mlwin/error.hpp"
#include "mlwin/polynomial.hpp"

namespace mlwin {

namespace {

using real = long double;
using Mat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<real, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

enum class Symmetry { palindromic, anti_palindromic, none };

Symmetry symmetry_of(std::span<const double> c) {
  double norm = 0.0;
  for (double v : c) norm = std::max(norm, std::abs(v));
  const double tol = 1e-9 * norm;
  const std::size_t n = c.size();
  bool pal = true, anti = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(c[i] - c[n - 1 - i]) > tol) pal = false;
    if (std::abs(c[i] + c[n - 1 - i]) > tol) anti = false;
  }
  if (pal) return Symmetry::palindromic;
  if (anti) return Symmetry::anti_palindromic;
  return Symmetry::none;
}

// Synthetic division by a monic divisor; returns the quotient, checks the remainder.
std::vector<double> divide(std::span<const double> c, std::span<const double> d) {
  std::vector<double> rem(c.begin(), c.end());
  const std::size_t qn = c.size() - d.size() + 1;
  std::vector<double> quot(qn, 0.0);
  for (std::size_t i = 0; i < qn; ++i) {
    quot[i] = rem[i];
    for (std::size_t j = 0; j < d.size(); ++j) rem[i + j] -= quot[i] * d[j];
  }
  double norm = 0.0, resid = 0.0;
  for (double v : c) norm += v * v;
  for (std::size_t i = qn; i < rem.size(); ++i) resid += rem[i] * rem[i];
  if (std::sqrt(resid) > 1e-9 * std::sqrt(norm))
    throw Error(ErrorKind::classification, "palindromic reduction left a remainder");
  return quot;
}

// Matrix blocks of the canonical recursion.
Mat J1(Index k) { Mat m = Mat::Zero(k, k + 1); m.leftCols(k).setIdentity(); return m; }
Mat J2(Index k) { Mat m = Mat::Zero(k, k + 1); m.rightCols(k).setIdentity(); return m; }
Mat J3(Index k) {
  Mat m = Mat::Zero(k + 1, k);
  for (Index i = 0; i < k; ++i) m(i + 1, k - 1 - i) = 1;
  return m;
}

Mat hcat(std::initializer_list<Mat> blocks) {
  Index rows = blocks.begin()->rows(), cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  Mat out(rows, cols);
  Index at = 0;
  for (const auto& b : blocks) {
    out.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return out;
}

Mat vcat(std::initializer_list<Mat> blocks) {
  Index rows = 0, cols = blocks.begin()->cols();
  for (const auto& b : blocks) rows += b.rows();
  Mat out(rows, cols);
  Index at = 0;
  for (const auto& b : blocks) {
    out.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return out;
}

Mat Vplus(Index k) {
  if (k % 2) {
    const Index j = (k + 1) / 2;
    return hcat({J1(j).transpose(), J3(j)});
  }
  const Index j = k / 2;
  return hcat({Mat::Identity(j + 1, j + 1), J3(j)});
}

Mat Vminus(Index k) {
  if (k % 2) {
    const Index j = (k + 1) / 2;
    return hcat({Mat::Identity(j, j), Mat::Zero(j, 1), -J3((k - 1) / 2)});
  }
  const Index j = k / 2;
  return hcat({Mat::Identity(j + 1, j + 1), -J3(j)});
}

Mat Pmat(Index k, real x) {
  if (k == 0) return Mat::Identity(2, 2);
  if (k == 1) {
    Mat p = Mat::Identity(4, 4);
    p(3, 0) = 0; p(3, 1) = 1; p(3, 3) = -x;
    return p;
  }
  const Mat vp = Vplus(k), vm = Vminus(k);
  // Bottom block is [J2, -x J2]; the [J1, -x J2] form is singular for odd k.
  return vcat({hcat({vp, Mat::Zero(vp.rows(), k + 1)}),
               hcat({Mat::Zero(vm.rows(), k + 1), vm}),
               hcat({J2(k), -x * J2(k)})});
}

Mat Qmat(Index k) {
  if (k == 0) {
    Mat q = Mat::Zero(2, 4);
    q(0, 0) = 1; q(0, 1) = 1; q(1, 2) = 1; q(1, 3) = -1;
    return q;
  }
  if (k == 1) {
    Mat q = Mat::Zero(4, 6);
    q(0, 0) = 1; q(0, 2) = 1; q(1, 1) = 1; q(2, 3) = 1; q(2, 5) = -1;
    return q;
  }
  const Mat vp = Vplus(k), vm = Vminus(k);
  Mat e1p = Mat::Zero(vp.rows(), 1), e1m = Mat::Zero(vm.rows(), 1);
  e1p(0, 0) = 1; e1m(0, 0) = -1;
  const Mat wp = hcat({vp, e1p}), wm = hcat({vm, e1m});
  return vcat({hcat({wp, Mat::Zero(wp.rows(), k + 2)}),
               hcat({Mat::Zero(wm.rows(), k + 2), wm}),
               Mat::Zero(k, 2 * k + 4)});
}

// Exact palindrome by construction; remove rounding asymmetry.
void symmetrize(std::vector<double>& c) {
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n / 2; ++i) c[i] = c[n - 1 - i] = 0.5 * (c[i] + c[n - 1 - i]);
}

// An even palindrome vanishing at x = -1 or x = 1 carries that root with even
// multiplicity. The canonical recursion degenerates on repeated roots, so the
// (x -/+ 1)^2 factors are divided out as well; they sit on the circle anyway.
void strip_double_unit_roots(ReducedPalindrome& r) {
  for (const double s : {-1.0, 1.0}) {
    while (r.core.size() >= 3) {
      double at = 0.0, scale = 0.0, pw = 1.0;
      for (std::size_t i = r.core.size(); i-- > 0;) {
        at += r.core[i] * pw;
        scale += std::abs(r.core[i]);
        pw *= s;
      }
      if (std::abs(at) > 1e-12 * scale) break;
      const std::vector<double> f{1.0, -2.0 * s, 1.0};
      r.core = divide(r.core, f);
      symmetrize(r.core);
      r.removed.push_back(f);
    }
  }
}

std::vector<double> strip_end_zeros(std::span<const double> c) {
  double peak = 0.0;
  for (double v : c) peak = std::max(peak, std::abs(v));
  std::size_t lo = 0, hi = c.size();
  while (lo < hi && std::abs(c[lo]) <= 1e-15 * peak) ++lo;
  while (hi > lo && std::abs(c[hi - 1]) <= 1e-15 * peak) --hi;
  return {c.begin() + static_cast<std::ptrdiff_t>(lo), c.begin() + static_cast<std::ptrdiff_t>(hi)};
}

}  // namespace

ReducedPalindrome reduce_palindrome(std::span<const double> coeffs) {
  if (coeffs.empty()) throw Error(ErrorKind::classification, "empty polynomial");
  ReducedPalindrome r;
  const bool odd = coeffs.size() % 2 == 0;  // degree = size - 1
  switch (symmetry_of(coeffs)) {
    case Symmetry::none:
      throw Error(ErrorKind::classification, "polynomial is neither palindromic nor anti-palindromic");
    case Symmetry::palindromic:
      if (!odd) {
        r.core.assign(coeffs.begin(), coeffs.end());
        strip_double_unit_roots(r);
        return r;
      }
      r.removed.push_back({1.0, 1.0});
      break;
    case Symmetry::anti_palindromic:
      r.removed.push_back(odd ? std::vector<double>{1.0, -1.0} : std::vector<double>{1.0, 0.0, -1.0});
      break;
  }
  r.core = divide(coeffs, r.removed.back());
  symmetrize(r.core);
  strip_double_unit_roots(r);
  return r;
}

PalindromeTestReport unit_circle_test_canonical(std::span<const double> coeffs, double q,
                                                double tol) {
  if (!(q > 1.0)) throw Error(ErrorKind::invalid_spec, "q must exceed 1");
  PalindromeTestReport rep;
  rep.method = RootMethod::canonical;
  ReducedPalindrome red = reduce_palindrome(coeffs);
  rep.is_palindromic = true;
  rep.degree_reductions = red.removed;

  const Index two_k = static_cast<Index>(red.core.size()) - 1;
  const Index big_k = two_k / 2;
  if (big_k == 0) {
    rep.all_on_circle = true;
    rep.canonical_verdict = true;
    return rep;
  }

  real peak = 0;
  for (double v : red.core) peak = std::max(peak, std::abs(static_cast<real>(v)));
  const real lq = std::log(static_cast<real>(q));
  Vec v(2 * (two_k + 1));
  for (Index j = 0; j <= two_k; ++j) {
    const real h = static_cast<real>(red.core[static_cast<std::size_t>(j)]) / peak;
    v(j) = h;
    v(two_k + 1 + j) = h * static_cast<real>(big_k - j) * lq;
  }

  for (Index n = 1; n <= two_k; ++n) {
    const Index k = two_k - n;
    const Index len = v.size() / 2;
    const real num = v(0) + v(len - 1);
    const real den = v(len) - v(2 * len - 1);
    const real m = num / den;
    rep.m_sequence.push_back(static_cast<double>(m));
    if (!std::isfinite(static_cast<double>(m)) || m < -static_cast<real>(tol)) {
      rep.failing_step = static_cast<std::size_t>(n);
      rep.canonical_verdict = false;
      return rep;
    }
    if (m <= static_cast<real>(tol) || m >= 1 / static_cast<real>(tol)) {
      rep.failing_step = static_cast<std::size_t>(n);
      rep.indeterminate = true;
      return rep;
    }
    const Mat p = Pmat(k, m);
    Eigen::PartialPivLU<Mat> lu(p);
    const Mat& u = lu.matrixLU();
    real umax = 0, umin = std::numeric_limits<real>::infinity();
    for (Index i = 0; i < u.rows(); ++i) {
      umax = std::max(umax, std::abs(u(i, i)));
      umin = std::min(umin, std::abs(u(i, i)));
    }
    if (!(umin > 1e-14L * umax))
      throw Error(ErrorKind::numeric,
                  "canonical recursion matrix is singular at step " + std::to_string(n));
    const Vec rhs = Qmat(k) * v;
    v = lu.solve(rhs);
  }
  rep.all_on_circle = true;
  rep.canonical_verdict = true;
  return rep;
}

PalindromeTestReport unit_circle_test_numeric(std::span<const double> coeffs,
                                              double tol_circle) {
  PalindromeTestReport rep;
  rep.method = RootMethod::numeric;
  rep.is_palindromic = symmetry_of(coeffs) != Symmetry::none;
  const std::vector<double> c = strip_end_zeros(coeffs);
  if (c.size() < 2) throw Error(ErrorKind::size, "polynomial degree must be at least 1");
  const RootResult rr = find_roots(c, 1e-6);
  for (const cplx& z : rr.roots) {
    const double dev = std::abs(std::abs(z) - 1.0);
    rep.max_deviation = std::max(rep.max_deviation, dev);
    if (dev >= tol_circle) rep.witnesses.push_back({z, std::abs(z)});
  }
  std::sort(rep.witnesses.begin(), rep.witnesses.end(),
            [](const Witness& a, const Witness& b) { return a.modulus < b.modulus; });
  rep.all_on_circle = rep.witnesses.empty();
  rep.numeric_verdict = rep.all_on_circle;
  return rep;
}

PalindromeTestReport unit_circle_test_both(std::span<const double> coeffs, double q, double tol,
                                           double tol_circle) {
  PalindromeTestReport rep = unit_circle_test_canonical(coeffs, q, tol);
  const PalindromeTestReport num = unit_circle_test_numeric(coeffs, tol_circle);
  rep.method = RootMethod::both;
  rep.witnesses = num.witnesses;
  rep.numeric_verdict = num.numeric_verdict;
  rep.max_deviation = num.max_deviation;
  if (rep.indeterminate) rep.all_on_circle = num.all_on_circle;
  return rep;
}

PalindromeTestReport check_window_roots(const Window& w, RootMethod method, double q, double tol,
                                        double tol_circle) {
  const std::vector<double> c = strip_end_zeros(w.taps());
  switch (method) {
    case RootMethod::canonical: return unit_circle_test_canonical(c, q, tol);
    case RootMethod::numeric: return unit_circle_test_numeric(c, tol_circle);
    case RootMethod::both: return unit_circle_test_both(c, q, tol, tol_circle);
  }
  return unit_circle_test_canonical(c, q, tol);
}

}  // namespace mlwin
