#include <cmath>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "mlwin/error.hpp"
#include "mlwin/polynomial.hpp"
#include "mlwin/rootcheck.hpp"
#include "mlwin/window.hpp"

using namespace mlwin;

TEST_CASE("quadratics: verdict follows the discriminant") {
  for (double b : {-2.5, -1.9, -1.0, 0.0, 0.3, 1.0, 1.99, 2.5, 4.0}) {
    const std::vector<double> p = {1.0, b, 1.0};
    // Roots of x^2 + b x + 1 are on the circle iff b^2 <= 4.
    const bool truth = b * b < 4.0;
    const auto c = unit_circle_test_canonical(p);
    const auto n = unit_circle_test_numeric(p);
    CHECK(c.all_on_circle == truth);
    CHECK(n.all_on_circle == truth);
  }
}

TEST_CASE("numeric witnesses: modulus from the quadratic formula") {
  const std::vector<double> p = {1.0, 2.5, 1.0};
  const auto r = unit_circle_test_numeric(p);
  CHECK_FALSE(r.all_on_circle);
  bool found = false;
  for (const auto& w : r.witnesses) found = found || std::abs(w.modulus - 2.0) < 1e-8;
  CHECK(found);
  CHECK(unit_circle_test_canonical(std::vector<double>{1.0, 1.0, 1.0}).all_on_circle);
}

TEST_CASE("reduce_palindrome") {
  const auto a = reduce_palindrome(std::vector<double>{1, 2, 2, 1});
  CHECK(a.core == std::vector<double>{1, 1, 1});
  REQUIRE(a.removed.size() == 1);
  CHECK(a.removed[0] == std::vector<double>{1, 1});

  const auto b = reduce_palindrome(std::vector<double>{1, 0, -1});
  CHECK(b.core == std::vector<double>{1});
  REQUIRE(b.removed.size() == 1);
  CHECK(b.removed[0] == std::vector<double>{1, 0, -1});

  const auto c = reduce_palindrome(std::vector<double>{1, 3, 1});
  CHECK(c.core == std::vector<double>{1, 3, 1});
  CHECK(c.removed.empty());

  CHECK_THROWS_AS(reduce_palindrome(std::vector<double>{1, 2, 3}), Error);
}

TEST_CASE("canonical test rejects non-palindromic input") {
  try {
    unit_circle_test_canonical(std::vector<double>{1, 2, 3});
    FAIL("expected classification error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::classification);
  }
}

TEST_CASE("standard windows are classified by their zero layout") {
  const double a30[] = {0.30, 0.70};
  for (std::size_t n : {64u, 65u}) {
    for (auto m : {RootMethod::canonical, RootMethod::numeric}) {
      CHECK(check_window_roots(make_cosine_window(coeffs::hann, n, 1.0), m).all_on_circle);
      CHECK(check_window_roots(make_cosine_window(coeffs::hamming, n, 1.0), m).all_on_circle);
      CHECK(check_window_roots(make_cosine_window(coeffs::blackman, n, 1.0), m).all_on_circle);
      CHECK_FALSE(check_window_roots(make_cosine_window(coeffs::flat_top, n, 1.0), m).all_on_circle);
      CHECK_FALSE(check_window_roots(make_cosine_window(a30, n, 1.0), m).all_on_circle);
    }
  }
}

TEST_CASE("q-robustness of the canonical verdict") {
  const double a30[] = {0.30, 0.70};
  const std::vector<Window> ws = {
      make_cosine_window(coeffs::hann, 64, 1.0), make_cosine_window(coeffs::hamming, 64, 1.0),
      make_cosine_window(coeffs::blackman, 64, 1.0), make_cosine_window(coeffs::flat_top, 64, 1.0),
      make_cosine_window(a30, 64, 1.0)};
  for (const auto& w : ws) {
    const bool ref = check_window_roots(w, RootMethod::canonical, 2.0).all_on_circle;
    for (double q : {1.5, 4.0}) CHECK(check_window_roots(w, RootMethod::canonical, q).all_on_circle == ref);
  }
}

TEST_CASE("alpha0 >= 0.5 keeps every zero on the circle") {
  for (double a0 : {0.5, 0.54, 0.6, 0.75}) {
    const double c[] = {a0, 1.0 - a0};
    CHECK(check_window_roots(make_cosine_window(c, 64, 1.0), RootMethod::both).all_on_circle);
  }
  for (double a0 : {0.2, 0.3, 0.45}) {
    const double c[] = {a0, 1.0 - a0};
    CHECK_FALSE(check_window_roots(make_cosine_window(c, 64, 1.0), RootMethod::both).all_on_circle);
  }
}

TEST_CASE("removed unit-circle factors never change the verdict") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = testutil::random_palindromic(rng, 12);
    // Multiply by (x + 1): odd-degree palindromic, same verdict after reduction.
    std::vector<double> q(p.coeffs.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
      q[i] += p.coeffs[i];
      q[i + 1] += p.coeffs[i];
    }
    CHECK(unit_circle_test_both(q).all_on_circle == p.on_circle);
  }
}

TEST_CASE("canonical and numeric verdicts match the construction") {
  std::mt19937_64 rng(5);
  int agree_c = 0, agree_n = 0;
  const int total = 200;
  for (int trial = 0; trial < total; ++trial) {
    const auto p = testutil::random_palindromic(rng, 32);
    const auto r = unit_circle_test_both(p.coeffs);
    if (r.canonical_verdict && *r.canonical_verdict == p.on_circle) ++agree_c;
    if (r.numeric_verdict && *r.numeric_verdict == p.on_circle) ++agree_n;
    CHECK(r.all_on_circle == p.on_circle);
  }
  CHECK(agree_c >= 0.99 * total);
  CHECK(agree_n >= 0.99 * total);
}

TEST_CASE("poly round trip through roots") {
  const std::vector<cplx> roots = {{0.5, 0.0}, {-2.0, 0.0}, std::polar(1.0, 0.7),
                                   std::polar(1.0, -0.7)};
  const auto c = poly_from_roots(roots);
  const auto r = find_roots(c);
  REQUIRE(r.roots.size() == 4);
  for (const auto& z : roots) {
    double best = 1e9;
    for (const auto& y : r.roots) best = std::min(best, std::abs(y - z));
    CHECK(best < 1e-10);
  }
}
