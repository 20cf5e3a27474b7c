#include <cmath>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "mlwin/error.hpp"
#include "mlwin/mp_transform.hpp"
#include "mlwin/rootcheck.hpp"
#include "mlwin/window.hpp"

using namespace mlwin;
using testutil::dtft_mag;
using testutil::random_taps;
using testutil::to_vec;

namespace {

// [1, 2.5, 1] has zeros -2 and -0.5; reflecting -2 gives 2 (z + 0.5)^2 up to
// the unit-circle gain, i.e. [2, 2, 0.5] from the observation end.
const Window hand_window({1.0, 2.5, 1.0}, 1.0);
const std::vector<double> hand_mp_obs = {2.0, 2.0, 0.5};

std::vector<Window> standard_windows(std::size_t n) {
  const double a30[] = {0.30, 0.70};
  return {make_cosine_window(coeffs::hann, n, 1.0), make_cosine_window(coeffs::hamming, n, 1.0),
          make_cosine_window(coeffs::blackman, n, 1.0),
          make_cosine_window(coeffs::flat_top, n, 1.0), make_cosine_window(a30, n, 1.0)};
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("eps-MP: hand oracle") {
  const Window m = eps_mp_transform(hand_window, 0.0, 64);
  const auto obs = m.observation_order();
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(obs[i] - hand_mp_obs[i]) < 1e-6);
  const auto mv = to_vec(m);
  const auto hv = to_vec(hand_window);
  for (int k = 0; k < 1024; ++k) {
    const double f = k / 1024.0;
    CHECK(std::abs(dtft_mag(mv, f) - dtft_mag(hv, f)) < 1e-6);
  }
}

TEST_CASE("root reflection: hand oracle and already-MP input") {
  const auto obs = root_reflection_mp(hand_window).observation_order();
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(obs[i] - hand_mp_obs[i]) < 1e-12);

  const Window already({0.5, 2.0, 2.0}, 1.0);
  const Window again = root_reflection_mp(already);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(again.taps()[i] - already.taps()[i]) < 1e-10);
}

TEST_CASE("root reflection agrees with eps-MP on flat-top N = 33") {
  const Window w = make_cosine_window(coeffs::flat_top, 33, 1.0);
  const Window a = root_reflection_mp(w);
  const Window b = eps_mp_transform(w, 1e-8, 32);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(a.taps()[i] - b.taps()[i]) < 1e-3);
}

TEST_CASE("eps-MP: exact spectral zero with eps = 0 is rejected") {
  try {
    eps_mp_transform(Window({1.0, 1.0}, 1.0), 0.0, 32);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::zero_magnitude);
  }
}

TEST_CASE("eps-MP: magnitude preservation and energy on standard windows") {
  const double eps = 1e-8;
  for (const auto& w : standard_windows(65)) {
    const Window m = eps_mp_transform(w, eps, 16);
    const auto hv = to_vec(w);
    const auto mv = to_vec(m);
    std::vector<double> mh(2048), mm(2048);
    for (int k = 0; k < 2048; ++k) {
      mh[k] = dtft_mag(hv, k / 2048.0);
      mm[k] = dtft_mag(mv, k / 2048.0);
    }
    const double peak = max_abs(mh);
    double worst = 0;
    for (int k = 0; k < 2048; ++k) worst = std::max(worst, std::abs(mm[k] - (mh[k] + eps * peak)));
    CHECK(worst / peak < 1e-3);
    // Parseval against the perturbed magnitude.
    double e_tilde = 0;
    for (double x : mh) e_tilde += (x + eps * peak) * (x + eps * peak);
    e_tilde /= 2048.0;
    CHECK(std::abs(m.energy() - e_tilde) / w.energy() < 1e-6);
  }
}

TEST_CASE("eps-MP: idempotence") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Window w(random_taps(rng, 4 + rng() % 40), 1.0);
    // Random taps put zeros close to the circle; use a grid that resolves them.
    const Window m1 = eps_mp_transform(w, 1e-8, 1024);
    const Window m2 = eps_mp_transform(m1, 1e-8, 1024);
    const double scale = max_abs(to_vec(m1));
    for (std::size_t i = 0; i < w.size(); ++i)
      CHECK(std::abs(m2.taps()[i] - m1.taps()[i]) < 1e-5 * scale);
  }
}

TEST_CASE("eps-MP: symmetric on-circle windows stay symmetric") {
  for (std::size_t n : {64u, 65u}) {
    for (const auto& c : {std::vector<double>{0.5, 0.5}, std::vector<double>{0.54, 0.46},
                          std::vector<double>{0.42, 0.50, 0.08}}) {
      const Window w = make_cosine_window(c, n, 1.0);
      const Window m = eps_mp_transform(w, 1e-8);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(m.taps()[i] - m.taps()[n - 1 - i]) < 1e-4);
      CHECK(std::abs(intrinsic_latency(m) - intrinsic_latency(w)) < 1e-4 * w.duration());
    }
  }
}

TEST_CASE("energy concentration: hand arithmetic") {
  const Window hmp({0.5, 2.0, 2.0}, 1.0);
  const auto r = energy_concentration_report(hand_window, hmp, 0.0);
  REQUIRE(r.margins.size() == 3);
  CHECK(r.margins[0] == doctest::Approx(4.0 - 1.0));
  CHECK(r.margins[1] == doctest::Approx(8.0 - 7.25));
  CHECK(r.margins[2] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.holds);

  const auto same = energy_concentration_report(hand_window, hand_window, 0.0);
  for (double m : same.margins) CHECK(m == 0.0);
  CHECK_THROWS_AS(energy_concentration_report(hand_window, Window({1.0, 1.0}, 1.0)), Error);
}

TEST_CASE("energy concentration and latency dominance on random windows") {
  std::mt19937_64 rng(23);
  int tested = 0;
  while (tested < 100) {
    const Window w(random_taps(rng, 4 + rng() % 60), 1.0);
    const auto rep = unit_circle_test_numeric(to_vec(w), 1e-6);
    if (rep.witnesses.empty()) continue;  // want a zero strictly off the circle
    const Window m = eps_mp_transform(w);
    const auto ec = energy_concentration_report(w, m, 1e-8);
    CHECK(ec.min_margin >= -ec.eps_abs);
    bool outside = false;
    for (const auto& wt : rep.witnesses) outside = outside || wt.modulus > 1.0 + 1e-6;
    if (outside) CHECK(intrinsic_latency(m) < intrinsic_latency(w));
    ++tested;
  }
}
