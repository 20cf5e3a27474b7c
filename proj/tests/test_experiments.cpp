#include <cmath>
#include <sstream>

#include <doctest.h>

#include "mlwin/error.hpp"
#include "mlwin/experiments.hpp"
#include "mlwin/mp_transform.hpp"

using namespace mlwin;

TEST_CASE("latency table rows") {
  const auto rows = latency_table();
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].t_l == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::abs(rows[1].t_l - 0.331) < 0.005);
  CHECK(std::abs(rows[2].t_l - 0.285) < 0.005);
  CHECK(rows[3].n == 240);
  for (const auto& r : rows) {
    CHECK(r.t_o == doctest::Approx(1.0));
    CHECK(r.t_o - r.t_e == doctest::Approx(r.t_l));
  }
  std::ostringstream o;
  write_latency_table(o, rows);
  CHECK(o.str().find("epsilon") != std::string::npos);
}

TEST_CASE("alpha sweep: envelope and minimum") {
  const auto s = sweep_alpha(65, 0.01);
  CHECK(std::abs(s.alpha_opt - 0.30) <= 0.01);
  for (const auto& p : s.curve) {
    REQUIRE(p.latency.has_value());
    CHECK(*p.latency >= 0.25);
    CHECK(*p.latency <= 0.5 + 1e-9);
  }
  // Hamming is on the circle: no latency change.
  const double ham[] = {0.54, 0.46};
  const Window w = make_cosine_window(ham, 65, 1.0);
  CHECK(intrinsic_latency(eps_mp_transform(w)) / w.duration() == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("ridge_lead recovers a known shift") {
  std::vector<RidgePoint> ref, lead;
  const double hop = 0.05, shift = 0.73;
  for (int i = 0; i < 600; ++i) {
    const double t = i * hop;
    ref.push_back({t, 2.0 - std::sin(M_PI * t / 15.0), true});
    lead.push_back({t, 2.0 - std::sin(M_PI * (t + shift) / 15.0), true});
  }
  std::size_t used = 0;
  const double got = ridge_lead(ref, lead, 2.0, 6.0, 24.0, &used);
  CHECK(std::abs(got - shift) < 0.2 * hop);
  CHECK(used > 300);
  for (std::size_t i = 0; i < lead.size(); i += 2) lead[i].valid = false;
  CHECK_THROWS_AS(ridge_lead(ref, lead, 2.0, 6.0, 24.0), Error);
}

TEST_CASE("benchmark rows are deterministic and carry their parameters") {
  BenchmarkSettings s;
  s.lengths_ms = {20};
  s.features = {OnsetFeature::stft};
  s.n_events = 10;
  const auto fams = benchmark_families();
  const std::vector<WindowFamily> two = {fams[0], fams[2]};
  const auto a = onset_benchmark(two, 3, s);
  const auto b = onset_benchmark(two, 3, s);
  REQUIRE(a.size() == 4);  // two windows, clean and noisy
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].eval.f_score == b[i].eval.f_score);
    CHECK(a[i].n == 110);
    CHECK(a[i].latency_ms > 0);
  }
  std::ostringstream o;
  write_benchmark(o, a);
  CHECK(o.str().find("noisy") != std::string::npos);
}
