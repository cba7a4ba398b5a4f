#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "corram/phase.hpp"
#include "support.hpp"

using namespace corram;
using Catch::Approx;

TEST_CASE("ramsey phase closed form") {
  CHECK(ramsey_phase({0.0, 1.0, 0.0}, 1.0) == Approx(1.0));
  CHECK(ramsey_phase({2.0 * pi, 1.0, 1.3}, 1.0) == Approx(0.0).margin(1e-15));
  CHECK(ramsey_phase({pi, 1.0, 0.0}, 0.5) == Approx(1.0 / pi).epsilon(1e-14));
}

TEST_CASE("dd phase closed form") {
  CHECK(dd_phase({0.0, 0.8, 1.1}, make_dd_protocol(5, 0.7)) == Approx(0.0).margin(1e-15));
  CHECK(dd_phase({pi, 1.0, 0.0}, make_dd_protocol(1, 1.0)) == Approx(2.0 / pi).epsilon(1e-12));
  // frozen from the quadrature oracle
  CHECK(dd_phase({0.5 * pi, 1.0, 0.5 * pi}, make_dd_protocol(2, 1.0)) ==
        Approx(0.52739308757904946).epsilon(1e-12));
}

TEST_CASE("dd detuned closed form") {
  const auto hahn = make_dd_protocol(1, 1.0);
  CHECK(dd_phase_detuned({pi, 1.0, 0.0}, hahn, 0.0) == Approx(2.0 / pi));
  // sinc zero: m*delta*tau/2 = pi
  const auto train = make_dd_protocol(4, 1.0);
  CHECK(dd_phase_detuned({pi + 0.5 * pi, 1.0, 0.9}, train, 0.5 * pi) ==
        Approx(0.0).margin(1e-15));
  CHECK(dd_phase_detuned({pi, 1.0, 0.5 * pi}, train, 0.0) == Approx(0.0).margin(1e-15));
}

TEST_CASE("closed forms match the quadrature oracle") {
  CHECK(std::abs(ramsey_phase({pi, 1.0, 0.0}, 0.5) -
                 phase_quadrature_oracle({pi, 1.0, 0.0}, make_ramsey_protocol(0.5, 0.0, 1)))
        < 1e-10);
  const SignalParams s{2.5, 0.7, 1.1};
  const auto dd = make_dd_protocol(8, 0.3);
  CHECK(std::abs(dd_phase(s, dd) - phase_quadrature_oracle(s, dd)) < 1e-10);
  CHECK(phase_quadrature_oracle({1.0, 0.0, 0.3}, dd) == 0.0);
}

TEST_CASE("oracle equivalence over random configurations") {
  for (int i = 0; i < 250; ++i) {
    const double omega = test_support::uniform(31, 8 * i, 0.0, 4.0 * pi);
    const double phi = test_support::uniform(31, 8 * i + 1, 0.0, 2.0 * pi);
    const double xi = test_support::uniform(31, 8 * i + 2, 0.0, 5.0);
    const SignalParams s{omega, xi, phi};

    const double tau_r = test_support::uniform(31, 8 * i + 3, 0.05, 5.0);
    const double closed_r = ramsey_phase(s, tau_r);
    const double oracle_r = phase_quadrature_oracle(s, make_ramsey_protocol(tau_r, 0.0, 1));
    CHECK(std::abs(closed_r - oracle_r) <=
          1e-9 * (1.0 + std::max(std::abs(closed_r), std::abs(oracle_r))));

    const long long m = 1 + (rng::at(31, 8 * i + 4) % 16);
    const double tau = test_support::uniform(31, 8 * i + 5, 0.05, 5.0);
    const auto dd = make_dd_protocol(m, tau);
    const double closed_d = dd_phase(s, dd);
    const double oracle_d = phase_quadrature_oracle(s, dd);
    CHECK(std::abs(closed_d - oracle_d) <=
          1e-9 * (1.0 + std::max(std::abs(closed_d), std::abs(oracle_d))));
  }
}

TEST_CASE("phase is linear in the amplitude") {
  for (int i = 0; i < 50; ++i) {
    const double omega = test_support::uniform(37, 4 * i, 0.0, 10.0);
    const double phi = test_support::uniform(37, 4 * i + 1, 0.0, 2.0 * pi);
    const double xi = test_support::uniform(37, 4 * i + 2, 0.1, 5.0);
    const double tau = test_support::uniform(37, 4 * i + 3, 0.1, 3.0);
    CHECK(ramsey_phase({omega, xi, phi}, 0.8) ==
          Approx(xi * ramsey_phase({omega, 1.0, phi}, 0.8)).margin(1e-12));
    const auto dd = make_dd_protocol(4, tau);
    CHECK(dd_phase({omega, xi, phi}, dd) ==
          Approx(xi * dd_phase({omega, 1.0, phi}, dd)).margin(1e-12));
  }
}

TEST_CASE("time tag shifts the phase like an extra initial phase") {
  for (int i = 0; i < 50; ++i) {
    const double omega = test_support::uniform(41, 3 * i, 0.0, 6.0);
    const double phi = test_support::uniform(41, 3 * i + 1, 0.0, 2.0 * pi);
    const double t_start = test_support::uniform(41, 3 * i + 2, 0.0, 50.0);
    const double tagged = ramsey_phase({omega, 1.3, phi}, 0.7, t_start);
    const double shifted = ramsey_phase({omega, 1.3, phi + omega * t_start}, 0.7, 0.0);
    CHECK(tagged == Approx(shifted).margin(1e-9));
  }
}

TEST_CASE("dd phase rejects static signals") {
  for (long long m : {1LL, 2LL, 7LL, 16LL}) {
    const auto dd = make_dd_protocol(m, 1.3);
    double last = 1.0;
    for (double omega : {1e-2, 1e-4, 1e-6, 1e-8}) {
      const double value = std::abs(dd_phase({omega, 1.0, 0.9}, dd));
      CHECK(value < last + 1e-15);
      last = value;
    }
    CHECK(std::abs(dd_phase({1e-8, 1.0, 0.9}, dd)) < 1e-7);
  }
}

TEST_CASE("detuned approximation converges to the exact phase") {
  for (long long m : {1LL, 2LL, 8LL, 16LL}) {
    const double tau = 0.8;
    const auto dd = make_dd_protocol(m, tau);
    double last = 1.0;
    for (double x : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const double delta = x / (m * tau);
      const SignalParams s{pi / tau + delta, 1.0, 0.4};
      const double rel = std::abs(dd_phase(s, dd) - dd_phase_detuned(s, dd, delta)) /
                         std::abs(dd_phase(s, dd));
      CHECK(rel < last);
      last = rel;
    }
    CHECK(last < 2e-6);
  }
}

TEST_CASE("dd phase is continuous through the matched point") {
  for (long long m : {1LL, 3LL, 8LL}) {
    for (double tau : {0.3, 1.0, 2.7}) {
      const auto dd = make_dd_protocol(m, tau);
      const double w0 = pi / tau;
      const double ref = dd_phase({w0, 1.0, 0.3}, dd);
      for (double eps : {1e-13, 1e-12}) {
        for (double sign : {-1.0, 1.0}) {
          const double value = dd_phase({w0 * (1.0 + sign * eps), 1.0, 0.3}, dd);
          CHECK(std::abs(value - ref) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("filter function closed form and phase-average identity") {
  CHECK(ramsey_filter_function(0.0, 1.0, 1.0) == Approx(0.5));
  CHECK(ramsey_filter_function(2.0 * pi, 1.0, 1.0) == Approx(0.0).margin(1e-15));

  for (const auto& [omega, xi, tau_r] :
       {std::tuple{0.7, 1.0, 1.0}, std::tuple{3.1, 2.5, 0.4}, std::tuple{0.0, 0.5, 2.0}}) {
    double mean_sq = 0.0;
    for (int g = 0; g < 256; ++g) {
      const double phi = 2.0 * pi * g / 256.0;
      const double p = ramsey_phase({omega, xi, phi}, tau_r);
      mean_sq += p * p;
    }
    mean_sq /= 256.0;
    CHECK(mean_sq == Approx(ramsey_filter_function(omega, xi, tau_r)).margin(1e-9));
  }
}

TEST_CASE("most sensitive frequency") {
  CHECK(ramsey_max_frequency(0.0, 1.0).omega == 0.0);
  CHECK(ramsey_max_frequency(pi, 1.0).omega == 0.0);

  const auto result = ramsey_max_frequency(-0.25 * pi, 1.0);
  REQUIRE(result.omega > 0.0);
  CHECK_FALSE(result.at_boundary);

  // dense-grid argmax of |phase| as an independent check
  double best_w = 0.0, best_v = std::abs(ramsey_phase({0.0, 1.0, -0.25 * pi}, 1.0));
  for (int i = 1; i <= 2000000; ++i) {
    const double w = 2.0 * pi * i / 1000000.0;
    const double v = std::abs(ramsey_phase({w, 1.0, -0.25 * pi}, 1.0));
    if (v > best_v) { best_v = v; best_w = w; }
  }
  CHECK(result.omega == Approx(best_w).margin(1e-6));

  // the maximizer satisfies the transcendental stationarity identity
  const double wt = result.omega * 1.0;
  const double phi = -0.25 * pi;
  const double residual = wt - std::tan(wt + phi) + std::sin(phi) / std::cos(wt + phi);
  CHECK(std::abs(residual) < 1e-6);
}

TEST_CASE("survival probability") {
  CHECK(survival_probability(0.0, 0.0, 1.0) == 1.0);
  CHECK(survival_probability(1.234, 1e12, 1.0) == Approx(0.5).margin(1e-12));
  CHECK(survival_probability(0.0, 1.0, 1.0) ==
        Approx(0.5 * (1.0 + std::exp(-1.0))).epsilon(1e-15));
  CHECK(survival_probability(0.5 * pi, 0.7, 1.0) == Approx(0.5).margin(1e-16));
  for (int i = 0; i < 200; ++i) {
    const double phase = test_support::uniform(43, 3 * i, -30.0, 30.0);
    const double t = test_support::uniform(43, 3 * i + 1, 0.0, 10.0);
    const double ts = test_support::uniform(43, 3 * i + 2, 0.05, 10.0);
    const double p = survival_probability(phase, t, ts);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  CHECK_THROWS_AS(survival_probability(0.0, 1.0, 0.0), validation_error);
}
