#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "corram/core.hpp"
#include "support.hpp"

using namespace corram;
using Catch::Approx;

TEST_CASE("ramsey protocol derived quantities") {
  const auto p = make_ramsey_protocol(0.5, 0.5, 10);
  CHECK(p.tilde_tau() == 1.0);
  CHECK(p.total_time() == 10.0);
  CHECK(p.start_time(0) == 0.0);
  CHECK(p.start_time(3) == 3.0);

  const auto single = make_ramsey_protocol(0.5, 0.0, 1);
  CHECK(single.tilde_tau() == 0.5);
  CHECK(single.total_time() == 0.5);
  CHECK(single.start_time(0) == 0.0);
}

TEST_CASE("ramsey protocol validation names the offending field") {
  CHECK_THROWS_WITH(make_ramsey_protocol(-1.0, 0.0, 1), "tau_r must be positive");
  CHECK_THROWS_WITH(make_ramsey_protocol(0.5, -0.1, 1), "tau_o must be non-negative");
  CHECK_THROWS_WITH(make_ramsey_protocol(0.5, 0.0, 0), "n must be at least 1");
}

TEST_CASE("dd protocol geometry") {
  const auto hahn = make_dd_protocol(1, 1.0);
  CHECK(hahn.total_time() == 1.0);
  CHECK(hahn.pulse_time(0) == 0.5);
  CHECK(hahn.omega_dd() == Approx(pi));

  const auto train = make_dd_protocol(8, 0.25);
  CHECK(train.total_time() == 2.0);
  CHECK(train.pulse_time(0) == 0.125);
  CHECK(train.pulse_time(1) == 0.375);
  CHECK(train.pulse_time(7) == 1.875);

  const auto pair = make_dd_protocol(2, 1.0);
  CHECK(pair.pulse_time(0) == 0.5);
  CHECK(pair.pulse_time(1) == 1.5);

  CHECK_THROWS_AS(make_dd_protocol(0, 1.0), validation_error);
  CHECK_THROWS_AS(make_dd_protocol(2, 0.0), validation_error);
}

TEST_CASE("response function values") {
  const auto ramsey = make_ramsey_protocol(1.0, 0.0, 1);
  CHECK(response_function(ramsey, 0.3) == 1);
  CHECK(response_function(ramsey, 1.0) == 1);
  CHECK(response_function(ramsey, 1.5) == 0);
  CHECK(response_function(ramsey, -0.1) == 0);

  const auto hahn = make_dd_protocol(1, 1.0);
  CHECK(response_function(hahn, 0.25) == 1);
  CHECK(response_function(hahn, 0.75) == -1);

  const auto pair = make_dd_protocol(2, 1.0);
  CHECK(response_function(pair, 1.0) == -1);
  CHECK(response_function(pair, 1.8) == 1);
  CHECK(response_function(pair, 2.5) == 0);
}

TEST_CASE("breakpoint table matches the direct evaluation") {
  for (int trial = 0; trial < 50; ++trial) {
    const long long m = 1 + (rng::at(21, 2 * trial) % 12);
    const double tau = test_support::uniform(21, 2 * trial + 1, 0.05, 3.0);
    const auto dd = make_dd_protocol(m, tau);
    const auto rf = response_function(dd);
    REQUIRE(rf.values.size() == static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= 200; ++i) {
      const double t = dd.total_time() * i / 200.0;
      CHECK(rf.value_at(t) == response_function(dd, t));
    }
  }
}

TEST_CASE("pulse count equals sign changes of the response function") {
  for (long long m : {1LL, 2LL, 5LL, 9LL, 16LL}) {
    const auto rf = response_function(make_dd_protocol(m, 0.7));
    long long changes = 0;
    for (std::size_t i = 1; i < rf.values.size(); ++i) {
      if (rf.values[i] != rf.values[i - 1]) ++changes;
    }
    CHECK(changes == m);
  }
}

TEST_CASE("signed interval lengths cancel for every pulse count") {
  for (long long m : {1LL, 2LL, 3LL, 4LL, 8LL, 15LL}) {
    const auto rf = response_function(make_dd_protocol(m, 0.9));
    double integral = 0.0;
    for (std::size_t i = 0; i < rf.values.size(); ++i) {
      integral += rf.values[i] * (rf.breakpoints[i + 1] - rf.breakpoints[i]);
    }
    CHECK(integral == Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("coherence time scaling") {
  CHECK(coherence_time(make_noise(1.0, 1.0), 8) == Approx(8.0));
  CHECK(coherence_time(make_noise(1.0, 0.8), 1) == Approx(1.0));
  CHECK(coherence_time(make_noise(1.0, 1.0, std::nullopt, 5.0), 8) == Approx(5.0));
  CHECK(coherence_time(make_noise(1.0, 1.0, 30.0), 1) == Approx(30.0));
}

TEST_CASE("coherence time is non-decreasing in the pulse count") {
  for (double p : {0.0, 0.5, 0.8, 1.0}) {
    const auto noise = make_noise(2.0, p);
    double last = 0.0;
    for (long long m = 1; m <= 64; m *= 2) {
      const double t2 = coherence_time(noise, m);
      CHECK(t2 >= last);
      last = t2;
    }
    CHECK(coherence_time(noise, 1) == Approx(2.0));
  }
}

TEST_CASE("noise model validation") {
  CHECK_THROWS_AS(make_noise(0.0), validation_error);
  CHECK_THROWS_AS(make_noise(1.0, -0.1), validation_error);
  CHECK_THROWS_AS(make_noise(1.0, 1.0, 0.5), validation_error);  // t2_base < t2_star
  CHECK_THROWS_AS(make_noise(1.0, 1.0, std::nullopt, -1.0), validation_error);
}

TEST_CASE("signal phase is normalized") {
  CHECK(make_signal(1.0, 1.0, -0.25 * pi).phi == Approx(1.75 * pi));
  CHECK(make_signal(1.0, 1.0, 2.5 * pi).phi == Approx(0.5 * pi));
  CHECK_THROWS_AS(make_signal(-1.0, 1.0, 0.0), validation_error);
  CHECK_THROWS_AS(make_signal(1.0, -1.0, 0.0), validation_error);
}
