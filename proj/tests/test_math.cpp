#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "corram/math.hpp"
#include "support.hpp"

using namespace corram;
using Catch::Approx;

TEST_CASE("sinc basics") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(sinc(pi) == Approx(0.0).margin(1e-15));
  CHECK(sinc(0.5) == Approx(std::sin(0.5) / 0.5).epsilon(1e-15));
}

TEST_CASE("sinc is continuous across the series switch") {
  for (double x : {1e-4, 1e-3}) {
    const double below = sinc(x * (1.0 - 1e-9));
    const double above = sinc(x * (1.0 + 1e-9));
    CHECK(std::abs(below - above) < 1e-14);
  }
}

TEST_CASE("sinc_prime matches finite differences") {
  for (double x : {1e-6, 1e-4, 5e-4, 1e-3, 0.3, 2.0, 10.0}) {
    const double fd = test_support::richardson_derivative([](double v) { return sinc(v); },
                                                          x, 1e-4);
    CHECK(sinc_prime(x) == Approx(fd).margin(1e-10));
  }
}

TEST_CASE("dirichlet ratio agrees with the naive quotient away from zeros") {
  for (int i = 0; i < 200; ++i) {
    const double r = test_support::uniform(3, 2 * i, 0.2, 1.3);
    const long long m = 1 + (rng::at(3, 2 * i + 1) % 16);
    const double naive = std::sin(m * r) / std::sin(r);
    CHECK(detail::dirichlet_ratio(m, r) == Approx(naive).margin(1e-12));
  }
}

TEST_CASE("dirichlet ratio limit at r = 0") {
  CHECK(detail::dirichlet_ratio(7, 0.0) == 7.0);
  CHECK(detail::dirichlet_ratio(7, 1e-12) == Approx(7.0).epsilon(1e-10));
}

TEST_CASE("dirichlet ratio derivative matches finite differences near zero") {
  for (long long m : {1LL, 2LL, 5LL, 16LL}) {
    for (double r : {1e-7, 1e-5, 1e-3, 0.05, 0.4}) {
      const double fd = test_support::richardson_derivative(
          [m](double v) { return detail::dirichlet_ratio(m, v); }, r, 1e-5);
      const double an = detail::dirichlet_ratio_prime(m, r);
      CHECK(an == Approx(fd).margin(1e-7 * (1.0 + std::abs(fd))));
    }
    CHECK(detail::dirichlet_ratio_prime(m, 0.0) == 0.0);
  }
}

TEST_CASE("angle reduction keeps |r| small and reconstructs v") {
  for (int i = 0; i < 300; ++i) {
    const double v = test_support::uniform(9, i, 0.0, 40.0);
    const auto red = detail::reduce_pi_multiple(v);
    CHECK(std::abs(red.r) <= 0.5 * pi + 1e-12);
    CHECK(red.k * pi + red.r == Approx(v).margin(1e-12));
  }
}

TEST_CASE("adaptive quadrature integrates oscillatory cosines") {
  const double value = integrate([](double t) { return std::cos(7.3 * t + 0.4); }, 0.0, 2.5);
  const double exact = (std::sin(7.3 * 2.5 + 0.4) - std::sin(0.4)) / 7.3;
  CHECK(value == Approx(exact).margin(1e-13));
}

TEST_CASE("golden section finds a quadratic maximum") {
  const double x = golden_section_max([](double v) { return -(v - 1.7) * (v - 1.7); },
                                      0.0, 3.0);
  CHECK(x == Approx(1.7).margin(1e-9));
}
