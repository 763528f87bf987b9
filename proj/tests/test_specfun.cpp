#include "doctest.h"

#include <cmath>
#include <complex>

#include "lsmkit/geometry.hpp"
#include "lsmkit/specfun.hpp"
#include "oracle_bessel.hpp"

using namespace lsm;
namespace sf = lsm::specfun;

TEST_SUITE_BEGIN("specfun");

// Values frozen from the long-double series oracle (oracle_bessel.cpp).
static constexpr double kJ0_1 = 0.7651976865579666;
static constexpr double kJ1_1 = 0.4400505857449335;
static constexpr double kY0_1 = 0.0882569642156770;
static constexpr double kY1_1 = -0.7812128213002887;

static bool near(double a, double b, double tol) { return std::abs(a - b) < tol; }

TEST_CASE("oracle routes agree with each other on the overlap window") {
    // Validates the oracle itself: series route vs integral route.
    for (double x = 5.0; x <= 9.0; x += 0.5) {
        for (int n : {0, 1}) {
            CHECK(near(oracle::bessel_j_series(n, x), oracle::bessel_j_integral(n, x), 1e-11));
        }
        CHECK(near(oracle::bessel_y0_series(x), oracle::bessel_y_integral(0, x), 1e-11));
        CHECK(near(oracle::bessel_y1_series(x), oracle::bessel_y_integral(1, x), 1e-11));
    }
}

TEST_CASE("oracle reproduces the frozen x=1 values") {
    CHECK(near(oracle::bessel_j_series(0, 1.0), kJ0_1, 1e-13));
    CHECK(near(oracle::bessel_j_series(1, 1.0), kJ1_1, 1e-13));
    CHECK(near(oracle::bessel_y0_series(1.0), kY0_1, 1e-13));
    CHECK(near(oracle::bessel_y1_series(1.0), kY1_1, 1e-13));
}

TEST_CASE("bessel_j small-argument limit and x=1 values") {
    CHECK(near(sf::bessel_j(0, 1e-8), 1.0, 1e-12));
    CHECK(near(sf::bessel_j(0, 1.0), kJ0_1, 1e-10));
    CHECK(near(sf::bessel_j(1, 1.0), kJ1_1, 1e-10));
}

TEST_CASE("bessel_y x=1 values") {
    CHECK(near(sf::bessel_y(0, 1.0), kY0_1, 1e-10));
    CHECK(near(sf::bessel_y(1, 1.0), kY1_1, 1e-10));
}

TEST_CASE("wronskian identity at x=2.5") {
    const double x = 2.5;
    const double w = sf::bessel_j(1, x) * sf::bessel_y(0, x) - sf::bessel_j(0, x) * sf::bessel_y(1, x);
    CHECK(near(w, 2.0 / (kPi * x), 1e-10));
}

TEST_CASE("hankel2 composes J - iY") {
    const auto h0 = sf::hankel2(0, 1.0);
    CHECK(near(h0.real(), kJ0_1, 1e-10));
    CHECK(near(h0.imag(), -kY0_1, 1e-10));
    const auto h1 = sf::hankel2(1, 1.0);
    CHECK(near(h1.real(), kJ1_1, 1e-10));
    CHECK(near(h1.imag(), -kY1_1, 1e-10)); // -Y1 = +0.78121...
}

TEST_CASE("hankel2 asymptotic magnitude at x=50") {
    const double mag = std::abs(sf::hankel2(0, 50.0));
    const double expected = std::sqrt(2.0 / (kPi * 50.0));
    CHECK(std::abs(mag - expected) / expected < 0.01);
}

TEST_CASE("wronskian holds across orders and arguments") {
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0}) {
        for (int n = 0; n <= 5; ++n) {
            const double w = sf::bessel_j(n + 1, x) * sf::bessel_y(n, x) -
                             sf::bessel_j(n, x) * sf::bessel_y(n + 1, x);
            CHECK(near(w, 2.0 / (kPi * x), 1e-9));
        }
    }
}

TEST_CASE("three-term recurrence consistency for J") {
    for (double x : {1.0, 2.5, 7.0, 13.0, 24.0, 41.0, 60.0}) {
        for (int n = 1; n <= 50; ++n) {
            const double lhs = sf::bessel_j(n - 1, x) + sf::bessel_j(n + 1, x);
            const double rhs = (2.0 * n / x) * sf::bessel_j(n, x);
            const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
            CHECK(std::abs(lhs - rhs) / scale < 1e-8);
        }
    }
}

TEST_CASE("agreement with the series oracle for n in {0,1}, x <= 10") {
    for (double x = 0.05; x <= 10.0; x += 0.07) {
        for (int n : {0, 1}) {
            CHECK(near(sf::bessel_j(n, x), oracle::bessel_j_series(n, x), 1e-9));
        }
        CHECK(near(sf::bessel_y(0, x), oracle::bessel_y0_series(x), 1e-9));
        CHECK(near(sf::bessel_y(1, x), oracle::bessel_y1_series(x), 1e-9));
    }
}

TEST_CASE("agreement with the integral oracle on both sides of the split") {
    for (double x : {9.5, 11.0, 11.9, 12.1, 14.0, 25.0, 47.0, 60.0}) {
        for (int n : {0, 1}) {
            CHECK(near(sf::bessel_j(n, x), oracle::bessel_j_integral(n, x), 1e-9));
            CHECK(near(sf::bessel_y(n, x), oracle::bessel_y_integral(n, x), 1e-9));
        }
    }
}

TEST_CASE("higher-order J against the oracle series") {
    for (int n : {2, 5, 11, 20}) {
        for (double x : {0.5, 2.0, 6.0, 9.0}) {
            CHECK(near(sf::bessel_j(n, x), oracle::bessel_j_series(n, x), 1e-10));
        }
    }
}

TEST_CASE("domain errors, never NaN") {
    CHECK_THROWS_AS(sf::bessel_j(0, 0.0), std::domain_error);
    CHECK_THROWS_AS(sf::bessel_j(0, -1.0), std::domain_error);
    CHECK_THROWS_AS(sf::bessel_y(1, -0.5), std::domain_error);
    CHECK_THROWS_AS(sf::bessel_j(-1, 1.0), std::domain_error);
    CHECK_THROWS_AS(sf::bessel_j(201, 1.0), std::domain_error);
    CHECK(std::isfinite(sf::bessel_y(0, 1e-12)));
    CHECK(std::isfinite(sf::bessel_y(1, 1e-12)));
    CHECK(near(sf::bessel_j(0, 1e-12), 1.0, 1e-14));
}

TEST_CASE("derivative helpers match the recurrence form") {
    const double x = 3.7;
    CHECK(near(sf::bessel_j_prime(0, x), -sf::bessel_j(1, x), 1e-12));
    CHECK(near(sf::bessel_j_prime(3, x), sf::bessel_j(2, x) - 3.0 / x * sf::bessel_j(3, x), 1e-12));
    const auto hp = sf::hankel2_prime(2, x);
    const auto expect = sf::hankel2(1, x) - 2.0 / x * sf::hankel2(2, x);
    CHECK(std::abs(hp - expect) < 1e-12);
}

TEST_SUITE_END();
