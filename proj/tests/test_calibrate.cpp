#include "pathscan/calibration.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "pathscan/normal.hpp"

using namespace pathscan;

TEST_CASE("pt endpoints and the quantile anchor", "[calibrate]") {
    CHECK(pt(0.0) == 0.0);
    CHECK(pt(40.0) == 1.0);
    CHECK(pt(6.0) < 1.0);
    // p_t = 1/2 exactly when t is the upper quartile of the normal.
    CHECK(pt(norm_quantile(0.75)) == Catch::Approx(0.5).margin(1e-12));
    // Tiny thresholds keep relative precision: p_t ~ t * sqrt(2/pi).
    const double tiny = 1e-12;
    CHECK(pt(tiny) ==
          Catch::Approx(tiny * std::sqrt(2.0 / std::acos(-1.0))).epsilon(1e-9));
    CHECK_THROWS_AS(pt(-0.1), std::domain_error);
}

TEST_CASE("h values and domain", "[calibrate]") {
    CHECK(h(1.0) == 0.0);
    CHECK(h(2.0) == Catch::Approx(0.30685281944005469).margin(1e-15));
    CHECK(h(0.1) == Catch::Approx(1.40258509299404568).margin(1e-14));
    CHECK_THROWS_AS(h(0.0), std::domain_error);
    CHECK_THROWS_AS(h(-1.0), std::domain_error);
    // Strictly decreasing on (0,1).
    CHECK(h(0.2) > h(0.4));
    CHECK(h(0.4) > h(0.9));
}

TEST_CASE("calibrate satisfies its defining equation", "[calibrate]") {
    struct Case {
        int k;
        double log_card;
    };
    for (const Case c : {Case{20, 17.9}, Case{100, 60.0}, Case{1000, 10.0}}) {
        const double t = calibrate(c.k, c.log_card);
        const double target = std::max(8.0 * c.log_card / c.k, 1.0);
        CHECK(h(2.0 * pt(t)) == Catch::Approx(target).margin(1e-8));
        CHECK(pt(t) < 0.5);
        CHECK(t > 0.0);
    }
}

TEST_CASE("calibrate reproduces independently computed roots", "[calibrate]") {
    // Root-finding oracle values for h(2 p_t) = max(8 L / k, 1).
    CHECK(calibrate(20, 17.9) ==
          Catch::Approx(1.7918892202e-04).epsilon(1e-9));
    CHECK(calibrate(100, 60.0) ==
          Catch::Approx(1.9030099508e-03).epsilon(1e-9));
    // Target floor case 8L/k <= 1: x solves h(x) = 1 with x < 1,
    // x = 0.15859433956303936, hence t = PhiInv((2+x)/4).
    const double t_floor = calibrate(1000, 10.0);
    CHECK(t_floor == Catch::Approx(0.09954843885910286).epsilon(1e-10));
    CHECK(2.0 * pt(t_floor) ==
          Catch::Approx(0.15859433956303936).epsilon(1e-9));
    CHECK(t_floor ==
          Catch::Approx(norm_quantile((2.0 + 0.15859433956303936) / 4.0))
              .epsilon(1e-9));
}

TEST_CASE("calibrate at the scan sweep sizes", "[calibrate]") {
    // Oriented known-start classes on the d=3 torus: log|C| = (k-1) log 3.
    const double t32 = calibrate(32, 31.0 * std::log(3.0));
    const double t64 = calibrate(64, 63.0 * std::log(3.0));
    CHECK(t32 == Catch::Approx(4.62463847e-05).epsilon(1e-8));
    CHECK(t64 == Catch::Approx(4.03119232e-05).epsilon(1e-8));
    // Larger per-increment budget target at k=64 pushes the threshold down.
    CHECK(t64 < t32);
}

TEST_CASE("calibrate is monotone in k at fixed class size", "[calibrate]") {
    const double L = 25.0;
    double prev = 0.0;
    for (int k : {8, 16, 32, 64, 128, 256}) {
        const double t = calibrate(k, L);
        CHECK(t > prev);
        prev = t;
    }
}

TEST_CASE("calibrate validates its inputs", "[calibrate]") {
    CHECK_THROWS_AS(calibrate(1, 5.0), std::domain_error);
    CHECK_THROWS_AS(calibrate(10, -0.5), std::domain_error);
    CHECK_NOTHROW(calibrate(2, 0.0));
}

TEST_CASE("psi_min anchors and arithmetic", "[calibrate]") {
    const double q = norm_quantile(0.8);
    CHECK(q == Catch::Approx(0.8416212335729142).margin(1e-13));
    CHECK(psi_min(q) == Catch::Approx(0.0).margin(1e-14));
    CHECK(psi_min(2.0 * q) == Catch::Approx(-3.0).margin(1e-12));
    CHECK(psi_min(0.5) == Catch::Approx(0.6470553193953633).margin(1e-12));
    CHECK_THROWS_AS(psi_min(0.0), std::domain_error);
    CHECK_THROWS_AS(psi_min(-1.0), std::domain_error);
}

TEST_CASE("psi_min at calibrated thresholds sits just below one", "[calibrate]") {
    // The sweep-scale thresholds are tiny, so the covered psi region is
    // essentially all of (psi_min, 1) with 1 - psi_min of order 1e-9.
    const double t32 = calibrate(32, 31.0 * std::log(3.0));
    const double t64 = calibrate(64, 63.0 * std::log(3.0));
    CHECK(1.0 - psi_min(t32) == Catch::Approx(3.019411e-09).epsilon(1e-5));
    CHECK(1.0 - psi_min(t64) == Catch::Approx(2.294213e-09).epsilon(1e-5));
}
