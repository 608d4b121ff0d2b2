#include "pathscan/stats.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

using namespace pathscan;

TEST_CASE("Wilson interval matches a hand-computed reference", "[stats]") {
    // Reference values computed from the closed form with z = 1.959963984540054.
    Interval a = wilson_interval(3, 50);
    CHECK(a.lo == Catch::Approx(0.020614970348973955).margin(1e-15));
    CHECK(a.hi == Catch::Approx(0.16217091688838171).margin(1e-15));

    Interval none = wilson_interval(0, 200);
    CHECK(none.lo == 0.0);
    CHECK(none.hi == Catch::Approx(0.018845326377266573).margin(1e-15));

    Interval all = wilson_interval(50, 50);
    CHECK(all.lo == Catch::Approx(0.92865240086664129).margin(1e-14));
    CHECK(all.hi == 1.0);

    // The interval always brackets the raw proportion.
    for (int n : {1, 7, 100}) {
        for (int s = 0; s <= n; s += (n > 10 ? 13 : 1)) {
            Interval w = wilson_interval(s, n);
            const double p = static_cast<double>(s) / n;
            CHECK(w.lo <= p);
            CHECK(w.hi >= p);
            CHECK(w.lo >= 0.0);
            CHECK(w.hi <= 1.0);
        }
    }

    CHECK_THROWS_AS(wilson_interval(1, 0), std::domain_error);
    CHECK_THROWS_AS(wilson_interval(5, 4), std::domain_error);
}

TEST_CASE("mean_of and bootstrap behave like textbook estimators", "[stats]") {
    std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    CHECK(mean_of(xs) == Catch::Approx(2.5).margin(1e-15));

    CHECK_THROWS_AS(mean_of(std::vector<double>{}), std::domain_error);

    // Bootstrap: deterministic given the seed, near-degenerate on a
    // constant sample, and its interval covers the plug-in mean.
    std::vector<double> constant(64, 3.25);
    MeanEstimate c = bootstrap_mean(constant, 9, 500);
    CHECK(c.mean == Catch::Approx(3.25).margin(1e-15));
    CHECK(c.ci.lo == Catch::Approx(3.25).margin(1e-12));
    CHECK(c.ci.hi == Catch::Approx(3.25).margin(1e-12));

    std::vector<double> mixed;
    for (int i = 0; i < 200; ++i) mixed.push_back((i % 7) * 0.5);
    MeanEstimate b1 = bootstrap_mean(mixed, 12345, 1000);
    MeanEstimate b2 = bootstrap_mean(mixed, 12345, 1000);
    CHECK(b1.ci.lo == b2.ci.lo);
    CHECK(b1.ci.hi == b2.ci.hi);
    CHECK(b1.ci.lo <= b1.mean);
    CHECK(b1.ci.hi >= b1.mean);
    CHECK(b1.ci.hi - b1.ci.lo < 1.0);

    MeanEstimate other = bootstrap_mean(mixed, 54321, 1000);
    CHECK(other.ci.lo != b1.ci.lo);  // different seed, different resamples

    CHECK_THROWS_AS(bootstrap_mean(std::vector<double>{1.0}, 1, 500),
                    std::domain_error);
    CHECK_THROWS_AS(bootstrap_mean(mixed, 1, 99), std::domain_error);
}

TEST_CASE("top-decile dominance flags concentrated mass only", "[stats]") {
    // 100 ones: top decile holds 10% of the mass.
    std::vector<double> flat(100, 1.0);
    CHECK_FALSE(top_decile_dominates(flat));

    // One enormous value among small ones: top decile holds nearly all.
    std::vector<double> spiked(100, 1.0);
    spiked[37] = 1e6;
    CHECK(top_decile_dominates(spiked));

    CHECK_THROWS_AS(top_decile_dominates(std::vector<double>{}),
                    std::domain_error);
    CHECK_FALSE(top_decile_dominates(std::vector<double>(10, 0.0)));
}
