#include "pathscan/ar_model.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include "pathscan/likelihood.hpp"
#include "pathscan/sample.hpp"
#include "support/dense_oracle.hpp"

using namespace pathscan;

namespace {

// Straight path of length k from the origin along axis 0.
Path straight_path(const TorusLattice& lat, int k) {
    Path p{0};
    while (static_cast<int>(p.size()) < k)
        p.push_back(lat.step(p.back(), 0, +1));
    return p;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double corr_of(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean_of(a), mb = mean_of(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("correlation model derives phi and sigma2_phi from psi", "[model]") {
    CorrelationModel m(0.5);
    CHECK(m.phi() == Catch::Approx(0.4).margin(1e-15));
    CHECK(m.sigma2_phi() == Catch::Approx(0.6).margin(1e-15));

    CorrelationModel zero(0.0);
    CHECK(zero.phi() == 0.0);
    CHECK(zero.sigma2_phi() == 1.0);

    CorrelationModel neg(-0.5);
    CHECK(neg.phi() == Catch::Approx(-0.4).margin(1e-15));
    CHECK(neg.sigma2_phi() == Catch::Approx(0.6).margin(1e-15));

    CHECK_THROWS_AS(CorrelationModel(1.0), std::domain_error);
    CHECK_THROWS_AS(CorrelationModel(-1.0), std::domain_error);
    CHECK_THROWS_AS(CorrelationModel(1.7), std::domain_error);
}

TEST_CASE("covariance entries and the k=2 inverse", "[model]") {
    ARCovariance cov(2, 0.5);
    CHECK(cov.entry(0, 0) == 1.0);
    CHECK(cov.entry(0, 1) == 0.5);
    // 2x2 inverse of [[1, psi], [psi, 1]] is [[1, -psi], [-psi, 1]]/(1-psi^2).
    const double denom = 1.0 - 0.25;
    CHECK(cov.inverse_entry(0, 0) == Catch::Approx(1.0 / denom).margin(1e-15));
    CHECK(cov.inverse_entry(1, 1) == Catch::Approx(1.0 / denom).margin(1e-15));
    CHECK(cov.inverse_entry(0, 1) == Catch::Approx(-0.5 / denom).margin(1e-15));

    CHECK_THROWS_AS(ARCovariance(1, 0.5), std::domain_error);
    CHECK_THROWS_AS(ARCovariance(4, 1.0), std::domain_error);
    CHECK_THROWS_AS(cov.entry(0, 2), std::domain_error);
}

TEST_CASE("psi = 0 collapses the covariance to the identity", "[model]") {
    ARCovariance cov(5, 0.0);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            CHECK(cov.entry(i, j) == (i == j ? 1.0 : 0.0));
            CHECK(cov.inverse_entry(i, j) == (i == j ? 1.0 : 0.0));
        }
    CHECK(cov.log_det() == 0.0);
}

TEST_CASE("closed-form inverse actually inverts the covariance", "[model]") {
    ARCovariance cov(5, 0.5);
    auto product = oracle::multiply(oracle::gamma_dense(5, 0.5), gamma_inverse(cov));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            CHECK(product[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
                  Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-10));
}

TEST_CASE("log determinant matches LU at k=4, psi=0.5", "[model]") {
    ARCovariance cov(4, 0.5);
    CHECK(cov.log_det() ==
          Catch::Approx(oracle::lu_log_det(oracle::gamma_dense(4, 0.5))).margin(1e-10));
    CHECK(cov.log_det() == Catch::Approx(3.0 * std::log(0.75)).margin(1e-14));
}

TEST_CASE("inverse and determinant sweep against the dense oracle", "[model]") {
    for (int k : {2, 3, 5, 8, 16, 33, 64}) {
        for (double psi : {0.0, 0.1, -0.1, 0.5, -0.5, 0.9, -0.9}) {
            ARCovariance cov(k, psi);
            auto dense_inv = oracle::lu_inverse(oracle::gamma_dense(k, psi));
            auto closed = cov.inverse_dense();
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j)
                    REQUIRE(closed[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
                            Catch::Approx(dense_inv[static_cast<std::size_t>(i)]
                                                   [static_cast<std::size_t>(j)])
                                .margin(1e-9));
            REQUIRE(cov.log_det() ==
                    Catch::Approx(oracle::lu_log_det(oracle::gamma_dense(k, psi)))
                        .margin(1e-9));
        }
    }
}

TEST_CASE("tridiagonal quadratic form matches the dense oracle", "[model]") {
    std::mt19937_64 gen(41);
    std::normal_distribution<double> dist;
    for (int k : {2, 3, 7, 20}) {
        for (double psi : {-0.9, -0.3, 0.2, 0.8}) {
            std::vector<double> x(static_cast<std::size_t>(k));
            for (auto& v : x) v = dist(gen);
            const double dense = oracle::quad_form(
                oracle::lu_inverse(oracle::gamma_dense(k, psi)), x);
            CHECK(quad_form_inverse(x, psi) ==
                  Catch::Approx(dense).epsilon(1e-9).margin(1e-9));
        }
    }
    CHECK_THROWS_AS(quad_form_inverse({1.0}, 0.5), std::domain_error);
}

TEST_CASE("null simulation is deterministic and reproducible", "[model]") {
    TorusLattice lat(2, 8);
    Sample a = simulate_null(lat, 99);
    Sample b = simulate_null(lat, 99);
    CHECK(a.values == b.values);
    CHECK(a.provenance == Provenance::kNull);
    CHECK(a.path.empty());
    CHECK(a.values.size() == 64);

    Sample c = simulate_null(lat, 100);
    CHECK(a.values != c.values);
    Sample d = simulate_null(lat, 99, /*trial=*/1);
    CHECK(a.values != d.values);
}

TEST_CASE("null field has standard-normal marginals and independent nodes", "[model]") {
    TorusLattice lat(1, 4);
    const int trials = 100000;
    std::vector<double> at0, at1;
    at0.reserve(trials);
    at1.reserve(trials);
    for (int t = 0; t < trials; ++t) {
        Sample s = simulate_null(lat, 7, static_cast<std::uint64_t>(t));
        at0.push_back(s.values[0]);
        at1.push_back(s.values[1]);
    }
    // 4 * 10^{-5/2} band on the mean of 1e5 standard normals (~4 sigma).
    CHECK(std::fabs(mean_of(at0)) < 4.0 * std::pow(10.0, -2.5));
    double var = 0.0;
    const double mu = mean_of(at0);
    for (double x : at0) var += (x - mu) * (x - mu);
    var /= trials;
    CHECK(var == Catch::Approx(1.0).margin(0.03));
    // Adjacent nodes are independent under the null.
    CHECK(std::fabs(corr_of(at0, at1)) < 5.0 / std::sqrt(trials));
}

TEST_CASE("psi = 0 alternative reproduces the null bit for bit", "[model]") {
    TorusLattice lat(2, 6);
    Path p = straight_path(lat, 4);
    Sample alt = simulate_alternative(lat, p, CorrelationModel(0.0), 5);
    Sample nul = simulate_null(lat, 5);
    CHECK(alt.values == nul.values);
    CHECK(alt.provenance == Provenance::kAlternative);
    CHECK(alt.path == p);
}

TEST_CASE("off-path nodes keep their null draws", "[model]") {
    TorusLattice lat(2, 6);
    Path p = straight_path(lat, 5);
    Sample alt = simulate_alternative(lat, p, CorrelationModel(0.7), 5);
    Sample nul = simulate_null(lat, 5);
    std::vector<bool> on(alt.values.size(), false);
    for (NodeId v : p) on[static_cast<std::size_t>(v)] = true;
    for (std::size_t i = 0; i < alt.values.size(); ++i)
        if (!on[i]) REQUIRE(alt.values[i] == nul.values[i]);
}

TEST_CASE("planted path carries the AR correlation structure", "[model]") {
    TorusLattice lat(2, 8);
    const double psi = 0.6;
    Path p = straight_path(lat, 5);
    const int trials = 30000;
    std::vector<double> s1, s2, s3, s4;
    for (int t = 0; t < trials; ++t) {
        Sample s = simulate_alternative(lat, p, CorrelationModel(psi), 17,
                                        static_cast<std::uint64_t>(t));
        s1.push_back(s.values[static_cast<std::size_t>(p[0])]);
        s2.push_back(s.values[static_cast<std::size_t>(p[1])]);
        s3.push_back(s.values[static_cast<std::size_t>(p[2])]);
        s4.push_back(s.values[static_cast<std::size_t>(p[3])]);
    }
    const double band1 = 5.0 * (1.0 - psi * psi) / std::sqrt(trials);
    CHECK(corr_of(s1, s2) == Catch::Approx(psi).margin(band1));
    CHECK(corr_of(s2, s3) == Catch::Approx(psi).margin(band1));
    const double rho2 = psi * psi;
    const double band2 = 5.0 * (1.0 - rho2 * rho2) / std::sqrt(trials);
    CHECK(corr_of(s1, s3) == Catch::Approx(rho2).margin(band2));
    // Stationary marginals stay standard normal along the path.
    double var = 0.0;
    const double mu = mean_of(s4);
    for (double x : s4) var += (x - mu) * (x - mu);
    var /= trials;
    CHECK(var == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("simulate_alternative validates the path", "[model]") {
    TorusLattice lat(2, 6);
    CHECK_THROWS_AS(
        simulate_alternative(lat, Path{0, 2}, CorrelationModel(0.5), 1),
        std::domain_error);
    CHECK_THROWS_AS(simulate_alternative(lat, Path{0}, CorrelationModel(0.5), 1),
                    std::domain_error);
}

TEST_CASE("log likelihood ratio: exact values and degenerate psi", "[model]") {
    CHECK(log_likelihood_ratio_values({1.0, 1.0, 1.0}, 0.5) ==
          Catch::Approx(0.9543487391184475941).margin(1e-12));
    CHECK(log_likelihood_ratio_values({0.3, -0.8, 2.1, 0.0}, 0.0) == 0.0);
    CHECK_THROWS_AS(log_likelihood_ratio_values({1.0}, 0.5), std::domain_error);
    CHECK_THROWS_AS(log_likelihood_ratio_values({1.0, 1.0}, 1.0),
                    std::domain_error);
}

TEST_CASE("log likelihood ratio matches the dense Gaussian formula", "[model]") {
    std::mt19937_64 gen(4242);
    std::normal_distribution<double> dist;
    for (int k : {2, 3, 5, 17}) {
        for (double psi : {-0.9, -0.3, 0.2, 0.8}) {
            std::vector<double> x(static_cast<std::size_t>(k));
            for (auto& v : x) v = dist(gen);
            double xtx = 0.0;
            for (double v : x) xtx += v * v;
            const double dense =
                0.5 * (xtx - oracle::quad_form(
                                 oracle::lu_inverse(oracle::gamma_dense(k, psi)), x)) -
                0.5 * oracle::lu_log_det(oracle::gamma_dense(k, psi));
            CHECK(log_likelihood_ratio_values(x, psi) ==
                  Catch::Approx(dense).epsilon(1e-10).margin(1e-10));
        }
    }
}

TEST_CASE("exp(LLR) has unit mean under the null", "[model]") {
    TorusLattice lat(2, 8);
    Path p = straight_path(lat, 6);
    CorrelationModel model(0.3);  // keeps the second moment of exp(LLR) finite
    const int trials = 20000;
    std::vector<double> ratios;
    ratios.reserve(trials);
    for (int t = 0; t < trials; ++t) {
        Sample s = simulate_null(lat, 23, static_cast<std::uint64_t>(t));
        ratios.push_back(std::exp(log_likelihood_ratio(s, p, model)));
    }
    const double mu = mean_of(ratios);
    double var = 0.0;
    for (double r : ratios) var += (r - mu) * (r - mu);
    var /= trials;
    const double se = std::sqrt(var / trials);
    CHECK(mu == Catch::Approx(1.0).margin(5.0 * se));
}

TEST_CASE("planted path scores higher than a disjoint one on average", "[model]") {
    TorusLattice lat(2, 8);
    Path planted = straight_path(lat, 5);
    Path elsewhere;  // parallel line four rows away
    elsewhere.push_back(lat.encode({4, 0}));
    for (int j = 1; j < 5; ++j)
        elsewhere.push_back(lat.step(elsewhere.back(), 0, +1));
    CorrelationModel model(0.6);
    double on = 0.0, off = 0.0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        Sample s = simulate_alternative(lat, planted, model, 31,
                                        static_cast<std::uint64_t>(t));
        on += log_likelihood_ratio(s, planted, model);
        off += log_likelihood_ratio(s, elsewhere, model);
    }
    CHECK(on / trials > off / trials + 0.5);
}

TEST_CASE("mixture ratio: identities and stability", "[model]") {
    TorusLattice lat(2, 8);
    Path a = straight_path(lat, 4);
    Path b;
    b.push_back(lat.encode({3, 0}));
    for (int j = 1; j < 4; ++j) b.push_back(lat.step(b.back(), 0, +1));
    CorrelationModel model(0.5);
    Sample s = simulate_null(lat, 77);

    const double la = log_likelihood_ratio(s, a, model);
    const double lb = log_likelihood_ratio(s, b, model);
    CHECK(log_mixture_likelihood_ratio(s, std::vector<Path>{a}, model) ==
          Catch::Approx(la).margin(1e-13));
    CHECK(log_mixture_likelihood_ratio(s, std::vector<Path>{a, b}, model) ==
          Catch::Approx(std::log(0.5 * std::exp(la) + 0.5 * std::exp(lb)))
              .margin(1e-13));
    // Non-uniform weights.
    CHECK(log_mixture_likelihood_ratio(s, std::vector<Path>{a, b}, model,
                                       {3.0, 1.0}) ==
          Catch::Approx(std::log(0.75 * std::exp(la) + 0.25 * std::exp(lb)))
              .margin(1e-13));
    // Extreme inputs must not overflow.
    CHECK(log_mixture_from_llrs({1000.0, 999.0}) ==
          Catch::Approx(1000.0 + std::log(0.5 * (1.0 + std::exp(-1.0))))
              .margin(1e-12));

    CHECK_THROWS_AS(log_mixture_from_llrs({}), std::domain_error);
    CHECK_THROWS_AS(log_mixture_from_llrs({1.0, 2.0}, {1.0}), std::domain_error);
    CHECK_THROWS_AS(log_mixture_from_llrs({1.0, 2.0}, {0.0, 0.0}),
                    std::domain_error);
}

TEST_CASE("mixture over a path class enumerates and respects the budget", "[model]") {
    TorusLattice ring(1, 5);
    PathClass pc(ring, 3, NodeId{0}, /*oriented=*/false);
    CorrelationModel model(0.4);
    Sample s = simulate_null(ring, 3);
    // The 5-ring has exactly two unoriented k=3 paths from node 0.
    const double direct = log_mixture_likelihood_ratio(
        s, std::vector<Path>{{0, 1, 2}, {0, 4, 3}}, model);
    CHECK(log_mixture_likelihood_ratio(s, pc, model) ==
          Catch::Approx(direct).margin(1e-13));
    CHECK_THROWS_AS(log_mixture_likelihood_ratio(s, pc, model, /*budget=*/1),
                    BudgetError);
}

TEST_CASE("samples round-trip through the binary + sidecar format", "[model]") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "pathscan-model-io";
    fs::create_directories(dir);

    TorusLattice lat(2, 6);
    Path p = straight_path(lat, 4);
    Sample alt = simulate_alternative(lat, p, CorrelationModel(0.45), 12345);
    const std::string base_alt = (dir / "alt").string();
    write_sample(alt, base_alt);
    Sample back = read_sample(base_alt);
    CHECK(back.d == alt.d);
    CHECK(back.m == alt.m);
    CHECK(back.seed == alt.seed);
    CHECK(back.provenance == Provenance::kAlternative);
    CHECK(back.psi == alt.psi);
    CHECK(back.path == alt.path);
    CHECK(back.values == alt.values);

    Sample nul = simulate_null(lat, 8);
    const std::string base_null = (dir / "null").string();
    write_sample(nul, base_null);
    Sample back_null = read_sample(base_null);
    CHECK(back_null.provenance == Provenance::kNull);
    CHECK(back_null.path.empty());
    CHECK(back_null.values == nul.values);

    CHECK_THROWS_AS(read_sample((dir / "missing").string()), std::runtime_error);

    // Corrupt sidecars are rejected, not misread.
    {
        std::ofstream bad((dir / "bad.json").string());
        bad << "{\"d\":2,\"m\":6,\"seed\":1,\"provenance\":\"mystery\"}\n";
    }
    {
        std::ofstream bin((dir / "bad.f64").string(), std::ios::binary);
        std::vector<double> zeros(36, 0.0);
        bin.write(reinterpret_cast<const char*>(zeros.data()),
                  static_cast<std::streamsize>(zeros.size() * sizeof(double)));
    }
    CHECK_THROWS_AS(read_sample((dir / "bad").string()), std::runtime_error);
    fs::remove_all(dir);
}
