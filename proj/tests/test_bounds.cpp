#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "bound_expected.hpp"
#include "pairloc/bounds.hpp"
#include "pairloc/errors.hpp"

using namespace pairloc;

namespace {

double expected(const std::string& name) {
    for (const auto& row : pairloc_test::kBoundExpected)
        if (name == row.name) return row.value;
    FAIL("missing expected value ", name);
    return 0.0;
}

long long expected_int(const std::string& name) {
    for (const auto& row : pairloc_test::kBoundExpectedInt)
        if (name == row.name) return row.value;
    FAIL("missing expected value ", name);
    return 0;
}

// 10 significant digits against the high-precision recomputation.
void check_sig10(double actual, const std::string& name) {
    const double want = expected(name);
    CHECK_MESSAGE(std::abs(actual - want) <= 5e-10 * std::abs(want),
                  name, ": ", actual, " vs ", want);
}

}  // namespace

TEST_CASE("closed forms match the high-precision table to 10 digits") {
    check_sig10(sample_complexity_prefactor(), "sample_prefactor");
    const EmbeddingConstants k = embedding_constants();
    check_sig10(k.C1, "C1");
    check_sig10(k.C2, "C2");
    check_sig10(k.c1, "c1");
    check_sig10(k.c2, "c2");

    CHECK(sufficient_m(1, 0.5, 2, 0.1) == expected_int("sufficient_m_R1_eps0.5_n2_eta0.1"));
    CHECK(sufficient_m(1, 0.25, 2, 0.1) == expected_int("sufficient_m_R1_eps0.25_n2_eta0.1"));
    CHECK(sufficient_m(1, 0.1, 3, 0.05) == expected_int("sufficient_m_R1_eps0.1_n3_eta0.05"));
    CHECK(sufficient_m(2, 0.5, 5, 0.01) == expected_int("sufficient_m_R2_eps0.5_n5_eta0.01"));
    CHECK(sufficient_m(1, 1.0, 8, 0.2) == expected_int("sufficient_m_R1_eps1.0_n8_eta0.2"));

    check_sig10(lower_bound_m(1, 0.1, 3), "lower_bound_m_R1_eps0.1_n3");
    check_sig10(lower_bound_m(1, 1, 4), "lower_bound_m_R1_eps1_n4");
    check_sig10(lower_bound_m(2, 0.25, 2), "lower_bound_m_R2_eps0.25_n2");
    check_sig10(lower_bound_m(1, 0.05, 7), "lower_bound_m_R1_eps0.05_n7");

    check_sig10(kappa_n(0.5, 1, 4, 0.0), "kappa_s0.5_R1_n4_x0.0");
    check_sig10(kappa_n(1.0, 1, 2, 0.0), "kappa_s1.0_R1_n2_x0.0");
    check_sig10(kappa_n(1.0, 1, 2, 0.7), "kappa_s1.0_R1_n2_x0.7");
    check_sig10(kappa_n(0.05, 1, 3, 0.0), "kappa_s0.05_R1_n3_x0.0");
    check_sig10(kappa_n(0.05, 1, 3, 0.7), "kappa_s0.05_R1_n3_x0.7");
    check_sig10(kappa_n(0.2, 1, 3, 0.5), "kappa_s0.2_R1_n3_x0.5");
    check_sig10(kappa_n(0.1, 1, 4, 0.5), "kappa_s0.1_R1_n4_x0.5");
    check_sig10(kappa_n(0.3, 1, 8, 0.9), "kappa_s0.3_R1_n8_x0.9");
    check_sig10(kappa_n(0.01, 2, 5, 1.0), "kappa_s0.01_R2_n5_x1.0");

    check_sig10(zeta_of_m(1000, 5, 0.05), "zeta_m1000_n5_eta0.05");
    check_sig10(zeta_of_m(100, 2, 0.1), "zeta_m100_n2_eta0.1");
    check_sig10(zeta_of_m(50000, 3, 0.01), "zeta_m50000_n3_eta0.01");
    check_sig10(zeta_of_m(282, 3, 0.1), "zeta_m282_n3_eta0.1");

    CHECK(embedding_m(0.1, 3, 0.1) == expected_int("embedding_m_z0.1_n3_eta0.1"));
    CHECK(embedding_m(0.2, 3, 0.1) == expected_int("embedding_m_z0.2_n3_eta0.1"));
    CHECK(embedding_m(0.05, 5, 0.05) == expected_int("embedding_m_z0.05_n5_eta0.05"));

    check_sig10(error_bound_flips(0.05, 1000, 5, 0.1, 1), "eb_flips_k0.05_m1000_n5_eta0.1_R1");
    check_sig10(error_bound_flips(0.0, 1000, 5, 0.1, 1), "eb_flips_k0.0_m1000_n5_eta0.1_R1");
    check_sig10(error_bound_flips(0.2, 500, 3, 0.05, 2), "eb_flips_k0.2_m500_n3_eta0.05_R2");
    check_sig10(error_bound_gaussian(0.01, 1000, 5, 0.1, 1),
                "eb_gauss_s0.01_m1000_n5_eta0.1_R1");
    check_sig10(error_bound_gaussian(0.0, 1000, 5, 0.1, 1), "eb_gauss_s0.0_m1000_n5_eta0.1_R1");
    check_sig10(error_bound_gaussian(0.1, 500, 3, 0.05, 2), "eb_gauss_s0.1_m500_n3_eta0.05_R2");
    check_sig10(error_bound_arbitrary(0.1, 500, 3, 0.1, 1), "eb_arb_p0.1_m500_n3_eta0.1_R1");
    check_sig10(error_bound_arbitrary(0.0, 500, 3, 0.1, 1), "eb_arb_p0.0_m500_n3_eta0.1_R1");
    check_sig10(error_bound_arbitrary(0.3, 2000, 5, 0.05, 2),
                "eb_arb_p0.3_m2000_n5_eta0.05_R2");

    CHECK(adaptive_m(1, 0.03125, 3, 0.1) == expected_int("adaptive_m_R1_eps0.03125_n3_eta0.1"));
    CHECK(adaptive_m(1, 0.0625, 3, 0.1) == expected_int("adaptive_m_R1_eps0.0625_n3_eta0.1"));
    CHECK(adaptive_m(1, 0.5, 2, 0.2) == expected_int("adaptive_m_R1_eps0.5_n2_eta0.2"));
}

TEST_CASE("cell_count matches exact big-integer values") {
    for (const auto& row : pairloc_test::kCellCountExpected)
        CHECK(cell_count(row.m, row.n).str() == row.decimal);
}

TEST_CASE("cell_count satisfies the Pascal-type recurrence exactly") {
    for (int n = 1; n <= 6; ++n)
        for (long m = 1; m <= 60; ++m)
            CHECK(cell_count(m, n) == cell_count(m - 1, n) + cell_count(m - 1, n - 1));
}

TEST_CASE("cell_count stays below (em/n)^n") {
    for (int n = 1; n <= 5; ++n)
        for (long m = n; m <= 100; ++m) {
            const double bound = std::pow(std::exp(1.0) * m / n, n);
            CHECK(static_cast<double>(cell_count(m, n)) <= bound * (1.0 + 1e-12));
        }
}

TEST_CASE("line and plane counts are the classical ones") {
    CHECK(cell_count(3, 1) == 4);
    CHECK(cell_count(3, 2) == 7);
}

TEST_CASE("sufficient_m grows by a factor in (2, 2.6) when eps halves") {
    for (int n : {1, 2, 5, 10})
        for (double ratio : {0.01, 0.1, 0.5, 1.0}) {
            const double R = 1.0;
            const double eps = ratio * R;
            const double a = static_cast<double>(sufficient_m(R, eps, n, 0.1));
            const double b = static_cast<double>(sufficient_m(R, eps / 2.0, n, 0.1));
            CHECK(b / a > 2.0);
            CHECK(b / a < 2.6);
        }
}

TEST_CASE("the lower bound never exceeds the sufficient count") {
    for (int n = 1; n <= 10; ++n)
        for (double ratio : {0.01, 0.05, 0.1, 0.5, 1.0})
            CHECK(lower_bound_m(1.0, ratio, n) <=
                  static_cast<double>(sufficient_m(1.0, ratio, n, 0.5)));
}

TEST_CASE("relaxing the failure probability shrinks the budget") {
    CHECK(sufficient_m(1, 0.5, 2, 0.9) < sufficient_m(1, 0.5, 2, 0.1));
    CHECK(sufficient_m(1, 0.5, 2, 0.999) < sufficient_m(1, 0.5, 2, 0.9));
}

TEST_CASE("kappa_n is continuous and increasing in the noise variance") {
    for (int n : {2, 3, 4, 8}) {
        double prev = 0.0;
        for (double s2 = 0.0; s2 <= 1.0; s2 += 0.02) {
            const double k = kappa_n(s2, 1.0, n, 0.6);
            CHECK(k >= prev);
            prev = k;
        }
        // No jump at zero.
        CHECK(kappa_n(1e-12, 1.0, n, 0.6) < 1e-5);
    }
}

TEST_CASE("kappa_n obeys the c0 sandwich for n >= 4") {
    for (int n : {4, 6, 12})
        for (double c0 : {0.01, 0.1, 0.5, 1.0})
            for (double x_norm : {0.0, 0.5, 1.0}) {
                const double k = kappa_n(c0 / n, 1.0, n, x_norm);
                CHECK(k >= std::sqrt(c0 / (c0 + 6.0)) - 1e-12);
                CHECK(k <= std::sqrt(c0 / (c0 + 2.0)) + 1e-12);
            }
}

TEST_CASE("kappa_n for n = 3 with centered x uses the variance branch") {
    CHECK(kappa_n(0.05, 1.0, 3, 0.0) ==
          doctest::Approx(std::sqrt(0.05 / (0.05 + 2.0 / 3.0))));
}

TEST_CASE("zeta decreases in m and vanishes asymptotically") {
    double prev = 1e9;
    for (long m : {10L, 100L, 1000L, 10000L, 100000L}) {
        const double z = zeta_of_m(m, 4, 0.1);
        CHECK(z < prev);
        prev = z;
    }
    CHECK(zeta_of_m(100000000L, 4, 0.1) < 2e-3);
}

TEST_CASE("embedding_m decreases in zeta and round-trips through zeta_of_m") {
    CHECK(embedding_m(0.2, 3, 0.1) < embedding_m(0.1, 3, 0.1));
    // The round trip inflates zeta by sqrt(log(x)/W(x)) where
    // x = 18 m (2/eta)^{1/n}; on this grid that factor stays below 1.15
    // and never drops below 1.
    for (double zeta : {0.05, 0.1, 0.2, 0.3})
        for (int n : {2, 3, 5}) {
            const long long m = embedding_m(zeta, n, 0.1);
            const double round_trip = zeta_of_m(m, n, 0.1);
            CHECK(round_trip <= zeta * 1.15);
            CHECK(round_trip >= zeta * 0.99);
        }
}

TEST_CASE("flip error bound is linear in kappa with slope 2R/C1") {
    const EmbeddingConstants k = embedding_constants();
    const double R = 1.5;
    const double slope = (error_bound_flips(0.2, 500, 3, 0.1, R) -
                          error_bound_flips(0.1, 500, 3, 0.1, R)) / 0.1;
    CHECK(slope == doctest::Approx(2.0 * R / k.C1).epsilon(1e-12));
}

TEST_CASE("gaussian bound at zero variance exceeds the flip bound by its tail term") {
    // At sigma_z = 0 the noise-dependent term vanishes; the remaining gap to
    // the kappa = 0 flip bound is exactly R (1/C1) sqrt(log(1/eta) / (2m)).
    const EmbeddingConstants k = embedding_constants();
    const long m = 1000;
    const double eta = 0.1, R = 1.0;
    const double gap = error_bound_gaussian(0.0, m, 5, eta, R) -
                       error_bound_flips(0.0, m, 5, eta, R);
    CHECK(gap == doctest::Approx(R / k.C1 * std::sqrt(std::log(1 / eta) / (2.0 * m))));
    CHECK(error_bound_gaussian(0.1, m, 5, eta, R) > error_bound_gaussian(0.01, m, 5, eta, R));
}

TEST_CASE("arbitrary-perturbation bound reduces to its deviation term at zero") {
    const EmbeddingConstants k = embedding_constants();
    const double value = error_bound_arbitrary(0.0, 500, 3, 0.1, 1.0);
    const double dev = std::sqrt((3 * std::log(18.0 * 500) + std::log(20.0)) / 1000.0);
    CHECK(value == doctest::Approx((k.c1 + 2 * k.c2) / k.C1 * dev));
    const double slope = (error_bound_arbitrary(0.2, 500, 3, 0.1, 2.0) -
                          error_bound_arbitrary(0.1, 500, 3, 0.1, 2.0)) / 0.1;
    CHECK(slope == doctest::Approx(2.0 * k.C2 / k.C1).epsilon(1e-12));
}

TEST_CASE("adaptive budget scales with the dyadic depth") {
    const long long base = adaptive_m(1.0, 1.0, 3, 0.1);  // log2(2R/eps) = 1
    const double unit = 2.0 * sample_complexity_prefactor() *
                        (3.0 * std::log(2.0 * std::sqrt(3.0)) + std::log(10.0));
    CHECK(base == static_cast<long long>(std::ceil(unit)));
    // Halving the target accuracy adds exactly one dyadic unit.
    const long long deeper = adaptive_m(1.0, 0.5, 3, 0.1);
    CHECK(deeper == static_cast<long long>(std::ceil(2.0 * unit)));
}

TEST_CASE("bound evaluators reject invalid parameters") {
    CHECK_THROWS_AS(sufficient_m(1, 0, 2, 0.1), InvalidParameter);
    CHECK_THROWS_AS(sufficient_m(1, 2.5, 2, 0.1), InvalidParameter);
    CHECK_THROWS_AS(sufficient_m(1, 0.5, 2, 1.0), InvalidParameter);
    CHECK_THROWS_AS(kappa_n(0.1, 1, 1, 0.0), InvalidParameter);
    CHECK_THROWS_AS(kappa_n(0.1, 1, 3, 2.0), InvalidParameter);
    CHECK_THROWS_AS(zeta_of_m(0, 3, 0.1), InvalidParameter);
    CHECK_THROWS_AS(embedding_m(0.0, 3, 0.1), InvalidParameter);
    CHECK_THROWS_AS(cell_count(20000, 3), InvalidParameter);
    CHECK_THROWS_AS(adaptive_m(1, 3.0, 3, 0.1), InvalidParameter);
}
