#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <cmath>
#include <sstream>

#include "pairloc/model.hpp"
#include "pairloc/rng.hpp"

using namespace pairloc;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

ComparisonFrame frame_from_pair(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    return derive_frame({ItemPair{p, q}});
}

// Kolmogorov-Smirnov statistic of `samples` against the CDF `F`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& F) {
    std::sort(samples.begin(), samples.end());
    const double N = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = F(samples[i]);
        d = std::max(d, std::abs(f - (i + 1) / N));
        d = std::max(d, std::abs(f - i / N));
    }
    return d;
}

}  // namespace

TEST_CASE("sample_pairs validates parameters") {
    const Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(sample_pairs(0, 2, zero2, 1.0, 1), InvalidParameter);
    CHECK_THROWS_AS(sample_pairs(5, 0, zero2, 1.0, 1), InvalidParameter);
    CHECK_THROWS_AS(sample_pairs(5, 2, zero2, 0.0, 1), InvalidParameter);
    CHECK_THROWS_AS(sample_pairs(5, 2, zero2, -1.0, 1), InvalidParameter);
    CHECK_THROWS_AS(sample_pairs(5, 3, zero2, 1.0, 1), DimensionMismatch);
}

TEST_CASE("sample_pairs degenerates when the variance underflows") {
    // sigma ~ 1e-150, so every redraw collides below the 1e-12 threshold.
    CHECK_THROWS_AS(sample_pairs(1, 2, Eigen::VectorXd::Zero(2), 1e-300, 42), DegeneratePair);
}

TEST_CASE("sample_pairs is deterministic and honors the mean") {
    const Eigen::VectorXd mean = vec2(3.0, -1.0);
    const auto a = sample_pairs(20, 2, mean, 0.5, 123);
    const auto b = sample_pairs(20, 2, mean, 0.5, 123);
    REQUIRE(a.size() == 20);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].p == b[i].p);
        CHECK(a[i].q == b[i].q);
    }
    double coord_mean = 0.0;
    for (const auto& pair : a) coord_mean += pair.p[0] + pair.q[0];
    coord_mean /= 40.0;
    CHECK(coord_mean == doctest::Approx(3.0).epsilon(0.2));
}

TEST_CASE("sample_pairs coordinate moments match the requested variance") {
    // 200 draws at sigma^2 = 1: sample variance within the chi-square band.
    {
        const auto pairs = sample_pairs(50, 2, Eigen::VectorXd::Zero(2), 1.0, 7);
        std::vector<double> coords;
        for (const auto& pr : pairs)
            for (int j = 0; j < 2; ++j) {
                coords.push_back(pr.p[j]);
                coords.push_back(pr.q[j]);
            }
        double mean = 0.0;
        for (double c : coords) mean += c;
        mean /= coords.size();
        double var = 0.0;
        for (double c : coords) var += (c - mean) * (c - mean);
        var /= coords.size() - 1;
        CHECK(var > 0.8);
        CHECK(var < 1.2);
    }
    // sigma^2 = 2R^2/n with R = 1, n = 5: variance 0.4.
    {
        const auto pairs = sample_pairs(1000, 5, Eigen::VectorXd::Zero(5), 2.0 / 5.0, 99);
        double sq = 0.0;
        long count = 0;
        for (const auto& pr : pairs)
            for (int j = 0; j < 5; ++j) {
                sq += pr.p[j] * pr.p[j] + pr.q[j] * pr.q[j];
                count += 2;
            }
        CHECK(sq / count == doctest::Approx(0.4).epsilon(0.05));
    }
}

TEST_CASE("derive_frame reduces pairs to normalized hyperplanes") {
    {
        const ComparisonFrame f = frame_from_pair(vec2(1, 0), vec2(-1, 0));
        CHECK(f.normals()(0, 0) == doctest::Approx(1.0));
        CHECK(f.normals()(0, 1) == doctest::Approx(0.0));
        CHECK(f.offsets()[0] == doctest::Approx(0.0));
    }
    {
        const ComparisonFrame f = frame_from_pair(vec2(2, 0), vec2(0, 0));
        CHECK(f.normals()(0, 0) == doctest::Approx(1.0));
        CHECK(f.offsets()[0] == doctest::Approx(1.0));
    }
    {
        // Bisector through the midpoint (0, 2).
        const ComparisonFrame f = frame_from_pair(vec2(0, 3), vec2(0, 1));
        CHECK(f.normals()(0, 0) == doctest::Approx(0.0));
        CHECK(f.normals()(0, 1) == doctest::Approx(1.0));
        CHECK(f.offsets()[0] == doctest::Approx(2.0));
    }
}

TEST_CASE("derive_frame rejects degenerate and mixed-dimension pairs") {
    CHECK_THROWS_AS(frame_from_pair(vec2(1, 1), vec2(1, 1)), DegeneratePair);
    Eigen::VectorXd p3 = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(derive_frame({ItemPair{vec2(1, 0), vec2(0, 0)},
                                  ItemPair{p3, 2 * p3}}),
                    DimensionMismatch);
}

TEST_CASE("generated frames keep unit normals and finite offsets") {
    const ComparisonFrame f = sample_frame(500, 4, Eigen::VectorXd::Zero(4), 0.5, 11);
    double worst = 0.0;
    for (int i = 0; i < f.count(); ++i)
        worst = std::max(worst, std::abs(f.normals().row(i).norm() - 1.0));
    CHECK(worst <= 1e-12);
    CHECK(f.offsets().allFinite());
}

TEST_CASE("observe uses the +1 tie convention and matches the raw comparison") {
    const ComparisonFrame f = frame_from_pair(vec2(1, 0), vec2(-1, 0));
    // On the bisector: a.x == tau exactly.
    CHECK(observe(vec2(0, 0.7), f)[0] == 1);
    // Closer to p.
    CHECK(observe(vec2(0.5, 0), f)[0] == 1);
    // Closer to q by direct distances.
    CHECK(observe(vec2(-0.5, 0.3), f)[0] == -1);
    CHECK_THROWS_AS(observe(Eigen::VectorXd::Zero(3), f), DimensionMismatch);
}

TEST_CASE("sign from squared distances equals sign from the normalized form") {
    RandomStream rng(2024);
    long checked = 0;
    for (int trial = 0; trial < 100000; ++trial) {
        const int n = 2 + trial % 4;
        Eigen::VectorXd p(n), q(n), x(n);
        for (int j = 0; j < n; ++j) {
            p[j] = rng.normal();
            q[j] = rng.normal();
            x[j] = rng.normal();
        }
        const double raw = (x - q).squaredNorm() - (x - p).squaredNorm();
        const Eigen::VectorXd diff = p - q;
        const double margin = diff.dot(x) / diff.norm() -
                              (p.squaredNorm() - q.squaredNorm()) / (2.0 * diff.norm());
        if (std::abs(margin) <= 1e-12) continue;  // tie set
        ++checked;
        CHECK((raw >= 0.0 ? 1 : -1) == (margin >= 0.0 ? 1 : -1));
    }
    CHECK(checked > 99000);
}

TEST_CASE("hamming definition and error paths") {
    const SignVector a({1, 1, 1, 1});
    CHECK(hamming(a, a) == 0.0);
    CHECK(hamming(a, SignVector({1, -1, 1, 1})) == doctest::Approx(0.25));
    CHECK(hamming(a, SignVector({-1, -1, -1, -1})) == 1.0);
    CHECK_THROWS_AS(hamming(a, SignVector({1, 1})), LengthMismatch);
    CHECK_THROWS_AS(SignVector({1, 0, -1}), InvalidParameter);
}

TEST_CASE("hamming is a metric (exhaustive up to length 4)") {
    for (int m = 1; m <= 4; ++m) {
        const int total = 1 << m;
        std::vector<SignVector> all;
        for (int mask = 0; mask < total; ++mask) {
            std::vector<int> signs(static_cast<std::size_t>(m));
            for (int j = 0; j < m; ++j) signs[static_cast<std::size_t>(j)] = (mask >> j) & 1 ? 1 : -1;
            all.emplace_back(std::move(signs));
        }
        for (const auto& s1 : all)
            for (const auto& s2 : all) {
                const double d12 = hamming(s1, s2);
                CHECK(hamming(s2, s1) == d12);
                CHECK((d12 == 0.0) == (s1 == s2));
                for (const auto& s3 : all)
                    CHECK(d12 <= hamming(s1, s3) + hamming(s3, s2) + 1e-15);
            }
    }
}

TEST_CASE("zero-mean frames have sphere-uniform normals and Gaussian offsets") {
    const int m = 4000;
    const double sigma2 = 0.8;

    SUBCASE("n = 2: first coordinate has the arcsine-type law") {
        const ComparisonFrame f = sample_frame(m, 2, Eigen::VectorXd::Zero(2), sigma2, 5);
        std::vector<double> a1(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) a1[static_cast<std::size_t>(i)] = f.normals()(i, 0);
        const double d = ks_statistic(a1, [](double t) {
            return 1.0 - std::acos(std::clamp(t, -1.0, 1.0)) / std::acos(-1.0);
        });
        CHECK(d < 2.0 / std::sqrt(static_cast<double>(m)));
    }

    SUBCASE("n = 3: first coordinate is uniform on [-1, 1]") {
        const ComparisonFrame f = sample_frame(m, 3, Eigen::VectorXd::Zero(3), sigma2, 6);
        std::vector<double> a1(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) a1[static_cast<std::size_t>(i)] = f.normals()(i, 0);
        const double d = ks_statistic(a1, [](double t) { return (t + 1.0) / 2.0; });
        CHECK(d < 2.0 / std::sqrt(static_cast<double>(m)));
    }

    SUBCASE("offsets are N(0, sigma^2/2) and uncorrelated with the normals") {
        const int big_m = 10000;
        const int n = 3;
        const ComparisonFrame f = sample_frame(big_m, n, Eigen::VectorXd::Zero(n), sigma2, 8);
        const double target_var = sigma2 / 2.0;
        const double mean = f.offsets().mean();
        const double var =
            (f.offsets().array() - mean).square().sum() / (big_m - 1);
        CHECK(std::abs(mean) < 3.0 * std::sqrt(target_var / big_m));
        CHECK(std::abs(var - target_var) < 3.0 * target_var * std::sqrt(2.0 / big_m));
        for (int j = 0; j < n; ++j) {
            const Eigen::ArrayXd aj = f.normals().col(j).array();
            const Eigen::ArrayXd tau = f.offsets().array();
            const double corr =
                ((aj - aj.mean()) * (tau - tau.mean())).sum() /
                (std::sqrt((aj - aj.mean()).square().sum()) *
                 std::sqrt((tau - tau.mean()).square().sum()));
            CHECK(std::abs(corr) <= 3.0 / std::sqrt(static_cast<double>(big_m)));
        }
    }
}

TEST_CASE("frame CSV round-trips with the documented header") {
    const ComparisonFrame f = sample_frame(3, 2, Eigen::VectorXd::Zero(2), 1.5, 5);
    std::ostringstream out;
    f.save_csv(out);
    const std::string text = out.str();
    CHECK(text.rfind("# n=2 m=3 sigma2=1.5 seed=5\n", 0) == 0);

    std::istringstream in(text);
    const ComparisonFrame g = ComparisonFrame::load_csv(in);
    CHECK(g.normals() == f.normals());
    CHECK(g.offsets() == f.offsets());
    CHECK(g.gen_params().sigma2 == 1.5);
    CHECK(g.gen_params().seed == 5);
    CHECK_FALSE(g.gen_params().external);
}

TEST_CASE("frames with nonzero mean keep their provenance through CSV") {
    const ComparisonFrame f = sample_frame(4, 2, vec2(0.25, -1.0), 0.7, 21);
    std::ostringstream out;
    f.save_csv(out);
    std::istringstream in(out.str());
    const ComparisonFrame g = ComparisonFrame::load_csv(in);
    CHECK(g.gen_params().mean == f.gen_params().mean);
    CHECK(g.normals() == f.normals());
}

TEST_CASE("external frames serialize with an external marker") {
    const ComparisonFrame f = frame_from_pair(vec2(1, 0), vec2(-1, 0));
    std::ostringstream out;
    f.save_csv(out);
    CHECK(out.str().rfind("# n=2 m=1 sigma2=external seed=external\n", 0) == 0);
    std::istringstream in(out.str());
    CHECK(ComparisonFrame::load_csv(in).gen_params().external);
}

TEST_CASE("sign vectors serialize one entry per line") {
    const SignVector s({1, -1, -1, 1});
    std::ostringstream out;
    save_signs(s, out);
    CHECK(out.str() == "1\n-1\n-1\n1\n");
    std::istringstream in(out.str());
    CHECK(load_signs(in) == s);
    std::istringstream bad("1\n2\n");
    CHECK_THROWS_AS(load_signs(bad), ConfigError);
}
