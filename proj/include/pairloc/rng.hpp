#pragma once

// Seeded random streams.  Every stochastic operation in the library takes an
// explicit 64-bit seed and derives an independent stream from it, so runs are
// reproducible under partial re-execution and across thread schedules.

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace pairloc {

// splitmix64 finalizer (Steele, Lea, Flood).  Used as the documented mix
// function for deriving per-trial / per-stage seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stream seed for sub-unit `index` of a run seeded with `base`:
// base XOR hash(index), then mixed once more so nearby bases do not produce
// correlated streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index));
}

// Thin wrapper around mt19937_64 with a portable normal sampler (Marsaglia
// polar; std::normal_distribution is not bit-stable across standard library
// implementations).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        have_spare_ = true;
        return u * scale;
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    Eigen::VectorXd gaussian_vector(const Eigen::VectorXd& mean, double stddev) {
        Eigen::VectorXd out(mean.size());
        for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal(mean[i], stddev);
        return out;
    }

    // Uniform on the unit sphere S^{n-1} via a normalized Gaussian vector.
    Eigen::VectorXd unit_sphere(int n) {
        Eigen::VectorXd v(n);
        double norm2;
        do {
            for (int i = 0; i < n; ++i) v[i] = normal();
            norm2 = v.squaredNorm();
        } while (norm2 == 0.0);
        return v / std::sqrt(norm2);
    }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t integer_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = gen_();
        } while (r >= limit);
        return r % n;
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace pairloc
