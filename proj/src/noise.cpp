#include "pairloc/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pairloc/rng.hpp"

namespace pairloc {

void NoiseSpec::validate(int m) const {
    switch (kind) {
        case NoiseKind::none:
            break;
        case NoiseKind::gaussian_prequant:
        case NoiseKind::perturbed_point:
            if (!(sigma_z2 >= 0.0)) throw InvalidParameter("noise: sigma_z2 must be >= 0");
            break;
        case NoiseKind::random_flip:
        case NoiseKind::adversarial_flip:
            if (!(flip_fraction >= 0.0 && flip_fraction <= 1.0))
                throw InvalidParameter("noise: flip_fraction must be in [0, 1]");
            if (flip_count(flip_fraction, m) > m)
                throw InvalidParameter("noise: flip count exceeds m");
            break;
    }
}

int flip_count(double flip_fraction, int m) {
    // llround = round half away from zero, the documented rule.
    return static_cast<int>(std::llround(flip_fraction * m));
}

SignVector gaussian_prequant(const Eigen::VectorXd& x, const ComparisonFrame& frame,
                             double sigma_z2, std::uint64_t seed) {
    if (!(sigma_z2 >= 0.0)) throw InvalidParameter("gaussian_prequant: sigma_z2 must be >= 0");
    const Eigen::VectorXd margin = frame.margins(x);
    const double sd = std::sqrt(sigma_z2);
    RandomStream rng(seed);
    std::vector<int> signs(static_cast<std::size_t>(frame.count()));
    for (int i = 0; i < frame.count(); ++i) {
        const double noisy = margin[i] + (sd > 0.0 ? rng.normal(0.0, sd) : 0.0);
        signs[static_cast<std::size_t>(i)] = noisy >= 0.0 ? 1 : -1;
    }
    return SignVector(std::move(signs));
}

SignVector flip_random(const SignVector& signs, double flip_fraction, std::uint64_t seed) {
    if (!(flip_fraction >= 0.0 && flip_fraction <= 1.0))
        throw InvalidParameter("flip_random: flip_fraction must be in [0, 1]");
    const int m = signs.size();
    const int count = flip_count(flip_fraction, m);
    if (count == 0) return signs;

    // Partial Fisher-Yates: the first `count` slots form a uniform sample
    // without replacement.
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    RandomStream rng(seed);
    for (int i = 0; i < count; ++i) {
        const int j = i + static_cast<int>(rng.integer_below(static_cast<std::uint64_t>(m - i)));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    order.resize(static_cast<std::size_t>(count));
    return signs.with_flips(order);
}

SignVector flip_adversarial(const SignVector& signs, const ComparisonFrame& frame,
                            const Eigen::VectorXd& x, double flip_fraction) {
    if (!(flip_fraction >= 0.0 && flip_fraction <= 1.0))
        throw InvalidParameter("flip_adversarial: flip_fraction must be in [0, 1]");
    if (signs.size() != frame.count())
        throw LengthMismatch("flip_adversarial: signs do not match frame");
    const int m = signs.size();
    const int count = flip_count(flip_fraction, m);
    if (count == 0) return signs;

    const Eigen::VectorXd margin = frame.margins(x).cwiseAbs();
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (margin[a] != margin[b]) return margin[a] > margin[b];
        return a < b;
    });
    order.resize(static_cast<std::size_t>(count));
    return signs.with_flips(order);
}

SignVector perturbed_point_observe(const Eigen::VectorXd& x, const ComparisonFrame& frame,
                                   double sigma_z2, std::uint64_t seed) {
    if (!(sigma_z2 >= 0.0))
        throw InvalidParameter("perturbed_point_observe: sigma_z2 must be >= 0");
    if (x.size() != frame.dimension())
        throw DimensionMismatch("perturbed_point_observe: point dimension does not match frame");
    const double sd = std::sqrt(sigma_z2);
    RandomStream rng(seed);
    std::vector<int> signs(static_cast<std::size_t>(frame.count()));
    for (int i = 0; i < frame.count(); ++i) {
        Eigen::VectorXd xi = x;
        if (sd > 0.0)
            for (Eigen::Index j = 0; j < xi.size(); ++j) xi[j] += rng.normal(0.0, sd);
        const double margin = frame.normals().row(i).dot(xi) - frame.offsets()[i];
        signs[static_cast<std::size_t>(i)] = margin >= 0.0 ? 1 : -1;
    }
    return SignVector(std::move(signs));
}

SignVector apply_noise(const NoiseSpec& spec, const Eigen::VectorXd& x,
                       const ComparisonFrame& frame, const SignVector& clean) {
    spec.validate(frame.count());
    switch (spec.kind) {
        case NoiseKind::none:
            return clean;
        case NoiseKind::gaussian_prequant:
            return gaussian_prequant(x, frame, spec.sigma_z2, spec.seed);
        case NoiseKind::random_flip:
            return flip_random(clean, spec.flip_fraction, spec.seed);
        case NoiseKind::adversarial_flip:
            return flip_adversarial(clean, frame, x, spec.flip_fraction);
        case NoiseKind::perturbed_point:
            return perturbed_point_observe(x, frame, spec.sigma_z2, spec.seed);
    }
    throw InvalidParameter("apply_noise: unknown noise kind");
}

}  // namespace pairloc
