#pragma once

// Corruption models for observed sign vectors: pre-quantization Gaussian
// noise, uniform random flips, adversarial (largest-margin) flips, and
// observation at an independently perturbed point.

#include <cstdint>

#include "pairloc/model.hpp"

namespace pairloc {

enum class NoiseKind { none, gaussian_prequant, random_flip, adversarial_flip, perturbed_point };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    double sigma_z2 = 0.0;        // gaussian_prequant / perturbed_point
    double flip_fraction = 0.0;   // random_flip / adversarial_flip
    std::uint64_t seed = 0;

    void validate(int m) const;
};

// sign(a_i^T x - tau_i + z_i) with z_i ~ N(0, sigma_z2) i.i.d.
// sigma_z2 = 0 reproduces observe() exactly.
SignVector gaussian_prequant(const Eigen::VectorXd& x, const ComparisonFrame& frame,
                             double sigma_z2, std::uint64_t seed);

// Negates exactly round(flip_fraction * m) entries chosen uniformly without
// replacement (round = half away from zero).
SignVector flip_random(const SignVector& signs, double flip_fraction, std::uint64_t seed);

// Negates the round(flip_fraction * m) entries whose hyperplanes lie farthest
// from x, i.e. with largest |a_i^T x - tau_i|; ties break toward the lower
// index.
SignVector flip_adversarial(const SignVector& signs, const ComparisonFrame& frame,
                            const Eigen::VectorXd& x, double flip_fraction);

// Observes comparison i at x + z_i with z_i ~ N(0, sigma_z2 I) drawn
// independently per comparison; statistically identical to gaussian_prequant.
SignVector perturbed_point_observe(const Eigen::VectorXd& x, const ComparisonFrame& frame,
                                   double sigma_z2, std::uint64_t seed);

// Applies `spec` to produce the corrupted observation of x under `frame`;
// `clean` must be observe(x, frame).
SignVector apply_noise(const NoiseSpec& spec, const Eigen::VectorXd& x,
                       const ComparisonFrame& frame, const SignVector& clean);

// Number of entries a flip model negates for a given fraction.
int flip_count(double flip_fraction, int m);

}  // namespace pairloc
