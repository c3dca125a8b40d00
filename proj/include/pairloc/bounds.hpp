#pragma once

// Closed-form evaluation of the theory: sample-complexity bounds, the
// sign-flip probability kappa_n, stable-embedding constants, the zeta(m)
// deviation term, the three noise-model recovery bounds, and exact cell
// counts of hyperplane arrangements.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace pairloc {

using BigInt = boost::multiprecision::cpp_int;

// Explicit prefactor 44 sqrt(pi) e^{5/2} of the sufficient-sample bound;
// also the default constant of the adaptive budget.
double sample_complexity_prefactor();

// Smallest m with m >= prefactor * (R/eps) * (2n log(3R(4+sqrt(8n))/eps) + log(1/eta)).
// Requires 0 < eps <= 2R, 0 < eta < 1, n >= 1.
long long sufficient_m(double R, double eps, int n, double eta);

// (2/e) (R/eps) n; below this many hyperplanes some cell of the arrangement
// has diameter >= eps.
double lower_bound_m(double R, double eps, int n);

// Exact number of cells cut out of R^n by m hyperplanes in general position:
// sum_{i=0}^{n} binom(m, i).  Exact integer arithmetic for m <= 10^4.
BigInt cell_count(long m, int n);

// Flip-probability bound under pre-quantization Gaussian noise of variance
// sigma_z2, with the low-dimension special cases:
//   n = 2 : (1/2) sqrt(sigma_z2 / (sigma_z2 + R^2))
//   n = 3 : min{ sqrt(sigma_z2 / (sigma_z2 + 2R^2/3)), sqrt(pi/2) sigma_z / ||x|| }
//   n >= 4: sqrt(sigma_z2 / (sigma_z2 + 2R^2/n + 4||x||^2/n))
// For n = 3 with x_norm = 0 the second branch is +infinity and the first is
// returned.
double kappa_n(double sigma_z2, double R, int n, double x_norm);

struct EmbeddingConstants {
    double C1;  // 1 / (22 e^{5/2} sqrt(pi))
    double c1;  // 1 + 1/(11 e^{5/2} sqrt(pi)) + sqrt(2/pi)
    double C2;  // sqrt(2/pi)
    double c2;  // 1 + 3 sqrt(2/pi)
};

EmbeddingConstants embedding_constants();

// zeta <= sqrt((n log(18m) + log(2/eta)) / (2m)); valid for
// 18 m (2/eta)^{1/n} >= e.
double zeta_of_m(long m, int n, double eta);

// Smallest m with m >= (1/(2 zeta^2)) (2n log(3 sqrt(n)/zeta) + log(2/eta)).
long long embedding_m(double zeta, int n, double eta);

// Recovery-error bounds (absolute, i.e. already scaled by R) for the three
// noise models: an adversarially flipped fraction kappa, pre-quantization
// Gaussian noise of variance sigma_z2, and an arbitrary perturbation of the
// observed point with norm perturb_norm.
double error_bound_flips(double kappa, long m, int n, double eta, double R);
double error_bound_gaussian(double sigma_z2, long m, int n, double eta, double R);
double error_bound_arbitrary(double perturb_norm, long m, int n, double eta, double R);

// Total comparison budget sufficient for the multi-stage scheme to reach
// accuracy eps_t: 2C log2(2R/eps_t) (n log(2 sqrt(n)) + log(1/eta)).
// C defaults to sample_complexity_prefactor().
long long adaptive_m(double R, double eps_t, int n, double eta, double C = 0.0);

struct BoundReport {
    std::string name;
    std::vector<std::pair<std::string, double>> inputs;
    double value = 0.0;
    std::string formula_ref;
    std::string exact;  // set for integer-valued quantities
};

}  // namespace pairloc
