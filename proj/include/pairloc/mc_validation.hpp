#pragma once

// Monte Carlo and numeric validation of the model's probability inequalities.
// These estimators are the independent ground truth the property suite tests
// the analytic bounds against; they never call into the bounds module.

#include <cstdint>

#include <Eigen/Dense>

namespace pairloc {

struct MCEstimate {
    double estimate = 0.0;
    long trials = 0;
    double std_error = 0.0;  // sqrt(p(1-p)/trials)
    std::uint64_t seed = 0;
};

// Probability that one random comparison hyperplane separates the delta-balls
// around w and z: the threshold falls between the two projections with a
// delta margin on both sides.  Hyperplanes are sampled as in the random
// model with variance 2R^2/n (normal uniform on the sphere, threshold
// ~ N(0, R^2/n)).
MCEstimate mc_sep_probability(const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                              double delta, int n, double R, long trials,
                              std::uint64_t seed);

// Closed-form lower bound on the separation probability:
// (eps0 - delta sqrt(2n)) / (22 sqrt(pi) e^{5/2} R).
double sep_probability_lower_bound(double eps0, double delta, int n, double R);

// Probability that some pair of points in the two delta-balls is separated
// (the complement of "no hyperplane distinguishes the balls"): the threshold
// falls inside the projection interval widened by delta.
MCEstimate mc_nonsep_probability(const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                                 double delta, int n, double R, long trials,
                                 std::uint64_t seed);

// Closed-form upper bound on the same probability:
// sqrt(2/pi) (||w - z||/R + delta sqrt(n)/R).
double nonsep_probability_upper_bound(double dist, double delta, int n, double R);

// Probability that pre-quantization Gaussian noise of variance sigma_z2
// flips one comparison at x, sampling full landmark pairs with variance
// 2R^2/n.  Bounded above by kappa_n.
MCEstimate mc_flip_probability(const Eigen::VectorXd& x, int n, double R, double sigma_z2,
                               long trials, std::uint64_t seed);

struct SphereMeanAbs {
    double mc_mean = 0.0;
    double std_error = 0.0;
    long trials = 0;
    std::uint64_t seed = 0;
    // Closed-form candidates (Gamma(n/2)/Gamma((n+1)/2) times ||delta||):
    double prediction_two_over_sqrt_pi = 0.0;  // constant 2/sqrt(pi)
    double prediction_one_over_sqrt_pi = 0.0;  // constant 1/sqrt(pi)
};

// Mean of |a^T delta| over a uniform on the sphere, reported against both
// candidate constants (see the validation suite for which one holds).
SphereMeanAbs mc_sphere_mean_abs(const Eigen::VectorXd& delta_vec, int n, long trials,
                                 std::uint64_t seed);

struct CdfBoundsReport {
    long pairs = 0;
    long violations = 0;
    double min_lower_slack = 0.0;  // (Phi(b)-Phi(a)) - (b-a) phi(max|a|,|b|)
    double min_upper_slack = 0.0;  // (b-a) phi(min|a|,|b|) - (Phi(b)-Phi(a))
    double min_zero_slack = 0.0;   // (b-a) phi(0) - (b-a) phi(min|a|,|b|)
};

// Verifies the normal-CDF difference sandwich
//   (b-a) phi(U) <= Phi(b) - Phi(a) <= (b-a) phi(L) <= (b-a) phi(0)
// on all ordered pairs from a uniform grid of `grid` points over
// [a_lo, b_hi], where L/U are the nearer/farther endpoint from zero.
CdfBoundsReport check_cdf_bounds(double a_lo, double b_hi, int grid);

// Standard normal CDF via erfc; relative error at the level of the libm
// erfc implementation (~1 ulp), comfortably below 1e-12.
double normal_cdf(double x);
double normal_pdf(double x);

}  // namespace pairloc
