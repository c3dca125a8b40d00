#include "pairloc/mc_validation.hpp"

#include <cmath>
#include <limits>

#include "pairloc/errors.hpp"
#include "pairloc/rng.hpp"

namespace pairloc {

namespace {

const double kPi = std::acos(-1.0);

double binomial_std_error(double p_hat, long trials) {
    return std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / trials);
}

void check_mc_args(int n, double R, long trials) {
    if (n < 1) throw InvalidParameter("mc: n must be >= 1");
    if (!(R > 0.0)) throw InvalidParameter("mc: R must be > 0");
    if (trials < 1) throw InvalidParameter("mc: trials must be >= 1");
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

double sep_probability_lower_bound(double eps0, double delta, int n, double R) {
    return (eps0 - delta * std::sqrt(2.0 * n)) /
           (22.0 * std::sqrt(kPi) * std::exp(2.5) * R);
}

double nonsep_probability_upper_bound(double dist, double delta, int n, double R) {
    return std::sqrt(2.0 / kPi) * (dist / R + delta * std::sqrt(static_cast<double>(n)) / R);
}

MCEstimate mc_sep_probability(const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                              double delta, int n, double R, long trials,
                              std::uint64_t seed) {
    check_mc_args(n, R, trials);
    if (delta < 0.0) throw InvalidParameter("mc_sep_probability: delta must be >= 0");
    if (w.size() != n || z.size() != n)
        throw DimensionMismatch("mc_sep_probability: points must have dimension n");

    const double tau_sd = R / std::sqrt(static_cast<double>(n));
    RandomStream rng(seed);
    long hits = 0;
    for (long t = 0; t < trials; ++t) {
        const Eigen::VectorXd a = rng.unit_sphere(n);
        const double pw = a.dot(w);
        const double pz = a.dot(z);
        const double tau = rng.normal(0.0, tau_sd);
        const double lo = std::min(pw, pz) + delta;
        const double hi = std::max(pw, pz) - delta;
        if (lo <= tau && tau <= hi) ++hits;
    }
    MCEstimate est;
    est.estimate = static_cast<double>(hits) / trials;
    est.trials = trials;
    est.std_error = binomial_std_error(est.estimate, trials);
    est.seed = seed;
    return est;
}

MCEstimate mc_nonsep_probability(const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                                 double delta, int n, double R, long trials,
                                 std::uint64_t seed) {
    check_mc_args(n, R, trials);
    if (delta < 0.0) throw InvalidParameter("mc_nonsep_probability: delta must be >= 0");
    if (w.size() != n || z.size() != n)
        throw DimensionMismatch("mc_nonsep_probability: points must have dimension n");

    const double tau_sd = R / std::sqrt(static_cast<double>(n));
    RandomStream rng(seed);
    long hits = 0;
    for (long t = 0; t < trials; ++t) {
        const Eigen::VectorXd a = rng.unit_sphere(n);
        const double pw = a.dot(w);
        const double pz = a.dot(z);
        const double tau = rng.normal(0.0, tau_sd);
        const double lo = std::min(pw, pz) - delta;
        const double hi = std::max(pw, pz) + delta;
        if (lo < tau && tau < hi) ++hits;
    }
    MCEstimate est;
    est.estimate = static_cast<double>(hits) / trials;
    est.trials = trials;
    est.std_error = binomial_std_error(est.estimate, trials);
    est.seed = seed;
    return est;
}

MCEstimate mc_flip_probability(const Eigen::VectorXd& x, int n, double R, double sigma_z2,
                               long trials, std::uint64_t seed) {
    check_mc_args(n, R, trials);
    if (!(sigma_z2 >= 0.0)) throw InvalidParameter("mc_flip_probability: sigma_z2 must be >= 0");
    if (x.size() != n) throw DimensionMismatch("mc_flip_probability: x must have dimension n");

    const double item_sd = std::sqrt(2.0 * R * R / n);
    const double noise_sd = std::sqrt(sigma_z2);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    RandomStream rng(seed);
    long flips = 0;
    for (long t = 0; t < trials; ++t) {
        Eigen::VectorXd p, q, diff;
        double dist;
        do {
            p = rng.gaussian_vector(zero, item_sd);
            q = rng.gaussian_vector(zero, item_sd);
            diff = p - q;
            dist = diff.norm();
        } while (dist < 1e-12);
        const double tau = (p.squaredNorm() - q.squaredNorm()) / (2.0 * dist);
        const double clean = diff.dot(x) / dist - tau;
        const double noisy = clean + (noise_sd > 0.0 ? rng.normal(0.0, noise_sd) : 0.0);
        if (clean * noisy < 0.0) ++flips;
    }
    MCEstimate est;
    est.estimate = static_cast<double>(flips) / trials;
    est.trials = trials;
    est.std_error = binomial_std_error(est.estimate, trials);
    est.seed = seed;
    return est;
}

SphereMeanAbs mc_sphere_mean_abs(const Eigen::VectorXd& delta_vec, int n, long trials,
                                 std::uint64_t seed) {
    check_mc_args(n, 1.0, trials);
    if (delta_vec.size() != n)
        throw DimensionMismatch("mc_sphere_mean_abs: delta must have dimension n");

    RandomStream rng(seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long t = 0; t < trials; ++t) {
        const double v = std::abs(rng.unit_sphere(n).dot(delta_vec));
        sum += v;
        sum_sq += v * v;
    }
    SphereMeanAbs out;
    out.trials = trials;
    out.seed = seed;
    out.mc_mean = sum / trials;
    const double var = std::max(0.0, sum_sq / trials - out.mc_mean * out.mc_mean);
    out.std_error = std::sqrt(var / trials);
    const double gamma_ratio =
        std::exp(std::lgamma(n / 2.0) - std::lgamma((n + 1) / 2.0));
    out.prediction_two_over_sqrt_pi = 2.0 / std::sqrt(kPi) * gamma_ratio * delta_vec.norm();
    out.prediction_one_over_sqrt_pi = 1.0 / std::sqrt(kPi) * gamma_ratio * delta_vec.norm();
    return out;
}

CdfBoundsReport check_cdf_bounds(double a_lo, double b_hi, int grid) {
    if (grid < 2) throw InvalidParameter("check_cdf_bounds: grid must be >= 2");
    if (!(b_hi > a_lo)) throw InvalidParameter("check_cdf_bounds: need b_hi > a_lo");

    CdfBoundsReport report;
    report.min_lower_slack = report.min_upper_slack = report.min_zero_slack =
        std::numeric_limits<double>::infinity();
    const double step = (b_hi - a_lo) / (grid - 1);
    // Tiny negative slack from rounding is not a violation of the math.
    const double float_guard = -1e-13;

    for (int i = 0; i < grid; ++i) {
        const double a = a_lo + i * step;
        for (int j = i + 1; j < grid; ++j) {
            const double b = a_lo + j * step;
            const double diff = normal_cdf(b) - normal_cdf(a);
            const double width = b - a;
            const double L = std::min(std::abs(a), std::abs(b));
            const double U = std::max(std::abs(a), std::abs(b));
            const double lower_slack = diff - width * normal_pdf(U);
            const double upper_slack = width * normal_pdf(L) - diff;
            const double zero_slack = width * normal_pdf(0.0) - width * normal_pdf(L);
            ++report.pairs;
            if (lower_slack < float_guard || upper_slack < float_guard ||
                zero_slack < float_guard)
                ++report.violations;
            report.min_lower_slack = std::min(report.min_lower_slack, lower_slack);
            report.min_upper_slack = std::min(report.min_upper_slack, upper_slack);
            report.min_zero_slack = std::min(report.min_zero_slack, zero_slack);
        }
    }
    return report;
}

}  // namespace pairloc
