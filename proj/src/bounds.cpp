#include "pairloc/bounds.hpp"

#include <cmath>
#include <limits>

#include "pairloc/errors.hpp"

namespace pairloc {

namespace {

const double kPi = std::acos(-1.0);

long long ceil_to_count(double rhs, const char* what) {
    if (!std::isfinite(rhs) || rhs > 9e18)
        throw InvalidParameter(std::string(what) + ": bound overflows a 64-bit count");
    return static_cast<long long>(std::ceil(rhs));
}

double deviation_term(long m, int n, double eta) {
    return std::sqrt((n * std::log(18.0 * m) + std::log(2.0 / eta)) / (2.0 * m));
}

}  // namespace

double sample_complexity_prefactor() {
    static const double value = 44.0 * std::sqrt(kPi) * std::exp(2.5);
    return value;
}

long long sufficient_m(double R, double eps, int n, double eta) {
    if (!(R > 0.0)) throw InvalidParameter("sufficient_m: R must be > 0");
    if (!(eps > 0.0 && eps <= 2.0 * R))
        throw InvalidParameter("sufficient_m: eps must be in (0, 2R]");
    if (n < 1) throw InvalidParameter("sufficient_m: n must be >= 1");
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidParameter("sufficient_m: eta must be in (0, 1)");
    const double rhs = sample_complexity_prefactor() * (R / eps) *
                       (2.0 * n * std::log(3.0 * R * (4.0 + std::sqrt(8.0 * n)) / eps) +
                        std::log(1.0 / eta));
    return ceil_to_count(rhs, "sufficient_m");
}

double lower_bound_m(double R, double eps, int n) {
    if (!(R > 0.0) || !(eps > 0.0)) throw InvalidParameter("lower_bound_m: R, eps must be > 0");
    if (n < 1) throw InvalidParameter("lower_bound_m: n must be >= 1");
    return (2.0 / std::exp(1.0)) * (R / eps) * n;
}

BigInt cell_count(long m, int n) {
    if (m < 0 || m > 10000) throw InvalidParameter("cell_count: m must be in [0, 10^4]");
    if (n < 0) throw InvalidParameter("cell_count: n must be >= 0");
    // Running binomial: binom(m, i) = binom(m, i-1) * (m - i + 1) / i, exact.
    BigInt total = 1;
    BigInt binom = 1;
    for (int i = 1; i <= n && i <= m; ++i) {
        binom *= m - i + 1;
        binom /= i;
        total += binom;
    }
    return total;
}

double kappa_n(double sigma_z2, double R, int n, double x_norm) {
    if (n < 2) throw InvalidParameter("kappa_n: n must be >= 2");
    if (!(R > 0.0)) throw InvalidParameter("kappa_n: R must be > 0");
    if (!(sigma_z2 >= 0.0)) throw InvalidParameter("kappa_n: sigma_z2 must be >= 0");
    if (!(x_norm >= 0.0 && x_norm <= R))
        throw InvalidParameter("kappa_n: x_norm must be in [0, R]");
    if (sigma_z2 == 0.0) return 0.0;
    if (n == 2) return 0.5 * std::sqrt(sigma_z2 / (sigma_z2 + R * R));
    if (n == 3) {
        const double first = std::sqrt(sigma_z2 / (sigma_z2 + 2.0 * R * R / 3.0));
        if (x_norm == 0.0) return first;  // second branch is +infinity
        const double second = std::sqrt(kPi / 2.0) * std::sqrt(sigma_z2) / x_norm;
        return std::min(first, second);
    }
    return std::sqrt(sigma_z2 /
                     (sigma_z2 + 2.0 * R * R / n + 4.0 * x_norm * x_norm / n));
}

EmbeddingConstants embedding_constants() {
    EmbeddingConstants k;
    const double base = std::exp(2.5) * std::sqrt(kPi);
    k.C1 = 1.0 / (22.0 * base);
    k.C2 = std::sqrt(2.0 / kPi);
    k.c1 = 1.0 + 1.0 / (11.0 * base) + std::sqrt(2.0 / kPi);
    k.c2 = 1.0 + 3.0 * std::sqrt(2.0 / kPi);
    return k;
}

double zeta_of_m(long m, int n, double eta) {
    if (m < 1) throw InvalidParameter("zeta_of_m: m must be >= 1");
    if (n < 1) throw InvalidParameter("zeta_of_m: n must be >= 1");
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidParameter("zeta_of_m: eta must be in (0, 1)");
    if (18.0 * m * std::pow(2.0 / eta, 1.0 / n) < std::exp(1.0))
        throw InvalidParameter("zeta_of_m: m below the validity threshold");
    return deviation_term(m, n, eta);
}

long long embedding_m(double zeta, int n, double eta) {
    if (!(zeta > 0.0)) throw InvalidParameter("embedding_m: zeta must be > 0");
    if (n < 1) throw InvalidParameter("embedding_m: n must be >= 1");
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidParameter("embedding_m: eta must be in (0, 1)");
    const double rhs = (1.0 / (2.0 * zeta * zeta)) *
                       (2.0 * n * std::log(3.0 * std::sqrt(static_cast<double>(n)) / zeta) +
                        std::log(2.0 / eta));
    return ceil_to_count(rhs, "embedding_m");
}

double error_bound_flips(double kappa, long m, int n, double eta, double R) {
    if (!(kappa >= 0.0)) throw InvalidParameter("error_bound_flips: kappa must be >= 0");
    if (m < 1 || n < 1) throw InvalidParameter("error_bound_flips: m, n must be >= 1");
    if (!(eta > 0.0 && eta < 1.0))
        throw InvalidParameter("error_bound_flips: eta must be in (0, 1)");
    if (!(R > 0.0)) throw InvalidParameter("error_bound_flips: R must be > 0");
    const EmbeddingConstants k = embedding_constants();
    return R * (2.0 * kappa / k.C1 + (k.c1 / k.C1) * deviation_term(m, n, eta));
}

double error_bound_gaussian(double sigma_z2, long m, int n, double eta, double R) {
    if (!(sigma_z2 >= 0.0))
        throw InvalidParameter("error_bound_gaussian: sigma_z2 must be >= 0");
    if (m < 1 || n < 1) throw InvalidParameter("error_bound_gaussian: m, n must be >= 1");
    if (!(eta > 0.0 && eta < 1.0))
        throw InvalidParameter("error_bound_gaussian: eta must be in (0, 1)");
    if (!(R > 0.0)) throw InvalidParameter("error_bound_gaussian: R must be > 0");
    const EmbeddingConstants k = embedding_constants();
    return R * ((std::sqrt(2.0) / k.C1) * std::sqrt(n * sigma_z2 / (R * R)) +
                (1.0 / k.C1) * std::sqrt(std::log(1.0 / eta) / (2.0 * m)) +
                (k.c1 / k.C1) * deviation_term(m, n, eta));
}

double error_bound_arbitrary(double perturb_norm, long m, int n, double eta, double R) {
    if (!(perturb_norm >= 0.0))
        throw InvalidParameter("error_bound_arbitrary: perturb_norm must be >= 0");
    if (m < 1 || n < 1) throw InvalidParameter("error_bound_arbitrary: m, n must be >= 1");
    if (!(eta > 0.0 && eta < 1.0))
        throw InvalidParameter("error_bound_arbitrary: eta must be in (0, 1)");
    if (!(R > 0.0)) throw InvalidParameter("error_bound_arbitrary: R must be > 0");
    const EmbeddingConstants k = embedding_constants();
    return R * ((2.0 * k.C2 / k.C1) * (perturb_norm / R) +
                ((k.c1 + 2.0 * k.c2) / k.C1) * deviation_term(m, n, eta));
}

long long adaptive_m(double R, double eps_t, int n, double eta, double C) {
    if (!(R > 0.0)) throw InvalidParameter("adaptive_m: R must be > 0");
    if (!(eps_t > 0.0 && eps_t <= 2.0 * R))
        throw InvalidParameter("adaptive_m: eps_t must be in (0, 2R]");
    if (n < 1) throw InvalidParameter("adaptive_m: n must be >= 1");
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidParameter("adaptive_m: eta must be in (0, 1)");
    if (C == 0.0) C = sample_complexity_prefactor();
    if (!(C > 0.0)) throw InvalidParameter("adaptive_m: C must be > 0");
    const double rhs = 2.0 * C * std::log2(2.0 * R / eps_t) *
                       (n * std::log(2.0 * std::sqrt(static_cast<double>(n))) +
                        std::log(1.0 / eta));
    return ceil_to_count(rhs, "adaptive_m");
}

}  // namespace pairloc
