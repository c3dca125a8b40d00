#include "pairloc/adaptive.hpp"

#include <cmath>

#include "pairloc/rng.hpp"

namespace pairloc {

namespace {

constexpr int kRemapRetries = 100;
constexpr std::uint64_t kNoiseSalt = 0x6e6f6973;   // per-stage noise stream
constexpr std::uint64_t kRemapSalt = 0x72656d61;   // catalog redraw stream

}  // namespace

StageSchedule build_schedule(double R, int n, int t, long total_m, RoundingPreference pref) {
    if (!(R > 0.0)) throw InvalidParameter("build_schedule: R must be > 0");
    if (n < 1) throw InvalidParameter("build_schedule: n must be >= 1");
    if (t < 1) throw InvalidParameter("build_schedule: t must be >= 1");
    if (total_m < t) throw InvalidParameter("build_schedule: total_m must be >= t");

    StageSchedule schedule;
    schedule.total_m = total_m;
    schedule.rounding = pref;
    const long base = total_m / t;
    const long remainder = total_m % t;
    for (int l = 0; l < t; ++l) {
        Stage stage;
        stage.radius = R * std::pow(2.0, -l);
        stage.variance = 2.0 * stage.radius * stage.radius / n;
        const bool bonus = pref == RoundingPreference::earlier ? l < remainder
                                                               : l >= t - remainder;
        stage.budget = static_cast<int>(base + (bonus ? 1 : 0));
        schedule.stages.push_back(std::move(stage));
    }
    return schedule;
}

ItemCatalog::ItemCatalog(Eigen::MatrixXd rows) : items(std::move(rows)) {
    if (items.rows() < 1) throw InvalidParameter("catalog: must be nonempty");
    if (items.cols() < 1) throw InvalidParameter("catalog: dimension must be >= 1");
}

long ItemCatalog::nearest(const Eigen::VectorXd& point) const {
    if (point.size() != items.cols())
        throw DimensionMismatch("catalog: query dimension does not match items");
    long best = 0;
    double best_dist = (items.row(0).transpose() - point).squaredNorm();
    for (long i = 1; i < items.rows(); ++i) {
        const double d = (items.row(i).transpose() - point).squaredNorm();
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

ItemCatalog ItemCatalog::uniform_ball(long count, int n, double radius, std::uint64_t seed) {
    if (count < 1) throw InvalidParameter("catalog: count must be >= 1");
    if (n < 1) throw InvalidParameter("catalog: n must be >= 1");
    RandomStream rng(seed);
    Eigen::MatrixXd items(count, n);
    for (long i = 0; i < count; ++i) {
        const Eigen::VectorXd dir = rng.unit_sphere(n);
        const double r = radius * std::pow(rng.uniform(), 1.0 / n);
        items.row(i) = (r * dir).transpose();
    }
    return ItemCatalog(std::move(items));
}

double catalog_schedule_variance(const ItemCatalog& catalog) {
    const long count = catalog.size();
    const Eigen::VectorXd mean = catalog.items.colwise().mean();
    double total = 0.0;
    for (int j = 0; j < catalog.dimension(); ++j)
        total += (catalog.items.col(j).array() - mean[j]).square().sum() / count;
    const double sigma0 = total / catalog.dimension();
    if (!(sigma0 > 0.0))
        throw InvalidParameter("catalog_schedule_variance: catalog has zero variance");
    return sigma0;
}

StageSchedule build_catalog_schedule(const ItemCatalog& catalog, double R, int t, long total_m,
                                     RoundingPreference pref, DyadicTarget target) {
    StageSchedule schedule = build_schedule(R, catalog.dimension(), t, total_m, pref);
    const double sigma0 = catalog_schedule_variance(catalog);
    const double shrink = target == DyadicTarget::sigma2 ? 0.5 : 0.25;
    double variance = sigma0;
    for (auto& stage : schedule.stages) {
        stage.variance = variance;
        variance *= shrink;
    }
    return schedule;
}

ComparisonFrame nearest_item_frame(const std::vector<ItemPair>& pairs,
                                   const ItemCatalog& catalog, const Eigen::VectorXd& mean,
                                   double variance, std::uint64_t seed) {
    RandomStream redraw_rng(derive_seed(seed, kRemapSalt));
    const double stddev = std::sqrt(variance);
    std::vector<ItemPair> mapped;
    mapped.reserve(pairs.size());
    for (const ItemPair& pair : pairs) {
        long pi = catalog.nearest(pair.p);
        long qi = catalog.nearest(pair.q);
        int attempts = 0;
        while (pi == qi) {
            if (attempts++ >= kRemapRetries)
                throw DegeneratePair("nearest_item_frame: catalog too coarse for the variance");
            const Eigen::VectorXd p = redraw_rng.gaussian_vector(mean, stddev);
            const Eigen::VectorXd q = redraw_rng.gaussian_vector(mean, stddev);
            pi = catalog.nearest(p);
            qi = catalog.nearest(q);
        }
        mapped.push_back({catalog.items.row(pi).transpose(), catalog.items.row(qi).transpose()});
    }
    return derive_frame(mapped);
}

AdaptiveResult run_adaptive(const Eigen::VectorXd& x_true, double R, int n,
                            const StageSchedule& schedule,
                            const std::optional<NoiseSpec>& noise, std::uint64_t seed,
                            const AdaptiveOptions& options) {
    if (x_true.size() != n) throw DimensionMismatch("run_adaptive: x_true dimension != n");
    if (x_true.norm() > R + 1e-12)
        throw InvalidParameter("run_adaptive: x_true must lie in the radius-R ball");

    AdaptiveResult result;
    Eigen::VectorXd center = Eigen::VectorXd::Zero(n);

    for (std::size_t l = 0; l < schedule.stages.size(); ++l) {
        const Stage& stage = schedule.stages[l];
        const std::uint64_t stage_seed = derive_seed(seed, l);

        StageOutcome outcome;
        outcome.stage = static_cast<int>(l);
        outcome.center = center;
        outcome.radius = stage.radius;
        outcome.variance = stage.variance;
        outcome.budget = stage.budget;

        const std::vector<ItemPair> pairs =
            sample_pairs(stage.budget, n, center, stage.variance, stage_seed);
        ComparisonFrame frame = options.catalog
            ? nearest_item_frame(pairs, *options.catalog, center, stage.variance, stage_seed)
            : derive_frame(pairs, GenParams{center, stage.variance, stage_seed, false});

        const SignVector clean = observe(x_true, frame);
        SignVector signs = clean;
        if (noise && noise->kind != NoiseKind::none) {
            NoiseSpec stage_noise = *noise;
            stage_noise.seed = derive_seed(noise->seed, kNoiseSalt + l);
            signs = apply_noise(stage_noise, x_true, frame, clean);
        }

        // Solve for the offset d = w - center: shift every threshold by
        // a_i^T center and work in the stage ball of radius R_l.
        ComparisonFrame shifted(frame.normals(),
                                frame.offsets() - frame.normals() * center);
        EstimateResult est;
        if (options.estimator == StageEstimator::min_norm) {
            est = estimate_noise_free(shifted, signs, stage.radius,
                                      options.estimator_config.solver_tol);
        } else {
            EstimatorConfig cfg = options.estimator_config;
            cfg.R = stage.radius;
            est = estimate_nu_svm(shifted, signs, cfg);
        }

        outcome.status = est.status;
        if (est.status == EstimateStatus::converged) outcome.x_hat = center + est.x_hat;
        result.trajectory.push_back(outcome);

        if (est.status != EstimateStatus::converged) {
            result.completed = false;
            return result;  // partial trajectory
        }
        center = result.trajectory.back().x_hat;
    }

    result.final_x_hat = center;
    result.completed = true;
    return result;
}

}  // namespace pairloc
