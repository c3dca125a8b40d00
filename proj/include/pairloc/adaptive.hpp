#pragma once

// Multi-stage localization: each stage re-centers the item distribution at
// the current estimate and halves the working radius, plus the fixed-catalog
// variant where sampled points snap to their nearest catalog item.

#include <cstdint>
#include <optional>
#include <vector>

#include "pairloc/estimators.hpp"
#include "pairloc/model.hpp"
#include "pairloc/noise.hpp"

namespace pairloc {

enum class RoundingPreference { earlier, later };
enum class DyadicTarget { sigma, sigma2 };

struct Stage {
    Eigen::VectorXd center;  // filled in by the runner
    double radius = 0.0;
    double variance = 0.0;
    int budget = 0;
};

struct StageSchedule {
    std::vector<Stage> stages;
    long total_m = 0;
    RoundingPreference rounding = RoundingPreference::earlier;
};

// Equal split of total_m over t stages (remainder per preference), stage
// radii R * 2^{-l} for l = 0..t-1, variances 2 R_l^2 / n.
StageSchedule build_schedule(double R, int n, int t, long total_m, RoundingPreference pref);

struct ItemCatalog {
    Eigen::MatrixXd items;  // one row per item

    explicit ItemCatalog(Eigen::MatrixXd rows);
    int dimension() const { return static_cast<int>(items.cols()); }
    long size() const { return items.rows(); }
    long nearest(const Eigen::VectorXd& point) const;

    static ItemCatalog uniform_ball(long count, int n, double radius, std::uint64_t seed);
};

// Coordinate-averaged population variance of the catalog; the initial
// variance of a catalog schedule.  Throws on a degenerate (zero-variance)
// catalog.
double catalog_schedule_variance(const ItemCatalog& catalog);

// Stage variances sigma_0^2 * 2^{-l} (dyadic in sigma^2, default) or
// sigma_0^2 * 4^{-l} (dyadic in sigma); radii follow the usual halving law.
StageSchedule build_catalog_schedule(const ItemCatalog& catalog, double R, int t, long total_m,
                                     RoundingPreference pref,
                                     DyadicTarget target = DyadicTarget::sigma2);

// Replaces each sampled point by its nearest catalog item; pairs whose two
// points snap to the same item are redrawn from N(mean, variance I) (at most
// 100 times, then DegeneratePair).  `seed` drives only the redraws.
ComparisonFrame nearest_item_frame(const std::vector<ItemPair>& pairs,
                                   const ItemCatalog& catalog, const Eigen::VectorXd& mean,
                                   double variance, std::uint64_t seed);

enum class StageEstimator { min_norm, nu_svm };

struct AdaptiveOptions {
    StageEstimator estimator = StageEstimator::min_norm;
    EstimatorConfig estimator_config;          // R is overridden per stage
    const ItemCatalog* catalog = nullptr;      // snap sampled points when set
};

struct StageOutcome {
    int stage = 0;
    Eigen::VectorXd center;
    double radius = 0.0;
    double variance = 0.0;
    int budget = 0;
    Eigen::VectorXd x_hat;
    EstimateStatus status = EstimateStatus::converged;
};

struct AdaptiveResult {
    std::vector<StageOutcome> trajectory;
    Eigen::VectorXd final_x_hat;
    bool completed = false;  // false when a stage failed and the run aborted
};

// Runs the schedule against the (otherwise hidden) truth x_true: stage l
// draws its pairs from N(center_l, sigma_l^2 I), observes, optionally
// corrupts, and solves for the offset from the current center with the
// stage radius.  Stage l consumes the seed stream derive_seed(seed, l).
AdaptiveResult run_adaptive(const Eigen::VectorXd& x_true, double R, int n,
                            const StageSchedule& schedule,
                            const std::optional<NoiseSpec>& noise, std::uint64_t seed,
                            const AdaptiveOptions& options = {});

}  // namespace pairloc
