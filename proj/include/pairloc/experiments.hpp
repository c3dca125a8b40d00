#pragma once

// Experiment harness: typed configuration on top of KeyValueConfig, seeded
// trial orchestration across a thread pool, and CSV emission.  Every output
// file carries a `# pairloc-version=... config-hash=...` header so results
// are traceable to the exact configuration that produced them.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pairloc/adaptive.hpp"
#include "pairloc/config.hpp"
#include "pairloc/estimators.hpp"
#include "pairloc/noise.hpp"

namespace pairloc {

enum class ExperimentKind {
    sigma_sweep,
    noise_gaussian,
    noise_random,
    noise_adversarial,
    adaptive_stages,
    adaptive_catalog,
    validate,
    bounds_report,
};

ExperimentKind experiment_from_name(const std::string& name);
const char* to_string(ExperimentKind kind);

// Seed-stream salts for the independent sub-streams of one trial.
inline constexpr std::uint64_t kSaltTruth = 1;
inline constexpr std::uint64_t kSaltPairs = 2;
inline constexpr std::uint64_t kSaltNoise = 3;
inline constexpr std::uint64_t kSaltCatalog = 4;
// Stage l of an adaptive run corrupts its signs with the stream
// derive_seed(noise_seed, kStageNoiseSalt + l).
inline constexpr std::uint64_t kStageNoiseSalt = 0x6e6f6973;

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::sigma_sweep;
    int n = 2;
    double R = 1.0;
    long m = 0;
    int trials = 100;
    std::uint64_t seed = 1;
    double x_norm = 1.0;

    StageEstimator estimator_kind = StageEstimator::min_norm;
    bool nu_auto = true;             // nu from the 2*kappa rule per noise level
    EstimatorConfig estimator;

    NoiseKind noise_kind = NoiseKind::none;
    std::uint64_t noise_seed = 0;    // base; per-trial streams derive from it

    std::vector<int> stage_counts = {1, 4};
    RoundingPreference rounding = RoundingPreference::earlier;
    DyadicTarget dyadic = DyadicTarget::sigma2;
    long catalog_items = 2000;

    std::vector<double> sweep;

    long validate_trials = 1000000;

    // bounds-report inputs (only the provided ones are evaluated)
    double eps = 0.0, eta = 0.0, sigma_z2 = -1.0, kappa = -1.0, zeta = -1.0,
           perturb_norm = -1.0, eps_t = -1.0, bound_C = 0.0;
    long cells_m = -1;
    std::string bounds_format = "text";

    std::string out_path;
    std::uint64_t config_hash = 0;

    static ExperimentConfig from_config(ExperimentKind kind, const KeyValueConfig& cfg);
};

struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    Eigen::VectorXd x_true;
    Eigen::VectorXd x_hat;
    double err = 0.0;
    double dh_clean = 0.0;   // d_H(observe(x_hat), observe(x_true))
    double dh_noisy = 0.0;   // d_H(observe(x_hat), corrupted signs)
    double rho = 0.0;        // NaN outside the nu-SVM path
    EstimateStatus status = EstimateStatus::converged;
};

struct ExperimentOutcome {
    long runs = 0;
    long failures = 0;  // estimator runs that did not converge
    int exit_code = 0;  // 3 when failures exceed half of runs
};

// Runs the configured experiment and writes its CSV outputs (aggregates at
// the out path, per-trial records next to it).  `threads` <= 0 picks the
// hardware concurrency; output bytes do not depend on the thread count.
ExperimentOutcome run_experiment(const ExperimentConfig& config, int threads);

// One non-adaptive estimation trial (sample, observe, corrupt, estimate);
// shared by the sweep experiments and equivalent to a one-stage adaptive run
// at the same seed.
TrialRecord run_single_trial(const ExperimentConfig& config, double variance,
                             const std::optional<NoiseSpec>& noise, double nu,
                             int trial_index);

// Pivots an aggregates CSV into tidy gnuplot-ready columns
// (x, series, mean, median, stderr).
void emit_plot_data(std::istream& in, std::ostream& out);

void parallel_trials(int count, int threads, const std::function<void(int)>& fn);

std::string output_header(std::uint64_t config_hash);

}  // namespace pairloc
