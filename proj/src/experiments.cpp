#include "pairloc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "pairloc/bounds.hpp"
#include "pairloc/mc_validation.hpp"
#include "pairloc/rng.hpp"
#include "pairloc/version.hpp"

namespace pairloc {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string vector_cells(const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out += fmt(v[i]);
        out += ',';
    }
    return out;
}

std::string vector_header(const std::string& prefix, int n) {
    std::string out;
    for (int i = 1; i <= n; ++i) out += prefix + "_" + std::to_string(i) + ",";
    return out;
}

std::ofstream open_output(const std::string& path, std::uint64_t config_hash) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << output_header(config_hash);
    return out;
}

std::string sibling_path(const std::string& out_path, const std::string& suffix) {
    std::filesystem::path p(out_path);
    const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
    std::filesystem::path q = p;
    q.replace_extension();
    return q.string() + suffix + ext;
}

struct Aggregate {
    long trials = 0;
    long converged = 0;
    long nonpos_rho = 0;
    double mean_err = kNaN;
    double median_err = kNaN;
    double stderr_err = kNaN;
    double mean_dh_noisy = kNaN;
    double max_dh_noisy = kNaN;
};

// Aggregates over converged trials, in trial order so the result does not
// depend on the execution schedule.
Aggregate aggregate_records(const std::vector<TrialRecord>& records) {
    Aggregate agg;
    agg.trials = static_cast<long>(records.size());
    std::vector<double> errors;
    std::vector<double> dh_noisy;
    for (const TrialRecord& rec : records) {
        if (rec.status != EstimateStatus::converged) continue;
        ++agg.converged;
        errors.push_back(rec.err);
        if (std::isfinite(rec.rho)) {
            if (rec.rho <= 0.0) ++agg.nonpos_rho;
            else dh_noisy.push_back(rec.dh_noisy);
        }
    }
    if (!errors.empty()) {
        double sum = 0.0;
        for (double e : errors) sum += e;
        agg.mean_err = sum / errors.size();
        double sq = 0.0;
        for (double e : errors) sq += (e - agg.mean_err) * (e - agg.mean_err);
        agg.stderr_err = errors.size() > 1
                             ? std::sqrt(sq / (errors.size() - 1.0) / errors.size())
                             : 0.0;
        std::vector<double> sorted = errors;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t mid = sorted.size() / 2;
        agg.median_err = sorted.size() % 2 == 1
                             ? sorted[mid]
                             : 0.5 * (sorted[mid - 1] + sorted[mid]);
    }
    if (!dh_noisy.empty()) {
        double sum = 0.0, mx = 0.0;
        for (double d : dh_noisy) {
            sum += d;
            mx = std::max(mx, d);
        }
        agg.mean_dh_noisy = sum / dh_noisy.size();
        agg.max_dh_noisy = mx;
    }
    return agg;
}

void write_trial_row(std::ostream& out, const std::string& prefix, const TrialRecord& rec) {
    out << prefix << rec.trial << ',' << rec.seed << ',' << vector_cells(rec.x_true)
        << vector_cells(rec.x_hat) << fmt(rec.err) << ',' << fmt(rec.dh_clean) << ','
        << fmt(rec.dh_noisy) << ',' << fmt(rec.rho) << ',' << to_string(rec.status) << "\n";
}

}  // namespace

std::string output_header(std::uint64_t config_hash) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(config_hash));
    return std::string("# pairloc-version=") + kVersion + " config-hash=" + buf + "\n";
}

ExperimentKind experiment_from_name(const std::string& name) {
    if (name == "sigma_sweep") return ExperimentKind::sigma_sweep;
    if (name == "noise_gaussian") return ExperimentKind::noise_gaussian;
    if (name == "noise_random") return ExperimentKind::noise_random;
    if (name == "noise_adversarial") return ExperimentKind::noise_adversarial;
    if (name == "adaptive_stages") return ExperimentKind::adaptive_stages;
    if (name == "adaptive_catalog") return ExperimentKind::adaptive_catalog;
    if (name == "validate") return ExperimentKind::validate;
    if (name == "bounds") return ExperimentKind::bounds_report;
    throw ConfigError("unknown experiment '" + name + "'");
}

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::sigma_sweep: return "sigma_sweep";
        case ExperimentKind::noise_gaussian: return "noise_gaussian";
        case ExperimentKind::noise_random: return "noise_random";
        case ExperimentKind::noise_adversarial: return "noise_adversarial";
        case ExperimentKind::adaptive_stages: return "adaptive_stages";
        case ExperimentKind::adaptive_catalog: return "adaptive_catalog";
        case ExperimentKind::validate: return "validate";
        case ExperimentKind::bounds_report: return "bounds";
    }
    return "unknown";
}

ExperimentConfig ExperimentConfig::from_config(ExperimentKind kind, const KeyValueConfig& cfg) {
    ExperimentConfig ec;
    ec.kind = kind;
    ec.config_hash = cfg.content_hash();

    if (cfg.has("experiment") && experiment_from_name(cfg.get_string("experiment")) != kind)
        throw ConfigError("config names a different experiment than requested");

    const bool is_noise = kind == ExperimentKind::noise_gaussian ||
                          kind == ExperimentKind::noise_random ||
                          kind == ExperimentKind::noise_adversarial;
    const bool is_adaptive = kind == ExperimentKind::adaptive_stages ||
                             kind == ExperimentKind::adaptive_catalog;

    // Dimension / scale defaults mirror the simulation setups.
    int default_n = 2;
    double default_xnorm = 1.0;
    long default_m = 50;
    int default_trials = 1000;
    if (is_noise) {
        default_n = 5;
        default_xnorm = 0.7;
        default_m = 1000;
        default_trials = 100;
    } else if (kind == ExperimentKind::adaptive_stages) {
        default_n = 3;
        default_xnorm = 0.75;
        default_trials = 200;
    } else if (kind == ExperimentKind::adaptive_catalog) {
        default_n = 3;
        default_xnorm = 0.4;
        default_trials = 50;
    }

    ec.n = cfg.get_int("n", default_n);
    ec.R = cfg.get_double("R", 1.0);
    ec.m = cfg.get_long("m", default_m);
    ec.trials = cfg.get_int("trials", default_trials);
    ec.seed = cfg.get_uint64("seed", 1);
    ec.x_norm = cfg.get_double("x_norm", default_xnorm);
    ec.out_path = cfg.get_string("out", std::string(to_string(kind)) + ".csv");

    if (ec.n < 1) throw ConfigError("config: n must be >= 1");
    if (!(ec.R > 0.0)) throw ConfigError("config: R must be > 0");
    if (ec.trials < 1) throw ConfigError("config: trials must be >= 1");
    if (ec.m < 0) throw ConfigError("config: m must be >= 0");
    if (ec.x_norm < 0.0 || ec.x_norm > ec.R)
        throw ConfigError("config: x_norm must be in [0, R]");

    const std::string est = cfg.get_string("estimator.kind", is_noise ? "nu_svm" : "min_norm");
    if (est == "min_norm") ec.estimator_kind = StageEstimator::min_norm;
    else if (est == "nu_svm") ec.estimator_kind = StageEstimator::nu_svm;
    else throw ConfigError("config: estimator.kind must be min_norm or nu_svm");

    ec.estimator.R = ec.R;
    const std::string nu = cfg.get_string("estimator.nu", "auto");
    if (nu == "auto") {
        ec.nu_auto = true;
    } else {
        ec.nu_auto = false;
        ec.estimator.nu = cfg.get_double("estimator.nu");
    }
    ec.estimator.chi = cfg.get_double("estimator.chi", ec.estimator.chi);
    ec.estimator.max_outer_iters = cfg.get_int("estimator.max_outer_iters",
                                               ec.estimator.max_outer_iters);
    ec.estimator.convergence_tol = cfg.get_double("estimator.convergence_tol",
                                                  ec.estimator.convergence_tol);
    ec.estimator.solver_tol = cfg.get_double("estimator.solver_tol", ec.estimator.solver_tol);
    ec.estimator.trust_box = cfg.get_double("estimator.trust_box", ec.estimator.trust_box);

    std::string default_noise = "none";
    if (kind == ExperimentKind::noise_gaussian) default_noise = "gaussian_prequant";
    if (kind == ExperimentKind::noise_random) default_noise = "random_flip";
    if (kind == ExperimentKind::noise_adversarial) default_noise = "adversarial_flip";
    const std::string noise_name = cfg.get_string("noise.kind", default_noise);
    if (noise_name == "none") ec.noise_kind = NoiseKind::none;
    else if (noise_name == "gaussian_prequant") ec.noise_kind = NoiseKind::gaussian_prequant;
    else if (noise_name == "random_flip") ec.noise_kind = NoiseKind::random_flip;
    else if (noise_name == "adversarial_flip") ec.noise_kind = NoiseKind::adversarial_flip;
    else if (noise_name == "perturbed_point") ec.noise_kind = NoiseKind::perturbed_point;
    else throw ConfigError("config: unknown noise.kind '" + noise_name + "'");
    if (kind == ExperimentKind::noise_gaussian &&
        ec.noise_kind != NoiseKind::gaussian_prequant &&
        ec.noise_kind != NoiseKind::perturbed_point)
        throw ConfigError("config: noise_gaussian requires a Gaussian noise kind");
    if (kind == ExperimentKind::noise_random && ec.noise_kind != NoiseKind::random_flip)
        throw ConfigError("config: noise_random requires noise.kind = random_flip");
    if (kind == ExperimentKind::noise_adversarial &&
        ec.noise_kind != NoiseKind::adversarial_flip)
        throw ConfigError("config: noise_adversarial requires noise.kind = adversarial_flip");
    ec.noise_seed = cfg.get_uint64("noise.seed", derive_seed(ec.seed, kSaltNoise));

    if (cfg.has("adaptive.stages")) ec.stage_counts = cfg.get_int_list("adaptive.stages");
    for (int t : ec.stage_counts)
        if (t < 1) throw ConfigError("config: adaptive.stages entries must be >= 1");
    const std::string rounding = cfg.get_string(
        "adaptive.rounding",
        kind == ExperimentKind::adaptive_catalog ? "later" : "earlier");
    if (rounding == "earlier") ec.rounding = RoundingPreference::earlier;
    else if (rounding == "later") ec.rounding = RoundingPreference::later;
    else throw ConfigError("config: adaptive.rounding must be earlier or later");
    const std::string dyadic = cfg.get_string("adaptive.dyadic_target", "sigma2");
    if (dyadic == "sigma") ec.dyadic = DyadicTarget::sigma;
    else if (dyadic == "sigma2") ec.dyadic = DyadicTarget::sigma2;
    else throw ConfigError("config: adaptive.dyadic_target must be sigma or sigma2");
    ec.catalog_items = cfg.get_long("catalog.items", ec.catalog_items);
    if (ec.catalog_items < 1) throw ConfigError("config: catalog.items must be >= 1");

    if (cfg.has("sweep")) {
        ec.sweep = cfg.get_double_list("sweep");
    } else {
        switch (kind) {
            case ExperimentKind::sigma_sweep:
                ec.sweep = {0.01, 0.1, 1.0, 10.0, 100.0};
                break;
            case ExperimentKind::noise_gaussian:
                ec.sweep = {0.0, 0.01, 0.05, 0.1, 0.2, 0.5};
                break;
            case ExperimentKind::noise_random:
            case ExperimentKind::noise_adversarial:
                ec.sweep = {0.0, 0.02, 0.05, 0.10, 0.15, 0.20};
                break;
            case ExperimentKind::adaptive_stages:
            case ExperimentKind::adaptive_catalog:
                // Documented default grid: powers of two, 2^4 .. 2^12.
                for (int p = 4; p <= 12; ++p) ec.sweep.push_back(std::pow(2.0, p));
                break;
            default:
                break;
        }
    }

    ec.validate_trials = cfg.get_long("validate.trials", ec.validate_trials);
    if (ec.validate_trials < 1) throw ConfigError("config: validate.trials must be >= 1");

    ec.eps = cfg.get_double("bounds.eps", 0.0);
    ec.eta = cfg.get_double("bounds.eta", 0.0);
    ec.sigma_z2 = cfg.get_double("bounds.sigma_z2", -1.0);
    ec.kappa = cfg.get_double("bounds.kappa", -1.0);
    ec.zeta = cfg.get_double("bounds.zeta", -1.0);
    ec.perturb_norm = cfg.get_double("bounds.perturb_norm", -1.0);
    ec.eps_t = cfg.get_double("bounds.eps_t", -1.0);
    ec.bound_C = cfg.get_double("bounds.C", 0.0);
    ec.cells_m = cfg.get_long("bounds.cells_m", -1);
    ec.bounds_format = cfg.get_string("bounds.format", "text");
    if (ec.bounds_format != "text" && ec.bounds_format != "csv")
        throw ConfigError("config: bounds.format must be text or csv");

    if (is_adaptive) {
        for (double total : ec.sweep) {
            const long tm = static_cast<long>(total);
            if (static_cast<double>(tm) != total || tm < 1)
                throw ConfigError("config: adaptive sweep entries must be positive integers");
            for (int t : ec.stage_counts)
                if (tm < t)
                    throw ConfigError("config: total_m below the stage count in the sweep");
        }
    }

    const std::vector<std::string> unused = cfg.unused_keys();
    if (!unused.empty()) {
        std::string msg = "config: unknown key(s):";
        for (const std::string& k : unused) msg += " " + k;
        throw ConfigError(msg);
    }
    return ec;
}

void parallel_trials(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

TrialRecord run_single_trial(const ExperimentConfig& config, double variance,
                             const std::optional<NoiseSpec>& noise, double nu,
                             int trial_index) {
    const std::uint64_t trial_seed = derive_seed(config.seed, trial_index);
    const int n = config.n;

    TrialRecord rec;
    rec.trial = trial_index;
    rec.seed = trial_seed;
    rec.x_true = RandomStream(derive_seed(trial_seed, kSaltTruth)).unit_sphere(n) * config.x_norm;
    rec.rho = kNaN;
    rec.dh_clean = kNaN;
    rec.dh_noisy = kNaN;

    const std::uint64_t run_seed = derive_seed(trial_seed, kSaltPairs);
    const std::uint64_t stage_seed = derive_seed(run_seed, 0);
    const ComparisonFrame frame =
        config.m > 0 ? sample_frame(static_cast<int>(config.m), n, Eigen::VectorXd::Zero(n),
                                    variance, stage_seed)
                     : ComparisonFrame(Eigen::MatrixXd(0, n), Eigen::VectorXd(0));

    const SignVector clean = observe(rec.x_true, frame);
    SignVector signs = clean;
    if (noise && noise->kind != NoiseKind::none) {
        NoiseSpec spec = *noise;
        spec.seed = derive_seed(derive_seed(trial_seed, kSaltNoise), kStageNoiseSalt);
        signs = apply_noise(spec, rec.x_true, frame, clean);
    }

    EstimateResult est;
    if (config.estimator_kind == StageEstimator::min_norm) {
        est = estimate_noise_free(frame, signs, config.R, config.estimator.solver_tol);
    } else {
        EstimatorConfig cfg = config.estimator;
        cfg.nu = nu;
        est = estimate_nu_svm(frame, signs, cfg);
    }

    rec.status = est.status;
    rec.x_hat = est.status == EstimateStatus::converged ? est.x_hat : Eigen::VectorXd::Zero(n);
    rec.err = est.status == EstimateStatus::converged ? (rec.x_hat - rec.x_true).norm() : kNaN;
    if (est.rho) rec.rho = *est.rho;
    if (est.status == EstimateStatus::converged && frame.count() > 0) {
        const SignVector predicted = observe(rec.x_hat, frame);
        rec.dh_clean = hamming(predicted, clean);
        rec.dh_noisy = hamming(predicted, signs);
    }
    return rec;
}

namespace {

ExperimentOutcome run_sweep_experiment(const ExperimentConfig& config, int threads) {
    std::ofstream agg_out = open_output(config.out_path, config.config_hash);
    std::ofstream trial_out =
        open_output(sibling_path(config.out_path, "_trials"), config.config_hash);

    const bool is_sigma = config.kind == ExperimentKind::sigma_sweep;
    const std::string level_name = is_sigma ? "sigma2" : "level";
    agg_out << level_name
            << ",nu,trials,converged,nonpos_rho,failed,mean_err,median_err,stderr_err,"
               "mean_dh_noisy,max_dh_noisy\n";
    trial_out << level_name << ",trial,seed," << vector_header("xtrue", config.n)
              << vector_header("xhat", config.n) << "err,dh_clean,dh_noisy,rho,status\n";

    ExperimentOutcome outcome;
    for (double level : config.sweep) {
        double variance = 2.0 * config.R * config.R / config.n;
        std::optional<NoiseSpec> noise;
        double nu = config.estimator.nu;
        if (is_sigma) {
            variance = level;
            if (!(variance > 0.0)) throw ConfigError("sigma_sweep: sweep values must be > 0");
        } else {
            NoiseSpec spec;
            spec.kind = config.noise_kind;
            spec.seed = 0;  // filled per trial
            double kappa_estimate = 0.0;
            if (config.noise_kind == NoiseKind::gaussian_prequant ||
                config.noise_kind == NoiseKind::perturbed_point) {
                spec.sigma_z2 = level;
                kappa_estimate = kappa_n(level, config.R, config.n, config.x_norm);
            } else {
                spec.flip_fraction = level;
                kappa_estimate = level;
            }
            noise = spec;
            if (config.nu_auto) nu = select_nu(kappa_estimate);
        }

        std::vector<TrialRecord> records(static_cast<std::size_t>(config.trials));
        parallel_trials(config.trials, threads, [&](int t) {
            records[static_cast<std::size_t>(t)] =
                run_single_trial(config, variance, noise, nu, t);
        });

        for (const TrialRecord& rec : records) {
            write_trial_row(trial_out, fmt(level) + ",", rec);
            ++outcome.runs;
            if (rec.status != EstimateStatus::converged) ++outcome.failures;
        }
        const Aggregate agg = aggregate_records(records);
        agg_out << fmt(level) << ',' << fmt(nu) << ',' << agg.trials << ',' << agg.converged
                << ',' << agg.nonpos_rho << ',' << agg.trials - agg.converged << ','
                << fmt(agg.mean_err) << ',' << fmt(agg.median_err) << ','
                << fmt(agg.stderr_err) << ',' << fmt(agg.mean_dh_noisy) << ','
                << fmt(agg.max_dh_noisy) << "\n";
    }
    return outcome;
}

ExperimentOutcome run_adaptive_experiment(const ExperimentConfig& config, int threads) {
    std::ofstream agg_out = open_output(config.out_path, config.config_hash);
    std::ofstream trial_out =
        open_output(sibling_path(config.out_path, "_trials"), config.config_hash);
    std::ofstream stage_out =
        open_output(sibling_path(config.out_path, "_stages"), config.config_hash);

    agg_out << "total_m,stages,trials,converged,nonpos_rho,failed,mean_err,median_err,"
               "stderr_err,mean_dh_noisy,max_dh_noisy\n";
    trial_out << "total_m,stages,trial,seed," << vector_header("xtrue", config.n)
              << vector_header("xhat", config.n) << "err,dh_clean,dh_noisy,rho,status\n";
    stage_out << "total_m,stages,trial,stage," << vector_header("center", config.n)
              << "radius,variance,budget," << vector_header("xhat", config.n) << "err\n";

    const bool catalog_mode = config.kind == ExperimentKind::adaptive_catalog;

    std::optional<NoiseSpec> noise;
    if (config.noise_kind != NoiseKind::none) {
        NoiseSpec spec;
        spec.kind = config.noise_kind;
        spec.sigma_z2 = config.sigma_z2 > 0.0 ? config.sigma_z2 : 0.0;
        spec.flip_fraction = config.kappa > 0.0 ? config.kappa : 0.0;
        noise = spec;
    }

    ExperimentOutcome outcome;
    for (double total : config.sweep) {
        const long total_m = static_cast<long>(total);
        for (int t : config.stage_counts) {
            std::vector<TrialRecord> records(static_cast<std::size_t>(config.trials));
            std::vector<AdaptiveResult> results(static_cast<std::size_t>(config.trials));
            parallel_trials(config.trials, threads, [&](int trial) {
                const std::uint64_t trial_seed = derive_seed(config.seed, trial);
                TrialRecord rec;
                rec.trial = trial;
                rec.seed = trial_seed;
                rec.x_true = RandomStream(derive_seed(trial_seed, kSaltTruth))
                                 .unit_sphere(config.n) * config.x_norm;
                rec.rho = kNaN;
                rec.dh_clean = kNaN;
                rec.dh_noisy = kNaN;

                AdaptiveOptions options;
                options.estimator = config.estimator_kind;
                options.estimator_config = config.estimator;

                std::optional<ItemCatalog> catalog;
                StageSchedule schedule;
                if (catalog_mode) {
                    catalog.emplace(ItemCatalog::uniform_ball(
                        config.catalog_items, config.n, config.R,
                        derive_seed(trial_seed, kSaltCatalog)));
                    options.catalog = &*catalog;
                    schedule = build_catalog_schedule(*catalog, config.R, t, total_m,
                                                      config.rounding, config.dyadic);
                } else {
                    schedule = build_schedule(config.R, config.n, t, total_m, config.rounding);
                }

                std::optional<NoiseSpec> trial_noise = noise;
                if (trial_noise) trial_noise->seed = derive_seed(trial_seed, kSaltNoise);

                const std::uint64_t run_seed = derive_seed(trial_seed, kSaltPairs);
                AdaptiveResult result = run_adaptive(rec.x_true, config.R, config.n, schedule,
                                                     trial_noise, run_seed, options);
                if (result.completed) {
                    rec.x_hat = result.final_x_hat;
                    rec.err = (rec.x_hat - rec.x_true).norm();
                    rec.status = EstimateStatus::converged;
                } else {
                    rec.x_hat = Eigen::VectorXd::Zero(config.n);
                    rec.err = kNaN;
                    rec.status = result.trajectory.empty()
                                     ? EstimateStatus::infeasible
                                     : result.trajectory.back().status;
                }
                records[static_cast<std::size_t>(trial)] = std::move(rec);
                results[static_cast<std::size_t>(trial)] = std::move(result);
            });

            const std::string combo = std::to_string(total_m) + "," + std::to_string(t) + ",";
            for (int trial = 0; trial < config.trials; ++trial) {
                const TrialRecord& rec = records[static_cast<std::size_t>(trial)];
                write_trial_row(trial_out, combo, rec);
                ++outcome.runs;
                if (rec.status != EstimateStatus::converged) ++outcome.failures;
                for (const StageOutcome& stage : results[static_cast<std::size_t>(trial)].trajectory) {
                    stage_out << combo << trial << ',' << stage.stage << ','
                              << vector_cells(stage.center) << fmt(stage.radius) << ','
                              << fmt(stage.variance) << ',' << stage.budget << ',';
                    if (stage.status == EstimateStatus::converged) {
                        stage_out << vector_cells(stage.x_hat)
                                  << fmt((stage.x_hat - rec.x_true).norm());
                    } else {
                        stage_out << vector_cells(Eigen::VectorXd::Zero(config.n)) << fmt(kNaN);
                    }
                    stage_out << "\n";
                }
            }
            const Aggregate agg = aggregate_records(records);
            agg_out << combo << agg.trials << ',' << agg.converged << ',' << agg.nonpos_rho
                    << ',' << agg.trials - agg.converged << ',' << fmt(agg.mean_err) << ','
                    << fmt(agg.median_err) << ',' << fmt(agg.stderr_err) << ','
                    << fmt(agg.mean_dh_noisy) << ',' << fmt(agg.max_dh_noisy) << "\n";
        }
    }
    return outcome;
}

struct ValidationRow {
    std::string check;
    std::string detail;
    double estimate = 0.0;
    double std_error = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    bool pass = false;
};

ExperimentOutcome run_validate(const ExperimentConfig& config, int threads) {
    const long trials = config.validate_trials;
    const double R = 1.0;
    std::vector<std::function<ValidationRow()>> checks;

    // Flip probability vs. the closed-form kappa bound on a 12-point grid.
    const int flip_dims[] = {2, 3, 4, 8};
    const std::pair<double, double> flip_params[] = {{0.05, 0.0}, {0.2, 0.5}, {0.5, 0.9}};
    int check_index = 0;
    for (int n : flip_dims) {
        for (const auto& [sigma_z2, x_norm] : flip_params) {
            const std::uint64_t seed = derive_seed(config.seed, 100 + check_index++);
            checks.push_back([=]() {
                Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
                x[0] = x_norm;
                const MCEstimate est = mc_flip_probability(x, n, R, sigma_z2, trials, seed);
                ValidationRow row;
                row.check = "flip_probability";
                row.detail = "n=" + std::to_string(n) + " sigma_z2=" + fmt(sigma_z2) +
                             " x_norm=" + fmt(x_norm);
                row.estimate = est.estimate;
                row.std_error = est.std_error;
                row.bound = kappa_n(sigma_z2, R, n, x_norm);
                row.slack = row.bound - row.estimate;
                row.pass = row.slack >= -3.0 * est.std_error;
                return row;
            });
        }
    }

    // Separation probability vs. its lower bound.
    struct SepConfig { int n; double dist; double delta; };
    const SepConfig sep_configs[] = {
        {2, 1.0, 0.0}, {3, 0.6, 0.01}, {5, 0.8, 0.02}, {8, 1.2, 0.01}};
    for (const SepConfig& sc : sep_configs) {
        const std::uint64_t seed = derive_seed(config.seed, 200 + check_index++);
        checks.push_back([=]() {
            Eigen::VectorXd w = Eigen::VectorXd::Zero(sc.n);
            Eigen::VectorXd z = Eigen::VectorXd::Zero(sc.n);
            w[0] = sc.dist / 2.0;
            z[0] = -sc.dist / 2.0;
            const MCEstimate est = mc_sep_probability(w, z, sc.delta, sc.n, R, trials, seed);
            ValidationRow row;
            row.check = "sep_probability";
            row.detail = "n=" + std::to_string(sc.n) + " dist=" + fmt(sc.dist) +
                         " delta=" + fmt(sc.delta);
            row.estimate = est.estimate;
            row.std_error = est.std_error;
            row.bound = sep_probability_lower_bound(sc.dist, sc.delta, sc.n, R);
            row.slack = row.estimate - row.bound;
            row.pass = row.slack >= -3.0 * est.std_error;
            return row;
        });
    }

    // Non-separation (some pair distinguished) vs. its upper bound.
    const SepConfig nonsep_configs[] = {
        {3, 0.2, 0.01}, {2, 0.4, 0.0}, {5, 0.3, 0.02}, {8, 0.25, 0.01}};
    for (const SepConfig& sc : nonsep_configs) {
        const std::uint64_t seed = derive_seed(config.seed, 300 + check_index++);
        checks.push_back([=]() {
            Eigen::VectorXd w = Eigen::VectorXd::Zero(sc.n);
            Eigen::VectorXd z = Eigen::VectorXd::Zero(sc.n);
            w[0] = sc.dist / 2.0;
            z[0] = -sc.dist / 2.0;
            const MCEstimate est = mc_nonsep_probability(w, z, sc.delta, sc.n, R, trials, seed);
            ValidationRow row;
            row.check = "nonsep_probability";
            row.detail = "n=" + std::to_string(sc.n) + " dist=" + fmt(sc.dist) +
                         " delta=" + fmt(sc.delta);
            row.estimate = est.estimate;
            row.std_error = est.std_error;
            row.bound = nonsep_probability_upper_bound(sc.dist, sc.delta, sc.n, R);
            row.slack = row.bound - row.estimate;
            row.pass = row.slack >= -3.0 * est.std_error;
            return row;
        });
    }

    // Sphere mean |a^T delta|: the 1/sqrt(pi) constant is the one asserted;
    // the 2/sqrt(pi) variant is reported for reference in the detail column.
    for (int n : {2, 3, 5}) {
        const std::uint64_t seed = derive_seed(config.seed, 400 + check_index++);
        checks.push_back([=]() {
            Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
            delta[0] = 1.0;
            const SphereMeanAbs est = mc_sphere_mean_abs(delta, n, trials, seed);
            ValidationRow row;
            row.check = "sphere_mean_abs";
            row.detail = "n=" + std::to_string(n) +
                         " alt_constant_pred=" + fmt(est.prediction_two_over_sqrt_pi);
            row.estimate = est.mc_mean;
            row.std_error = est.std_error;
            row.bound = est.prediction_one_over_sqrt_pi;
            row.slack = 3.0 * est.std_error - std::abs(est.mc_mean - row.bound);
            row.pass = row.slack >= 0.0;
            return row;
        });
    }

    // Normal-CDF difference sandwich on a deterministic grid.
    checks.push_back([=]() {
        const CdfBoundsReport report = check_cdf_bounds(-6.0, 6.0, 142);
        ValidationRow row;
        row.check = "cdf_difference_bounds";
        row.detail = "pairs=" + std::to_string(report.pairs) +
                     " min_slacks=" + fmt(report.min_lower_slack) + "/" +
                     fmt(report.min_upper_slack) + "/" + fmt(report.min_zero_slack);
        row.estimate = static_cast<double>(report.violations);
        row.std_error = 0.0;
        row.bound = 0.0;
        row.slack = std::min({report.min_lower_slack, report.min_upper_slack,
                              report.min_zero_slack});
        row.pass = report.violations == 0;
        return row;
    });

    std::vector<ValidationRow> rows(checks.size());
    parallel_trials(static_cast<int>(checks.size()), threads,
                    [&](int i) { rows[static_cast<std::size_t>(i)] = checks[static_cast<std::size_t>(i)](); });

    std::ofstream out = open_output(config.out_path, config.config_hash);
    out << "check,detail,estimate,std_error,bound,slack,pass\n";
    ExperimentOutcome outcome;
    for (const ValidationRow& row : rows) {
        out << row.check << ',' << row.detail << ',' << fmt(row.estimate) << ','
            << fmt(row.std_error) << ',' << fmt(row.bound) << ',' << fmt(row.slack) << ','
            << (row.pass ? "pass" : "FAIL") << "\n";
        ++outcome.runs;
        if (!row.pass) ++outcome.failures;
    }
    return outcome;
}

ExperimentOutcome run_bounds_report(const ExperimentConfig& config) {
    std::vector<BoundReport> reports;
    auto add = [&](const std::string& name, double value, const std::string& ref,
                   std::vector<std::pair<std::string, double>> inputs,
                   const std::string& exact = "") {
        reports.push_back({name, std::move(inputs), value, ref, exact});
    };

    const EmbeddingConstants k = embedding_constants();
    add("C1", k.C1, "embedding_constants", {});
    add("c1", k.c1, "embedding_constants", {});
    add("C2", k.C2, "embedding_constants", {});
    add("c2", k.c2, "embedding_constants", {});
    add("sample_prefactor", sample_complexity_prefactor(), "sufficient_m_explicit", {});

    const bool have_eps = config.eps > 0.0;
    const bool have_eta = config.eta > 0.0;
    if (have_eps && have_eta) {
        add("sufficient_m",
            static_cast<double>(sufficient_m(config.R, config.eps, config.n, config.eta)),
            "sufficient_m_explicit",
            {{"R", config.R}, {"eps", config.eps}, {"n", config.n}, {"eta", config.eta}});
    }
    if (have_eps) {
        add("lower_bound_m", lower_bound_m(config.R, config.eps, config.n),
            "arrangement_lower_bound",
            {{"R", config.R}, {"eps", config.eps}, {"n", config.n}});
    }
    if (config.cells_m >= 0) {
        const BigInt cells = cell_count(config.cells_m, config.n);
        add("cell_count", static_cast<double>(cells), "arrangement_cell_count",
            {{"m", static_cast<double>(config.cells_m)}, {"n", config.n}}, cells.str());
    }
    if (config.sigma_z2 >= 0.0) {
        add("kappa_n", kappa_n(config.sigma_z2, config.R, config.n, config.x_norm),
            "flip_probability_bound",
            {{"sigma_z2", config.sigma_z2}, {"R", config.R}, {"n", config.n},
             {"x_norm", config.x_norm}});
    }
    if (config.m > 0 && have_eta) {
        add("zeta", zeta_of_m(config.m, config.n, config.eta), "deviation_zeta",
            {{"m", static_cast<double>(config.m)}, {"n", config.n}, {"eta", config.eta}});
    }
    if (config.zeta > 0.0 && have_eta) {
        add("embedding_m", static_cast<double>(embedding_m(config.zeta, config.n, config.eta)),
            "embedding_budget",
            {{"zeta", config.zeta}, {"n", config.n}, {"eta", config.eta}});
    }
    if (config.kappa >= 0.0 && config.m > 0 && have_eta) {
        add("error_bound_flips",
            error_bound_flips(config.kappa, config.m, config.n, config.eta, config.R),
            "flip_noise_error",
            {{"kappa", config.kappa}, {"m", static_cast<double>(config.m)}, {"n", config.n},
             {"eta", config.eta}, {"R", config.R}});
    }
    if (config.sigma_z2 >= 0.0 && config.m > 0 && have_eta) {
        add("error_bound_gaussian",
            error_bound_gaussian(config.sigma_z2, config.m, config.n, config.eta, config.R),
            "gaussian_noise_error",
            {{"sigma_z2", config.sigma_z2}, {"m", static_cast<double>(config.m)},
             {"n", config.n}, {"eta", config.eta}, {"R", config.R}});
    }
    if (config.perturb_norm >= 0.0 && config.m > 0 && have_eta) {
        add("error_bound_arbitrary",
            error_bound_arbitrary(config.perturb_norm, config.m, config.n, config.eta,
                                  config.R),
            "arbitrary_perturbation_error",
            {{"perturb_norm", config.perturb_norm}, {"m", static_cast<double>(config.m)},
             {"n", config.n}, {"eta", config.eta}, {"R", config.R}});
    }
    if (config.eps_t > 0.0 && have_eta) {
        add("adaptive_m",
            static_cast<double>(adaptive_m(config.R, config.eps_t, config.n, config.eta,
                                           config.bound_C)),
            "adaptive_budget",
            {{"R", config.R}, {"eps_t", config.eps_t}, {"n", config.n}, {"eta", config.eta}});
    }

    std::ofstream out = open_output(config.out_path, config.config_hash);
    if (config.bounds_format == "csv") {
        out << "name,value,exact,formula,inputs\n";
        for (const BoundReport& r : reports) {
            out << r.name << ',' << fmt(r.value) << ',' << r.exact << ',' << r.formula_ref
                << ',';
            for (std::size_t i = 0; i < r.inputs.size(); ++i) {
                if (i) out << ';';
                out << r.inputs[i].first << '=' << fmt(r.inputs[i].second);
            }
            out << "\n";
        }
    } else {
        for (const BoundReport& r : reports) {
            char line[160];
            std::snprintf(line, sizeof(line), "%-22s %-24.15g %s\n", r.name.c_str(), r.value,
                          r.exact.empty() ? "" : ("= " + r.exact).c_str());
            out << line;
        }
    }
    ExperimentOutcome outcome;
    outcome.runs = static_cast<long>(reports.size());
    return outcome;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config, int threads) {
    ExperimentOutcome outcome;
    switch (config.kind) {
        case ExperimentKind::sigma_sweep:
        case ExperimentKind::noise_gaussian:
        case ExperimentKind::noise_random:
        case ExperimentKind::noise_adversarial:
            outcome = run_sweep_experiment(config, threads);
            break;
        case ExperimentKind::adaptive_stages:
        case ExperimentKind::adaptive_catalog:
            outcome = run_adaptive_experiment(config, threads);
            break;
        case ExperimentKind::validate:
            outcome = run_validate(config, threads);
            break;
        case ExperimentKind::bounds_report:
            outcome = run_bounds_report(config);
            break;
    }
    if (config.kind != ExperimentKind::validate && config.kind != ExperimentKind::bounds_report &&
        outcome.runs > 0 && 2 * outcome.failures > outcome.runs)
        outcome.exit_code = 3;
    return outcome;
}

void emit_plot_data(std::istream& in, std::ostream& out) {
    out << "x,series,mean,median,stderr\n";
    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (header.empty()) header = std::move(cells);
        else rows.push_back(std::move(cells));
    }
    if (header.empty()) return;

    int series_col = -1, mean_col = -1, median_col = -1, stderr_col = -1;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) {
        const std::string& h = header[static_cast<std::size_t>(i)];
        if (series_col < 0 && (h == "stages" || h == "series" || h == "mode")) series_col = i;
        if (mean_col < 0 && h.rfind("mean", 0) == 0) mean_col = i;
        if (median_col < 0 && h.rfind("median", 0) == 0) median_col = i;
        if (stderr_col < 0 && h.rfind("stderr", 0) == 0) stderr_col = i;
    }

    struct Tidy { double x; std::string series; std::string mean, median, stderr_; };
    std::vector<Tidy> tidy;
    for (const auto& cells : rows) {
        if (cells.size() != header.size()) continue;
        Tidy t;
        t.x = std::stod(cells[0]);
        t.series = series_col >= 0 ? cells[static_cast<std::size_t>(series_col)] : "all";
        t.mean = mean_col >= 0 ? cells[static_cast<std::size_t>(mean_col)] : "";
        t.median = median_col >= 0 ? cells[static_cast<std::size_t>(median_col)] : "";
        t.stderr_ = stderr_col >= 0 ? cells[static_cast<std::size_t>(stderr_col)] : "";
        tidy.push_back(std::move(t));
    }
    std::stable_sort(tidy.begin(), tidy.end(), [](const Tidy& a, const Tidy& b) {
        if (a.series != b.series) return a.series < b.series;
        return a.x < b.x;
    });
    for (const Tidy& t : tidy)
        out << fmt(t.x) << ',' << t.series << ',' << t.mean << ',' << t.median << ','
            << t.stderr_ << "\n";
}

}  // namespace pairloc
