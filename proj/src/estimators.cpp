#include "pairloc/estimators.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <vector>

#include "pairloc/lp.hpp"

namespace pairloc {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kDivergentMultiplier = 1e14;
constexpr double kDehomogenizationFloor = 1e-6;

struct KktResidual {
    double violation = 0.0;         // max_i (b_i - c_i.w)
    double complementarity = 0.0;   // max_i lambda_i |c_i.w - b_i|
    double max() const { return std::max(violation, complementarity); }
};

KktResidual kkt_residual(const RowMajorMatrix& C, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& lambda, const Eigen::VectorXd& w) {
    KktResidual r;
    for (Eigen::Index i = 0; i < C.rows(); ++i) {
        const double g = C.row(i).dot(w) - b[i];
        r.violation = std::max(r.violation, -g);
        r.complementarity = std::max(r.complementarity, lambda[i] * std::abs(g));
    }
    return r;
}

}  // namespace

void EstimatorConfig::validate() const {
    if (!(R > 0.0)) throw InvalidParameter("estimator: R must be > 0");
    if (!(nu >= 0.0 && nu <= 1.0)) throw InvalidParameter("estimator: nu must be in [0, 1]");
    if (!(chi > 0.0 && chi < 1.0)) throw InvalidParameter("estimator: chi must be in (0, 1)");
    if (max_outer_iters < 1) throw InvalidParameter("estimator: max_outer_iters must be >= 1");
    if (!(convergence_tol > 0.0)) throw InvalidParameter("estimator: convergence_tol must be > 0");
    if (!(solver_tol > 0.0)) throw InvalidParameter("estimator: solver_tol must be > 0");
    if (!(trust_box > 0.0)) throw InvalidParameter("estimator: trust_box must be > 0");
}

const char* to_string(EstimateStatus status) {
    switch (status) {
        case EstimateStatus::converged: return "converged";
        case EstimateStatus::max_iters: return "max_iters";
        case EstimateStatus::infeasible: return "infeasible";
        case EstimateStatus::dehomogenization_failure: return "dehomogenization_failure";
    }
    return "unknown";
}

double select_nu(double kappa_estimate) {
    return std::clamp(2.0 * kappa_estimate, 0.0, 1.0);
}

EstimateResult estimate_noise_free(const ComparisonFrame& frame, const SignVector& signs,
                                   double R, double solver_tol, int max_sweeps) {
    if (!(R > 0.0)) throw InvalidParameter("estimate_noise_free: R must be > 0");
    if (!(solver_tol > 0.0)) throw InvalidParameter("estimate_noise_free: solver_tol must be > 0");
    if (signs.size() != frame.count())
        throw LengthMismatch("estimate_noise_free: signs do not match frame");

    const int m = frame.count();
    const int n = frame.dimension();

    EstimateResult result;
    result.rho = std::nullopt;
    if (m == 0) {
        result.x_hat = Eigen::VectorXd::Zero(n);
        result.multipliers = Eigen::VectorXd();
        result.status = EstimateStatus::converged;
        return result;
    }

    // Constraints c_i.w >= b_i with unit-norm c_i, so each coordinate-ascent
    // step on lambda_i is just the current residual.
    RowMajorMatrix C(m, n);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        C.row(i) = signs[i] * frame.normals().row(i);
        b[i] = signs[i] * frame.offsets()[i];
    }

    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    std::vector<int> working;
    working.reserve(static_cast<std::size_t>(m));

    auto sweep_over = [&](const std::vector<int>& rows) {
        for (int i : rows) {
            const double residual = b[i] - C.row(i).dot(w);
            const double delta = std::max(-lambda[i], residual);
            if (delta != 0.0) {
                lambda[i] += delta;
                w += delta * C.row(i).transpose();
            }
        }
    };

    auto full_sweep = [&]() {
        for (int i = 0; i < m; ++i) {
            const double residual = b[i] - C.row(i).dot(w);
            const double delta = std::max(-lambda[i], residual);
            if (delta != 0.0) {
                lambda[i] += delta;
                w += delta * C.row(i).transpose();
            }
        }
    };

    // Coordinate ascent alone can crawl when the support contains linearly
    // dependent rows (three near-active constraints in the plane, say).  The
    // escape is an exact block step: maximize the dual over the working-set
    // multipliers by enumerating candidate active subsets of size <= n and
    // solving each face's equality system.  Any subset whose multipliers are
    // nonnegative and whose point is feasible for the whole working set is
    // the block optimum, so the dual never decreases.
    auto block_exact_step = [&](const std::vector<int>& rows) -> bool {
        const int k = static_cast<int>(rows.size());
        const int max_size = std::min(k, n);
        std::vector<int> subset;
        auto try_subset = [&](const std::vector<int>& s) -> bool {
            const int sz = static_cast<int>(s.size());
            Eigen::MatrixXd cs(sz, n);
            Eigen::VectorXd bs(sz);
            for (int r = 0; r < sz; ++r) {
                cs.row(r) = C.row(rows[static_cast<std::size_t>(s[static_cast<std::size_t>(r)])]);
                bs[r] = b[rows[static_cast<std::size_t>(s[static_cast<std::size_t>(r)])]];
            }
            Eigen::VectorXd lam_s;
            Eigen::VectorXd w_s;
            if (sz == 0) {
                w_s = Eigen::VectorXd::Zero(n);
            } else {
                const Eigen::MatrixXd gram = cs * cs.transpose();
                Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
                lu.setThreshold(1e-10);
                if (lu.rank() < sz) return false;
                lam_s = lu.solve(bs);
                if (lam_s.minCoeff() < -1e-12) return false;
                w_s = cs.transpose() * lam_s;
            }
            for (int r = 0; r < k; ++r) {
                const int row = rows[static_cast<std::size_t>(r)];
                if (C.row(row).dot(w_s) - b[row] < -1e-12 * (1.0 + std::abs(b[row])))
                    return false;
            }
            for (int r = 0; r < k; ++r) lambda[rows[static_cast<std::size_t>(r)]] = 0.0;
            for (int r = 0; r < sz; ++r)
                lambda[rows[static_cast<std::size_t>(s[static_cast<std::size_t>(r)])]] =
                    std::max(0.0, lam_s[r]);
            w = C.transpose() * lambda;
            return true;
        };
        std::vector<int> stack;
        std::function<bool(int, int)> enumerate = [&](int start, int remaining) -> bool {
            if (remaining == 0) return try_subset(stack);
            for (int i = start; i <= k - remaining; ++i) {
                stack.push_back(i);
                if (enumerate(i + 1, remaining - 1)) return true;
                stack.pop_back();
            }
            return false;
        };
        for (int size = 0; size <= max_size; ++size)
            if (enumerate(0, size)) return true;
        return false;
    };

    int sweeps = 0;
    KktResidual kkt;
    bool converged = false;
    while (sweeps < max_sweeps) {
        full_sweep();
        ++sweeps;
        // Accumulated increments drift; rebuild w from the multipliers.
        w = C.transpose() * lambda;

        kkt = kkt_residual(C, b, lambda, w);
        if (kkt.max() <= solver_tol) {
            converged = true;
            break;
        }
        if (lambda.maxCoeff() > kDivergentMultiplier) break;

        // Block candidates: every support row plus the worst violators.
        std::vector<int> block;
        std::vector<std::pair<double, int>> violated;
        for (int i = 0; i < m; ++i) {
            if (lambda[i] > 0.0) block.push_back(i);
            else {
                const double r = b[i] - C.row(i).dot(w);
                if (r > 0.0) violated.push_back({r, i});
            }
        }
        std::sort(violated.begin(), violated.end(), std::greater<>());
        for (std::size_t v = 0; v < violated.size() && block.size() < static_cast<std::size_t>(3 * n + 6); ++v)
            block.push_back(violated[v].second);
        if (static_cast<int>(block.size()) <= 3 * n + 6 && block_exact_step(block)) {
            ++sweeps;
            continue;
        }

        // Working set for cheap restricted sweeps: supports plus rows near
        // their boundary.
        const double shrink_margin = 1e-3 * (1.0 + w.norm());
        working.clear();
        for (int i = 0; i < m; ++i)
            if (lambda[i] > 0.0 || b[i] - C.row(i).dot(w) > -shrink_margin) working.push_back(i);
        for (int pass = 0; pass < 16 && sweeps < max_sweeps; ++pass) {
            sweep_over(working);
            ++sweeps;
        }
    }

    result.x_hat = w;
    result.multipliers = lambda;
    result.iterations = sweeps;
    result.kkt_residual = kkt.max();
    if (converged) {
        result.status = EstimateStatus::converged;
        result.slack_fraction = 0.0;
    } else {
        int violated = 0;
        for (int i = 0; i < m; ++i)
            if (b[i] - C.row(i).dot(w) > solver_tol) ++violated;
        result.slack_fraction = static_cast<double>(violated) / m;
        result.status = kkt.violation > solver_tol ? EstimateStatus::infeasible
                                                   : EstimateStatus::max_iters;
    }
    return result;
}

namespace {

// Linearized sub-problem, solved through its dual.  With y_i = s_i [a_i, -tau_i]
// the primal LP over (w_hat, rho, xi) is
//
//     min -nu*rho + (1/m) sum xi_i
//     s.t. y_i^T w_hat - rho + xi_i >= 0,  xi_i >= 0,
//          w_tilde^T w_hat = 2,  |w_hat_j| <= box,
//
// whose dual, after eliminating the xi multipliers and splitting the free
// slice multiplier and the box reduced costs into nonnegative parts, is
//
//     min  -2 mu+ + 2 mu- + box * sum_j (pi+_j + pi-_j)
//     s.t. sum_i alpha_i y_i + (mu+ - mu-) w_tilde - pi+ + pi- = 0
//          sum_i alpha_i = nu,     0 <= alpha_i <= 1/m,  others >= 0.
//
// The multipliers on the dual's equality rows recover the primal point:
// w_hat = -y[0..n], rho = y[n+1].
struct SubProblem {
    lp::Problem problem;
    int m = 0;
    int dim = 0;  // n + 1

    SubProblem(const Eigen::MatrixXd& scaled_rows, double nu, double box) {
        m = static_cast<int>(scaled_rows.rows());
        dim = static_cast<int>(scaled_rows.cols());
        const int rows = dim + 1;
        const int cols = m + 2 + 2 * dim;
        problem.A = Eigen::MatrixXd::Zero(rows, cols);
        problem.b = Eigen::VectorXd::Zero(rows);
        problem.c = Eigen::VectorXd::Zero(cols);
        problem.lower = Eigen::VectorXd::Zero(cols);
        problem.upper = Eigen::VectorXd::Constant(cols, lp::kInfinity);

        for (int i = 0; i < m; ++i) {
            problem.A.col(i).head(dim) = scaled_rows.row(i).transpose();
            problem.A(dim, i) = 1.0;
            problem.upper[i] = 1.0 / m;
        }
        // mu+ / mu- columns get w_tilde per iteration (set_slice).
        problem.c[m] = -2.0;
        problem.c[m + 1] = 2.0;
        for (int j = 0; j < dim; ++j) {
            problem.A(j, m + 2 + j) = -1.0;       // pi+
            problem.A(j, m + 2 + dim + j) = 1.0;  // pi-
            problem.c[m + 2 + j] = box;
            problem.c[m + 2 + dim + j] = box;
        }
        problem.b[dim] = nu;
    }

    void set_slice(const Eigen::VectorXd& w_tilde) {
        problem.A.col(m).head(dim) = w_tilde;
        problem.A.col(m + 1).head(dim) = -w_tilde;
    }
};

}  // namespace

EstimateResult estimate_nu_svm(const ComparisonFrame& frame, const SignVector& signs,
                               const EstimatorConfig& config) {
    config.validate();
    const int m = frame.count();
    const int n = frame.dimension();
    if (m < 1) throw InvalidParameter("estimate_nu_svm: frame must be nonempty");
    if (signs.size() != m) throw LengthMismatch("estimate_nu_svm: signs do not match frame");

    // Lifted training rows y_i = s_i [a_i, -tau_i].
    Eigen::MatrixXd rows(m, n + 1);
    for (int i = 0; i < m; ++i) {
        rows.row(i).head(n) = signs[i] * frame.normals().row(i);
        rows(i, n) = -signs[i] * frame.offsets()[i];
    }

    SubProblem sub(rows, config.nu, config.trust_box);

    Eigen::VectorXd w_tilde = Eigen::VectorXd::Zero(n + 1);
    w_tilde[n] = std::sqrt(2.0);

    EstimateResult result;
    Eigen::VectorXd w_hat = w_tilde;
    double rho = 0.0;
    bool converged = false;
    bool lp_failed = false;

    int iter = 0;
    for (; iter < config.max_outer_iters; ++iter) {
        sub.set_slice(w_tilde);
        const lp::Solution lps = lp::solve(sub.problem, 1e-11);
        if (lps.status != lp::Status::optimal) {
            lp_failed = true;
            break;
        }
        w_hat = -lps.y.head(n + 1);
        rho = lps.y[n + 1];

        // Certificate: recovered primal must be slice-feasible, inside the
        // trust box, and close the duality gap against the LP objective.
        const Eigen::VectorXd margins = rows * w_hat;
        double primal_obj = -config.nu * rho;
        int slack_count = 0;
        for (int i = 0; i < m; ++i) {
            const double xi = std::max(0.0, rho - margins[i]);
            primal_obj += xi / m;
            if (xi > config.solver_tol) ++slack_count;
        }
        const double scale = 1.0 + std::abs(primal_obj);
        if (std::abs(w_tilde.dot(w_hat) - 2.0) > 1e-6 ||
            w_hat.cwiseAbs().maxCoeff() > config.trust_box + 1e-6 ||
            std::abs(primal_obj - (-lps.objective)) > std::max(config.solver_tol, 1e-9) * scale) {
            lp_failed = true;
            break;
        }
        if (slack_count > config.nu * m) result.slack_bound_ok = false;
        result.slack_count = slack_count;

        if ((w_tilde - w_hat).norm() <= config.convergence_tol) {
            converged = true;
            ++iter;
            break;
        }
        w_tilde = config.chi * w_tilde + (1.0 - config.chi) * w_hat;
    }

    // The dehomogenized estimate is invariant to positive rescaling of
    // w_hat, so the sphere constraint can be enforced exactly.
    const double norm = w_hat.norm();
    if (norm > 0.0) w_hat *= std::sqrt(2.0) / norm;

    // Ball constraint on the first n coordinates; rescale onto the cap when
    // violated beyond tolerance (keeps ||w_hat||^2 = 2, i.e. ||x_hat|| = R).
    const double ball_max = 2.0 * config.R * config.R / (1.0 + config.R * config.R);
    const double head_sq = w_hat.head(n).squaredNorm();
    if (head_sq > ball_max + 10.0 * config.solver_tol && head_sq > 0.0) {
        w_hat.head(n) *= std::sqrt(ball_max / head_sq);
        const double sign_last = w_hat[n] >= 0.0 ? 1.0 : -1.0;
        w_hat[n] = sign_last * std::sqrt(std::max(0.0, 2.0 - ball_max));
    }

    result.w_homog = w_hat;
    result.rho = rho;
    result.slack_fraction = static_cast<double>(result.slack_count) / m;
    result.iterations = iter;

    const double denom = w_hat[n];
    if (converged && std::abs(denom) < kDehomogenizationFloor) {
        result.status = EstimateStatus::dehomogenization_failure;
        result.x_hat = Eigen::VectorXd::Zero(n);
        return result;
    }
    result.x_hat = std::abs(denom) >= kDehomogenizationFloor
                       ? Eigen::VectorXd(w_hat.head(n) / denom)
                       : Eigen::VectorXd::Zero(n);
    result.status = converged ? EstimateStatus::converged : EstimateStatus::max_iters;
    if (lp_failed) result.status = EstimateStatus::max_iters;
    return result;
}

}  // namespace pairloc
