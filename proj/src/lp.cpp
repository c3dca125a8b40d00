#include "pairloc/lp.hpp"

#include <cmath>
#include <vector>

#include "pairloc/errors.hpp"

namespace pairloc::lp {

namespace {

constexpr double kPivotTol = 1e-10;

enum class VarState { basic, at_lower, at_upper };

struct Tableau {
    Eigen::MatrixXd A;       // rows x (structural + artificial) columns
    Eigen::VectorXd b;
    Eigen::VectorXd cost;    // current phase costs
    Eigen::VectorXd lower, upper;
    std::vector<int> basis;  // column index per row
    std::vector<VarState> state;
    Eigen::VectorXd x;       // current values, all columns

    int rows() const { return static_cast<int>(A.rows()); }
    int cols() const { return static_cast<int>(A.cols()); }
};

// Recomputes basic values from the nonbasic bounds; returns the LU of the
// basis matrix for reuse in pricing.
Eigen::PartialPivLU<Eigen::MatrixXd> refresh_basics(Tableau& t) {
    const int m = t.rows();
    Eigen::MatrixXd B(m, m);
    for (int r = 0; r < m; ++r) B.col(r) = t.A.col(t.basis[static_cast<std::size_t>(r)]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);

    Eigen::VectorXd rhs = t.b;
    for (int j = 0; j < t.cols(); ++j) {
        if (t.state[static_cast<std::size_t>(j)] == VarState::basic) continue;
        if (t.x[j] != 0.0) rhs -= t.A.col(j) * t.x[j];
    }
    const Eigen::VectorXd xb = lu.solve(rhs);
    for (int r = 0; r < m; ++r) t.x[t.basis[static_cast<std::size_t>(r)]] = xb[r];
    return lu;
}

// One simplex phase on the current costs.  Returns the terminating status
// (optimal here means "no improving column").
Status run_phase(Tableau& t, double tol, int max_iterations, int& iteration_count) {
    const int m = t.rows();
    const int ncols = t.cols();
    const int bland_threshold = 4 * ncols + 200;
    int phase_iters = 0;

    while (true) {
        if (iteration_count >= max_iterations) return Status::iteration_limit;
        ++iteration_count;
        ++phase_iters;
        const bool bland = phase_iters > bland_threshold;

        auto lu = refresh_basics(t);
        Eigen::VectorXd cb(m);
        for (int r = 0; r < m; ++r) cb[r] = t.cost[t.basis[static_cast<std::size_t>(r)]];
        const Eigen::VectorXd y = lu.transpose().solve(cb);

        // Pricing: nonbasic at lower wants d_j < 0, at upper wants d_j > 0.
        int entering = -1;
        double best = tol;
        int direction = +1;
        for (int j = 0; j < ncols; ++j) {
            const VarState s = t.state[static_cast<std::size_t>(j)];
            if (s == VarState::basic) continue;
            if (t.lower[j] == t.upper[j]) continue;  // pinned
            const double d = t.cost[j] - y.dot(t.A.col(j));
            double improvement = 0.0;
            int dir = +1;
            if (s == VarState::at_lower && d < -tol) {
                improvement = -d;
                dir = +1;
            } else if (s == VarState::at_upper && d > tol) {
                improvement = d;
                dir = -1;
            } else {
                continue;
            }
            if (bland) {
                entering = j;
                direction = dir;
                break;
            }
            if (improvement > best) {
                best = improvement;
                entering = j;
                direction = dir;
            }
        }
        if (entering < 0) return Status::optimal;

        // Ratio test along x_entering moving by `direction`.
        const Eigen::VectorXd w = lu.solve(t.A.col(entering));
        double step = t.upper[entering] - t.lower[entering];  // bound-flip distance
        int leaving_row = -1;
        double leaving_target = 0.0;
        for (int r = 0; r < m; ++r) {
            const int bj = t.basis[static_cast<std::size_t>(r)];
            const double delta = direction * w[r];  // basic value changes by -delta * step
            if (delta > kPivotTol) {
                const double ratio = (t.x[bj] - t.lower[bj]) / delta;
                if (ratio < step - kPivotTol || (std::abs(ratio - step) <= kPivotTol &&
                                                 (leaving_row < 0 || bj < t.basis[static_cast<std::size_t>(leaving_row)]))) {
                    step = std::max(ratio, 0.0);
                    leaving_row = r;
                    leaving_target = t.lower[bj];
                }
            } else if (delta < -kPivotTol && t.upper[bj] < kInfinity) {
                const double ratio = (t.x[bj] - t.upper[bj]) / delta;
                if (ratio < step - kPivotTol || (std::abs(ratio - step) <= kPivotTol &&
                                                 (leaving_row < 0 || bj < t.basis[static_cast<std::size_t>(leaving_row)]))) {
                    step = std::max(ratio, 0.0);
                    leaving_row = r;
                    leaving_target = t.upper[bj];
                }
            }
        }
        if (!(step < kInfinity)) return Status::unbounded;

        // Apply the move.
        for (int r = 0; r < m; ++r) {
            const int bj = t.basis[static_cast<std::size_t>(r)];
            t.x[bj] -= direction * w[r] * step;
        }
        t.x[entering] = (direction > 0 ? t.lower[entering] + step : t.upper[entering] - step);

        if (leaving_row < 0) {
            // Bound flip: entering hit its opposite bound, basis unchanged.
            t.state[static_cast<std::size_t>(entering)] =
                direction > 0 ? VarState::at_upper : VarState::at_lower;
        } else {
            const int leaving = t.basis[static_cast<std::size_t>(leaving_row)];
            t.x[leaving] = leaving_target;
            t.state[static_cast<std::size_t>(leaving)] =
                leaving_target == t.lower[leaving] ? VarState::at_lower : VarState::at_upper;
            t.basis[static_cast<std::size_t>(leaving_row)] = entering;
            t.state[static_cast<std::size_t>(entering)] = VarState::basic;
        }
    }
}

}  // namespace

Solution solve(const Problem& problem, double tol, int max_iterations) {
    const int m = static_cast<int>(problem.A.rows());
    const int n = static_cast<int>(problem.A.cols());
    if (problem.b.size() != m || problem.c.size() != n || problem.lower.size() != n ||
        problem.upper.size() != n)
        throw InvalidParameter("lp: inconsistent problem dimensions");
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(problem.lower[j]))
            throw InvalidParameter("lp: lower bounds must be finite");
        if (problem.upper[j] < problem.lower[j])
            throw InvalidParameter("lp: empty variable range");
    }
    if (max_iterations <= 0) max_iterations = 20000 + 50 * (n + m);

    // Structural columns start at their lower bound; one artificial per row
    // absorbs the residual with a +1/-1 column so its value is nonnegative.
    Tableau t;
    t.A.resize(m, n + m);
    t.A.leftCols(n) = problem.A;
    t.b = problem.b;
    t.lower.resize(n + m);
    t.upper.resize(n + m);
    t.lower.head(n) = problem.lower;
    t.upper.head(n) = problem.upper;
    t.lower.tail(m).setZero();
    t.upper.tail(m).setConstant(kInfinity);
    t.x = Eigen::VectorXd::Zero(n + m);
    t.state.assign(static_cast<std::size_t>(n + m), VarState::at_lower);
    t.basis.resize(static_cast<std::size_t>(m));

    Eigen::VectorXd residual = problem.b;
    for (int j = 0; j < n; ++j) {
        t.x[j] = problem.lower[j];
        if (t.x[j] != 0.0) residual -= problem.A.col(j) * t.x[j];
    }
    for (int r = 0; r < m; ++r) {
        t.A.col(n + r) = Eigen::VectorXd::Unit(m, r) * (residual[r] < 0.0 ? -1.0 : 1.0);
        t.basis[static_cast<std::size_t>(r)] = n + r;
        t.state[static_cast<std::size_t>(n + r)] = VarState::basic;
        t.x[n + r] = std::abs(residual[r]);
    }

    Solution sol;
    int iterations = 0;

    // Phase 1: minimize the artificial sum.
    t.cost = Eigen::VectorXd::Zero(n + m);
    t.cost.tail(m).setOnes();
    Status st = run_phase(t, tol, max_iterations, iterations);
    sol.iterations = iterations;
    if (st == Status::iteration_limit) {
        sol.status = st;
        return sol;
    }
    const double artificial_sum = t.x.tail(m).sum();
    if (artificial_sum > 1e-7 * (1.0 + problem.b.cwiseAbs().maxCoeff())) {
        sol.status = Status::infeasible;
        return sol;
    }

    // Phase 2: real costs; artificials pinned at zero.
    t.cost = Eigen::VectorXd::Zero(n + m);
    t.cost.head(n) = problem.c;
    for (int r = 0; r < m; ++r) {
        t.lower[n + r] = 0.0;
        t.upper[n + r] = 0.0;
        if (t.state[static_cast<std::size_t>(n + r)] != VarState::basic) t.x[n + r] = 0.0;
    }
    st = run_phase(t, tol, max_iterations, iterations);
    sol.iterations = iterations;
    if (st == Status::iteration_limit || st == Status::unbounded) {
        sol.status = st;
        return sol;
    }

    auto lu = refresh_basics(t);
    Eigen::VectorXd cb(m);
    for (int r = 0; r < m; ++r) cb[r] = t.cost[t.basis[static_cast<std::size_t>(r)]];
    sol.y = lu.transpose().solve(cb);
    sol.x = t.x.head(n);
    sol.objective = problem.c.dot(sol.x);
    sol.status = Status::optimal;
    return sol;
}

}  // namespace pairloc::lp
