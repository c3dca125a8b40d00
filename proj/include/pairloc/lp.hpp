#pragma once

// Dense revised simplex for small linear programs with bounded variables:
//
//     minimize c'x   subject to   A x = b,   lower <= x <= upper.
//
// Geared to problems with few rows and many columns (the basis stays tiny
// while pricing scans all columns).  Lower bounds must be finite; upper
// bounds may be +infinity.  Two-phase: artificial variables are appended
// internally and pinned to zero once feasibility is reached.

#include <limits>

#include <Eigen/Dense>

namespace pairloc::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Problem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Solution {
    Status status = Status::iteration_limit;
    Eigen::VectorXd x;            // primal values of the structural columns
    Eigen::VectorXd y;            // multipliers on the equality rows
    double objective = 0.0;
    int iterations = 0;
};

// `tol` bounds the reduced-cost optimality test; 0 iterations means an
// automatic cap based on the column count.
Solution solve(const Problem& problem, double tol = 1e-9, int max_iterations = 0);

}  // namespace pairloc::lp
