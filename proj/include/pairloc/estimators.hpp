#pragma once

// Point recovery from one-bit comparisons.
//
// Two programs:
//  * estimate_noise_free -- minimum-norm point of the polyhedron
//        { w : s_i (a_i^T w - tau_i) >= 0 },
//    solved by dual coordinate ascent on the constraint multipliers
//    (Hildreth-style), which carries its own KKT certificate.
//  * estimate_nu_svm -- homogeneous extended nu-SVM over the lifted
//    classifier w_hat in R^{n+1},
//        minimize -nu*rho + (1/m) sum xi_i
//        s.t. s_i [a_i, -tau_i]^T w_hat >= rho - xi_i,  xi_i >= 0,
//             ||w_hat[0:n)||^2 <= 2R^2/(1+R^2),  ||w_hat||^2 = 2,
//    approached by repeatedly solving a linearized LP sub-problem on the
//    slice w_hat . w_tilde = 2 and relaxing the slice toward the fixpoint.
//    The estimate is the dehomogenization w_hat[0:n) / w_hat[n].

#include <optional>

#include "pairloc/model.hpp"

namespace pairloc {

struct EstimatorConfig {
    double R = 1.0;
    double nu = 0.0;
    double chi = 0.7;                // slice relaxation weight
    int max_outer_iters = 50;
    double convergence_tol = 1e-6;   // on ||w_tilde - w_hat||
    double solver_tol = 1e-8;        // LP gap / KKT residual
    double trust_box = 10.0;         // |w_hat_j| <= trust_box in the sub-problem

    void validate() const;
};

enum class EstimateStatus { converged, max_iters, infeasible, dehomogenization_failure };

const char* to_string(EstimateStatus status);

struct EstimateResult {
    Eigen::VectorXd x_hat;
    std::optional<double> rho;       // nu-SVM margin
    double slack_fraction = 0.0;     // |{i : xi_i > solver_tol}| / m
    int iterations = 0;
    EstimateStatus status = EstimateStatus::converged;

    // Solver diagnostics.
    Eigen::VectorXd multipliers;     // min-norm: dual multipliers (lambda >= 0)
    Eigen::VectorXd w_homog;         // nu-SVM: final homogeneous vector
    double kkt_residual = 0.0;
    bool slack_bound_ok = true;      // |{xi_i > 0}| <= m*nu held on every iteration
    int slack_count = 0;

    bool hamming_guarantee() const { return rho.has_value() && *rho > 0.0; }
};

EstimateResult estimate_noise_free(const ComparisonFrame& frame, const SignVector& signs,
                                   double R, double solver_tol = 1e-8,
                                   int max_sweeps = 100000);

EstimateResult estimate_nu_svm(const ComparisonFrame& frame, const SignVector& signs,
                               const EstimatorConfig& config);

// Rule of thumb for picking nu from an estimated corruption fraction:
// nu = 2*kappa, clamped to [0, 1].
double select_nu(double kappa_estimate);

}  // namespace pairloc
