#pragma once

#include <functional>
#include <vector>

#include "ssr/types.hpp"

namespace ssr {

struct LassoConfig {
    double lambda = 0.1;
    int max_iters = 1000;
    double tol = 1e-8;  // max coordinate change per sweep
    std::vector<double> lambda_grid;
};

// Contiguous index blocks: device n belongs to group n / group_size.
struct GroupSpec {
    int group_size = 1;
    int group_count = 1;

    int num_devices() const { return group_size * group_count; }
    void validate(Eigen::Index n) const;
};

struct AmpConfig {
    int max_iters = 200;
    double damping = 0.0;       // applied to the signal update
    double sparsity_prior = 0.1;
    double sigma2 = 0.1;
    double threshold_factor = 1.1;  // threshold = factor * residual std estimate
    double tol = 1e-8;
};

struct SolveResult {
    SplitComplexVector x;
    bool converged = false;
    int iterations = 0;
};

// min 1/2 ||y - A x||^2 + lambda sum_n |x_n| over complex x, by cyclic
// coordinate descent with the complex soft threshold (phase-preserving).
SolveResult lasso_solve(const MeasurementMatrix& A, const SplitComplexVector& y,
                        const LassoConfig& cfg);

// min 1/2 ||y - A x||^2 + lambda sum_g sqrt(group_size) ||x_g||_2 by block
// coordinate proximal steps with per-block exact Lipschitz constants.
SolveResult group_lasso_solve(const MeasurementMatrix& A, const SplitComplexVector& y,
                              const GroupSpec& spec, double lambda, int max_iters = 1000,
                              double tol = 1e-8);

// min 1/2 ||y - A x||^2 + lambda1 sum_n |x_n| + lambda2 sum_g sqrt(gs) ||x_g||_2.
SolveResult sparse_group_lasso_solve(const MeasurementMatrix& A, const SplitComplexVector& y,
                                     const GroupSpec& spec, double lambda1, double lambda2,
                                     int max_iters = 1000, double tol = 1e-8);

// Complex AMP with soft-threshold denoiser and Onsager correction; A is
// expected to have columns of norm ~sqrt(L) and is rescaled internally.
SolveResult amp_solve(const MeasurementMatrix& A, const SplitComplexVector& y,
                      const AmpConfig& cfg);

// Objective evaluators (used by convergence checks and tests).
double lasso_objective(const MeasurementMatrix& A, const SplitComplexVector& y,
                       const SplitComplexVector& x, double lambda);
double group_lasso_objective(const MeasurementMatrix& A, const SplitComplexVector& y,
                             const SplitComplexVector& x, const GroupSpec& spec, double lambda);
double sparse_group_lasso_objective(const MeasurementMatrix& A, const SplitComplexVector& y,
                                    const SplitComplexVector& x, const GroupSpec& spec,
                                    double lambda1, double lambda2);

// --- support extraction and regularization selection ----------------------

struct SupportCalibration {
    double tau_star = 0.0;  // magnitude threshold
    double pe_star = 1.0;
    std::vector<std::pair<double, double>> grid;  // evaluated (tau, P_E) pairs
};

// alpha_hat[n] = 1 iff |x_hat[n]| > tau.
BinaryVec magnitude_support(const SplitComplexVector& x_hat, double tau);

// Pick the magnitude threshold minimizing the error rate over a grid of
// quantiles of the observed |x_hat| values; ties pick the smallest tau.
SupportCalibration calibrate_magnitude_threshold(
    const std::vector<SplitComplexVector>& estimates,
    const std::vector<BinaryVec>& labels);

// Calibrated estimate -> support decision for a single solve.
BinaryVec support_extract(const SplitComplexVector& x_hat, double tau_star);

using SolverFn =
    std::function<SplitComplexVector(const SplitComplexVector& y, double lambda)>;

struct LambdaSelection {
    double lambda_star = 0.0;
    double tau_star = 0.0;
    double pe_star = 1.0;
};

// Run the solver on each calibration measurement for every grid lambda,
// calibrate the magnitude threshold per lambda, and return the settings with
// the lowest calibration error rate; ties pick the larger (sparser) lambda.
LambdaSelection select_lambda(const SolverFn& solver, const std::vector<double>& lambda_grid,
                              const std::vector<SplitComplexVector>& measurements,
                              const std::vector<BinaryVec>& labels);

// Logarithmic 20-point grid spanning [0.01, 1] x (mean max correlation
// magnitude of A^H y over the given measurements).
std::vector<double> default_lambda_grid(const MeasurementMatrix& A,
                                        const std::vector<SplitComplexVector>& measurements,
                                        int points = 20);

}  // namespace ssr
