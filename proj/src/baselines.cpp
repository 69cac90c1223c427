#include "ssr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace ssr {

namespace {

using Complex = std::complex<double>;

// Complex soft threshold: shrink the magnitude, keep the phase.
Complex soft(Complex u, double t) {
    const double mag = std::abs(u);
    if (mag <= t) return {0.0, 0.0};
    return u * ((mag - t) / mag);
}

double group_norm(const CVec& x, int begin, int size) {
    double s = 0.0;
    for (int k = 0; k < size; ++k) s += std::norm(x[begin + k]);
    return std::sqrt(s);
}

}  // namespace

void GroupSpec::validate(Eigen::Index n) const {
    if (group_size < 1 || group_count < 1) {
        throw std::invalid_argument("GroupSpec: non-positive sizes");
    }
    if (static_cast<Eigen::Index>(group_size) * group_count != n) {
        throw std::invalid_argument("GroupSpec: group_size * group_count != N");
    }
}

SolveResult lasso_solve(const MeasurementMatrix& A, const SplitComplexVector& y,
                        const LassoConfig& cfg) {
    if (y.size() != A.rows()) throw std::invalid_argument("lasso_solve: y length mismatch");
    if (cfg.lambda < 0.0) throw std::invalid_argument("lasso_solve: negative lambda");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("lasso_solve: tol must be > 0");
    const CMat a = A.to_complex();
    const Eigen::Index n = a.cols();
    Vec col_sq(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        col_sq[k] = a.col(k).squaredNorm();
        if (col_sq[k] == 0.0) throw std::invalid_argument("lasso_solve: zero column");
    }

    CVec x = CVec::Zero(n);
    CVec residual = y.to_complex();
    SolveResult result;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        double max_change = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            const Complex old = x[k];
            const Complex corr = a.col(k).dot(residual) + col_sq[k] * old;
            const Complex next = soft(corr, cfg.lambda) / col_sq[k];
            if (next != old) {
                residual += a.col(k) * (old - next);
                x[k] = next;
                max_change = std::max(max_change, std::abs(next - old));
            }
        }
        result.iterations = iter + 1;
        if (max_change < cfg.tol) {
            result.converged = true;
            break;
        }
    }
    result.x = SplitComplexVector::from_complex(x);
    return result;
}

namespace {

// Largest eigenvalue of A_g^H A_g per group (exact block Lipschitz constants).
Vec block_lipschitz(const CMat& a, const GroupSpec& spec) {
    Vec rho(spec.group_count);
    for (int g = 0; g < spec.group_count; ++g) {
        const auto block = a.middleCols(static_cast<Eigen::Index>(g) * spec.group_size,
                                        spec.group_size);
        if (spec.group_size == 1) {
            rho[g] = block.squaredNorm();
        } else {
            const CMat gram = block.adjoint() * block;
            Eigen::SelfAdjointEigenSolver<CMat> eig(gram, Eigen::EigenvaluesOnly);
            rho[g] = eig.eigenvalues().maxCoeff();
        }
        if (!(rho[g] > 0.0)) {
            throw std::invalid_argument("group solver: zero pilot block");
        }
    }
    return rho;
}

// Shared block coordinate proximal descent for the (sparse) group penalties.
// Each sweep takes one prox step per group at step size 1/rho_g, which cannot
// increase the objective. lambda1 = 0 gives plain Group LASSO.
SolveResult group_prox_descent(const CMat& a, const CVec& y, const GroupSpec& spec,
                               double lambda1, double lambda2, int max_iters, double tol) {
    const Eigen::Index n = a.cols();
    const Vec rho = block_lipschitz(a, spec);
    const double group_weight = lambda2 * std::sqrt(static_cast<double>(spec.group_size));

    CVec x = CVec::Zero(n);
    CVec residual = y;
    CVec v(spec.group_size);
    SolveResult result;
    for (int iter = 0; iter < max_iters; ++iter) {
        double max_change = 0.0;
        for (int g = 0; g < spec.group_count; ++g) {
            const Eigen::Index begin = static_cast<Eigen::Index>(g) * spec.group_size;
            const auto block = a.middleCols(begin, spec.group_size);
            v = x.segment(begin, spec.group_size) + block.adjoint() * residual / rho[g];
            // Composite prox: elementwise soft threshold, then group shrinkage.
            for (int k = 0; k < spec.group_size; ++k) v[k] = soft(v[k], lambda1 / rho[g]);
            const double vnorm = v.norm();
            const double shrink =
                vnorm > group_weight / rho[g] ? 1.0 - group_weight / (rho[g] * vnorm) : 0.0;
            for (int k = 0; k < spec.group_size; ++k) {
                const Complex next = v[k] * shrink;
                const Complex old = x[begin + k];
                if (next != old) {
                    residual += a.col(begin + k) * (old - next);
                    x[begin + k] = next;
                    max_change = std::max(max_change, std::abs(next - old));
                }
            }
        }
        result.iterations = iter + 1;
        if (max_change < tol) {
            result.converged = true;
            break;
        }
    }
    result.x = SplitComplexVector::from_complex(x);
    return result;
}

}  // namespace

SolveResult group_lasso_solve(const MeasurementMatrix& A, const SplitComplexVector& y,
                              const GroupSpec& spec, double lambda, int max_iters, double tol) {
    if (y.size() != A.rows()) throw std::invalid_argument("group_lasso_solve: y length mismatch");
    spec.validate(A.cols());
    if (lambda < 0.0) throw std::invalid_argument("group_lasso_solve: negative lambda");
    return group_prox_descent(A.to_complex(), y.to_complex(), spec, 0.0, lambda, max_iters, tol);
}

SolveResult sparse_group_lasso_solve(const MeasurementMatrix& A, const SplitComplexVector& y,
                                     const GroupSpec& spec, double lambda1, double lambda2,
                                     int max_iters, double tol) {
    if (y.size() != A.rows()) {
        throw std::invalid_argument("sparse_group_lasso_solve: y length mismatch");
    }
    spec.validate(A.cols());
    if (lambda1 < 0.0 || lambda2 < 0.0) {
        throw std::invalid_argument("sparse_group_lasso_solve: negative lambda");
    }
    return group_prox_descent(A.to_complex(), y.to_complex(), spec, lambda1, lambda2, max_iters,
                              tol);
}

SolveResult amp_solve(const MeasurementMatrix& A, const SplitComplexVector& y,
                      const AmpConfig& cfg) {
    if (y.size() != A.rows()) throw std::invalid_argument("amp_solve: y length mismatch");
    if (cfg.max_iters < 1) throw std::invalid_argument("amp_solve: max_iters < 1");
    if (!(cfg.damping >= 0.0 && cfg.damping < 1.0)) {
        throw std::invalid_argument("amp_solve: damping outside [0,1)");
    }
    const Eigen::Index pilot_len = A.rows();
    const Eigen::Index n = A.cols();
    const double inv_sqrt_l = 1.0 / std::sqrt(static_cast<double>(pilot_len));
    const CMat a_unit = A.to_complex() * inv_sqrt_l;  // ~unit-norm columns
    const CVec y_scaled = y.to_complex() * inv_sqrt_l;
    const double undersampling = static_cast<double>(n) / static_cast<double>(pilot_len);

    CVec x = CVec::Zero(n);
    CVec residual = y_scaled;
    const double initial_residual = residual.norm();
    CVec u(n);
    SolveResult result;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        u = x + a_unit.adjoint() * residual;
        const double sigma_hat =
            residual.norm() / std::sqrt(static_cast<double>(pilot_len));
        const double tau = cfg.threshold_factor * sigma_hat;

        double onsager_sum = 0.0;
        CVec x_next(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double mag = std::abs(u[k]);
            if (mag > tau) {
                x_next[k] = u[k] * ((mag - tau) / mag);
                onsager_sum += 1.0 - tau / (2.0 * mag);
            } else {
                x_next[k] = {0.0, 0.0};
            }
        }
        if (cfg.damping > 0.0) {
            x_next = (1.0 - cfg.damping) * x_next + cfg.damping * x;
        }
        const double change = (x_next - x).norm() / std::max(1.0, x.norm());
        const double onsager = onsager_sum / static_cast<double>(n);
        residual = y_scaled - a_unit * x_next + undersampling * onsager * residual;
        x = std::move(x_next);
        result.iterations = iter + 1;

        if (residual.norm() > 10.0 * std::max(initial_residual, 1e-300)) {
            result.converged = false;
            result.x = SplitComplexVector::from_complex(x);
            return result;
        }
        if (change < cfg.tol) {
            result.converged = true;
            break;
        }
    }
    result.x = SplitComplexVector::from_complex(x);
    return result;
}

double lasso_objective(const MeasurementMatrix& A, const SplitComplexVector& y,
                       const SplitComplexVector& x, double lambda) {
    const CVec r = y.to_complex() - A.to_complex() * x.to_complex();
    double l1 = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) l1 += x.magnitude(k);
    return 0.5 * r.squaredNorm() + lambda * l1;
}

double group_lasso_objective(const MeasurementMatrix& A, const SplitComplexVector& y,
                             const SplitComplexVector& x, const GroupSpec& spec, double lambda) {
    return sparse_group_lasso_objective(A, y, x, spec, 0.0, lambda);
}

double sparse_group_lasso_objective(const MeasurementMatrix& A, const SplitComplexVector& y,
                                    const SplitComplexVector& x, const GroupSpec& spec,
                                    double lambda1, double lambda2) {
    spec.validate(x.size());
    const CVec xc = x.to_complex();
    const CVec r = y.to_complex() - A.to_complex() * xc;
    double l1 = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) l1 += std::abs(xc[k]);
    double group_pen = 0.0;
    const double weight = std::sqrt(static_cast<double>(spec.group_size));
    for (int g = 0; g < spec.group_count; ++g) {
        group_pen += weight * group_norm(xc, g * spec.group_size, spec.group_size);
    }
    return 0.5 * r.squaredNorm() + lambda1 * l1 + lambda2 * group_pen;
}

BinaryVec magnitude_support(const SplitComplexVector& x_hat, double tau) {
    BinaryVec out(static_cast<std::size_t>(x_hat.size()));
    for (Eigen::Index k = 0; k < x_hat.size(); ++k) {
        out[static_cast<std::size_t>(k)] = x_hat.magnitude(k) > tau ? 1 : 0;
    }
    return out;
}

SupportCalibration calibrate_magnitude_threshold(
    const std::vector<SplitComplexVector>& estimates, const std::vector<BinaryVec>& labels) {
    if (estimates.empty() || estimates.size() != labels.size()) {
        throw std::invalid_argument("calibrate_magnitude_threshold: bad calibration set");
    }
    std::vector<double> magnitudes;
    for (const auto& x : estimates) {
        for (Eigen::Index k = 0; k < x.size(); ++k) magnitudes.push_back(x.magnitude(k));
    }
    std::sort(magnitudes.begin(), magnitudes.end());

    // Quantile candidates (1%..99%) of the pooled magnitudes, plus zero.
    std::vector<double> candidates{0.0};
    for (int q = 1; q <= 99; ++q) {
        const std::size_t idx = std::min(
            magnitudes.size() - 1,
            static_cast<std::size_t>(static_cast<double>(q) / 100.0 *
                                     static_cast<double>(magnitudes.size())));
        candidates.push_back(magnitudes[idx]);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    SupportCalibration best;
    bool first = true;
    for (const double tau : candidates) {
        std::size_t disagreements = 0;
        std::size_t entries = 0;
        for (std::size_t i = 0; i < estimates.size(); ++i) {
            const auto& x = estimates[i];
            const auto& truth = labels[i];
            for (Eigen::Index k = 0; k < x.size(); ++k) {
                const std::uint8_t pred = x.magnitude(k) > tau ? 1 : 0;
                disagreements += pred != truth[static_cast<std::size_t>(k)];
            }
            entries += truth.size();
        }
        const double pe = static_cast<double>(disagreements) / static_cast<double>(entries);
        best.grid.emplace_back(tau, pe);
        if (first || pe < best.pe_star) {
            best.tau_star = tau;
            best.pe_star = pe;
            first = false;
        }
    }
    return best;
}

BinaryVec support_extract(const SplitComplexVector& x_hat, double tau_star) {
    return magnitude_support(x_hat, tau_star);
}

LambdaSelection select_lambda(const SolverFn& solver, const std::vector<double>& lambda_grid,
                              const std::vector<SplitComplexVector>& measurements,
                              const std::vector<BinaryVec>& labels) {
    if (lambda_grid.empty()) throw std::invalid_argument("select_lambda: empty grid");
    if (measurements.empty() || measurements.size() != labels.size()) {
        throw std::invalid_argument("select_lambda: bad calibration set");
    }
    LambdaSelection best;
    bool first = true;
    for (const double lambda : lambda_grid) {
        std::vector<SplitComplexVector> estimates;
        estimates.reserve(measurements.size());
        for (const auto& y : measurements) estimates.push_back(solver(y, lambda));
        const SupportCalibration calib = calibrate_magnitude_threshold(estimates, labels);
        // Ties go to the larger (sparser) lambda.
        if (first || calib.pe_star < best.pe_star ||
            (calib.pe_star == best.pe_star && lambda > best.lambda_star)) {
            best.lambda_star = lambda;
            best.tau_star = calib.tau_star;
            best.pe_star = calib.pe_star;
            first = false;
        }
    }
    return best;
}

std::vector<double> default_lambda_grid(const MeasurementMatrix& A,
                                        const std::vector<SplitComplexVector>& measurements,
                                        int points) {
    if (points < 1) throw std::invalid_argument("default_lambda_grid: points < 1");
    if (measurements.empty()) throw std::invalid_argument("default_lambda_grid: no measurements");
    const CMat a = A.to_complex();
    double mean_max = 0.0;
    for (const auto& y : measurements) {
        mean_max += (a.adjoint() * y.to_complex()).cwiseAbs().maxCoeff();
    }
    mean_max /= static_cast<double>(measurements.size());

    std::vector<double> grid(static_cast<std::size_t>(points));
    const double lo = 0.01 * mean_max;
    const double hi = 1.0 * mean_max;
    if (points == 1) {
        grid[0] = hi;
        return grid;
    }
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (int k = 0; k < points; ++k) {
        grid[static_cast<std::size_t>(k)] = lo * std::exp(step * k);
    }
    return grid;
}

}  // namespace ssr
