#include <doctest.h>

#include <complex>
#include <vector>

#include "ssr/autoencoder.hpp"
#include "ssr/baselines.hpp"
#include "ssr/datagen.hpp"
#include "ssr/rng.hpp"

using namespace ssr;

namespace {

using Complex = std::complex<double>;

SplitComplexVector random_signal(int n, int active, Rng& rng) {
    SplitComplexVector x = SplitComplexVector::zero(n);
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) idx[static_cast<std::size_t>(k)] = k;
    for (int k = n - 1; k > 0; --k) {
        const int j = static_cast<int>(rng.uniform() * (k + 1));
        std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(std::min(j, k))]);
    }
    for (int k = 0; k < active; ++k) {
        auto [re, im] = rng.normal_pair();
        x.re[idx[static_cast<std::size_t>(k)]] = re;
        x.im[idx[static_cast<std::size_t>(k)]] = im;
    }
    return x;
}

SplitComplexVector measure(const MeasurementMatrix& A, const SplitComplexVector& x,
                           double sigma2, Rng& rng) {
    SplitComplexVector y = complex_matvec(A, x);
    if (sigma2 > 0.0) {
        const NoiseDraw z = gen_noise(static_cast<int>(A.rows()), sigma2, rng);
        y.re += z.z.re;
        y.im += z.z.im;
    }
    return y;
}

// Matrix with orthogonal columns of norm sqrt(L) (unitary QR, rescaled).
MeasurementMatrix orthogonal_pilots(int l, Rng& rng) {
    const MeasurementMatrix raw = random_pilot_matrix(l, l, rng);
    const Eigen::HouseholderQR<CMat> qr(raw.to_complex());
    CMat q = qr.householderQ();
    return MeasurementMatrix::from_complex(q * std::sqrt(static_cast<double>(l)));
}

// Second-solver oracle: proximal gradient (ISTA) on the complex LASSO.
SplitComplexVector ista_lasso(const MeasurementMatrix& A, const SplitComplexVector& y,
                              double lambda, int iters = 200000, double tol = 1e-14) {
    const CMat a = A.to_complex();
    const CVec yc = y.to_complex();
    Eigen::SelfAdjointEigenSolver<CMat> eig(a.adjoint() * a, Eigen::EigenvaluesOnly);
    const double rho = eig.eigenvalues().maxCoeff();
    CVec x = CVec::Zero(a.cols());
    for (int it = 0; it < iters; ++it) {
        const CVec grad = a.adjoint() * (a * x - yc);
        CVec next = x - grad / rho;
        for (Eigen::Index k = 0; k < next.size(); ++k) {
            const double mag = std::abs(next[k]);
            next[k] = mag <= lambda / rho ? Complex{0.0, 0.0}
                                          : next[k] * ((mag - lambda / rho) / mag);
        }
        const double change = (next - x).norm();
        x = next;
        if (change < tol) break;
    }
    return SplitComplexVector::from_complex(x);
}

}  // namespace

TEST_CASE("large lambda shrinks every lasso coordinate to zero") {
    Rng rng(2);
    const MeasurementMatrix A = random_pilot_matrix(4, 8, rng);
    const SplitComplexVector x = random_signal(8, 2, rng);
    const SplitComplexVector y = measure(A, x, 0.01, rng);

    const double lambda_max = (A.to_complex().adjoint() * y.to_complex()).cwiseAbs().maxCoeff();
    LassoConfig cfg;
    cfg.lambda = lambda_max * 1.0001;
    const SolveResult res = lasso_solve(A, y, cfg);
    CHECK(res.converged);
    CHECK(res.x.re.norm() == 0.0);
    CHECK(res.x.im.norm() == 0.0);
}

TEST_CASE("orthogonal pilots give the closed-form soft threshold") {
    Rng rng(5);
    const int l = 6;
    const MeasurementMatrix A = orthogonal_pilots(l, rng);
    const SplitComplexVector x = random_signal(l, 2, rng);
    const SplitComplexVector y = measure(A, x, 0.0, rng);
    const double lambda = 0.8;

    LassoConfig cfg;
    cfg.lambda = lambda;
    cfg.tol = 1e-12;
    const SolveResult res = lasso_solve(A, y, cfg);
    REQUIRE(res.converged);

    const CMat a = A.to_complex();
    const CVec yc = y.to_complex();
    for (Eigen::Index k = 0; k < l; ++k) {
        const Complex corr = (a.col(k).dot(yc)) / static_cast<double>(l);
        const double mag = std::abs(corr);
        const Complex expected =
            mag <= lambda / l ? Complex{0.0, 0.0} : corr * ((mag - lambda / l) / mag);
        CHECK(std::abs(Complex{res.x.re[k], res.x.im[k]} - expected) < 1e-10);
    }
}

TEST_CASE("lasso objective matches an independent ISTA solver") {
    Rng rng(7);
    const MeasurementMatrix A = random_pilot_matrix(4, 8, rng);
    const SplitComplexVector x = random_signal(8, 1, rng);
    const SplitComplexVector y = measure(A, x, 1e-4, rng);
    const double lambda = 0.3;

    LassoConfig cfg;
    cfg.lambda = lambda;
    cfg.tol = 1e-13;
    cfg.max_iters = 100000;
    const SolveResult cd = lasso_solve(A, y, cfg);
    REQUIRE(cd.converged);
    const SplitComplexVector ista = ista_lasso(A, y, lambda);

    const double f_cd = lasso_objective(A, y, cd.x, lambda);
    const double f_ista = lasso_objective(A, y, ista, lambda);
    CHECK(std::abs(f_cd - f_ista) < 1e-8);
}

TEST_CASE("lasso satisfies the KKT conditions at convergence") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const MeasurementMatrix A = random_pilot_matrix(5, 10, rng);
        const SplitComplexVector x = random_signal(10, 2, rng);
        const SplitComplexVector y = measure(A, x, 0.01, rng);
        const double lambda = 0.5;
        LassoConfig cfg;
        cfg.lambda = lambda;
        cfg.tol = 1e-12;
        cfg.max_iters = 50000;
        const SolveResult res = lasso_solve(A, y, cfg);
        REQUIRE(res.converged);

        const CMat a = A.to_complex();
        const CVec residual = y.to_complex() - a * res.x.to_complex();
        for (Eigen::Index k = 0; k < 10; ++k) {
            const Complex corr = a.col(k).dot(residual);
            const Complex xk{res.x.re[k], res.x.im[k]};
            if (std::abs(xk) == 0.0) {
                CHECK(std::abs(corr) <= lambda + 1e-6);
            } else {
                // Residual correlation aligns with the phase, magnitude lambda.
                CHECK(std::abs(corr - lambda * xk / std::abs(xk)) < 1e-6);
            }
        }
    }
}

TEST_CASE("solver objectives never increase across sweeps") {
    Rng rng(13);
    const MeasurementMatrix A = random_pilot_matrix(6, 12, rng);
    const SplitComplexVector x = random_signal(12, 3, rng);
    const SplitComplexVector y = measure(A, x, 0.05, rng);
    const GroupSpec spec{3, 4};

    double prev_lasso = std::numeric_limits<double>::infinity();
    double prev_group = std::numeric_limits<double>::infinity();
    double prev_sparse = std::numeric_limits<double>::infinity();
    for (int sweeps = 1; sweeps <= 25; ++sweeps) {
        LassoConfig cfg;
        cfg.lambda = 0.4;
        cfg.max_iters = sweeps;
        cfg.tol = 1e-300;  // force exactly `sweeps` sweeps
        const double f_lasso = lasso_objective(A, y, lasso_solve(A, y, cfg).x, 0.4);
        CHECK(f_lasso <= prev_lasso + 1e-12);
        prev_lasso = f_lasso;

        const double f_group = group_lasso_objective(
            A, y, group_lasso_solve(A, y, spec, 0.4, sweeps, 1e-300).x, spec, 0.4);
        CHECK(f_group <= prev_group + 1e-12);
        prev_group = f_group;

        const double f_sparse = sparse_group_lasso_objective(
            A, y, sparse_group_lasso_solve(A, y, spec, 0.2, 0.3, sweeps, 1e-300).x, spec, 0.2,
            0.3);
        CHECK(f_sparse <= prev_sparse + 1e-12);
        prev_sparse = f_sparse;
    }
}

TEST_CASE("group lasso with unit groups reduces to lasso") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const MeasurementMatrix A = random_pilot_matrix(5, 9, rng);
        const SplitComplexVector x = random_signal(9, 2, rng);
        const SplitComplexVector y = measure(A, x, 0.02, rng);
        const double lambda = 0.35;

        LassoConfig cfg;
        cfg.lambda = lambda;
        cfg.tol = 1e-12;
        cfg.max_iters = 50000;
        const SplitComplexVector a_hat = lasso_solve(A, y, cfg).x;
        const SplitComplexVector b_hat =
            group_lasso_solve(A, y, GroupSpec{1, 9}, lambda, 50000, 1e-12).x;
        CHECK((a_hat.re - b_hat.re).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((a_hat.im - b_hat.im).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("sparse group lasso degenerates to lasso and to group lasso") {
    Rng rng(19);
    const GroupSpec spec{3, 4};
    for (int trial = 0; trial < 10; ++trial) {
        const MeasurementMatrix A = random_pilot_matrix(6, 12, rng);
        const SplitComplexVector x = random_signal(12, 3, rng);
        const SplitComplexVector y = measure(A, x, 0.02, rng);

        LassoConfig cfg;
        cfg.lambda = 0.3;
        cfg.tol = 1e-12;
        cfg.max_iters = 50000;
        const SplitComplexVector lasso_x = lasso_solve(A, y, cfg).x;
        const SplitComplexVector sgl_l1 =
            sparse_group_lasso_solve(A, y, spec, 0.3, 0.0, 50000, 1e-12).x;
        CHECK((lasso_x.re - sgl_l1.re).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((lasso_x.im - sgl_l1.im).cwiseAbs().maxCoeff() < 1e-8);

        const SplitComplexVector group_x =
            group_lasso_solve(A, y, spec, 0.3, 50000, 1e-12).x;
        const SplitComplexVector sgl_l2 =
            sparse_group_lasso_solve(A, y, spec, 0.0, 0.3, 50000, 1e-12).x;
        CHECK((group_x.re - sgl_l2.re).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((group_x.im - sgl_l2.im).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("sparse group lasso beats both pure penalties under its objective") {
    Rng rng(23);
    const GroupSpec spec{2, 5};
    const MeasurementMatrix A = random_pilot_matrix(5, 10, rng);
    const SplitComplexVector x = random_signal(10, 2, rng);
    const SplitComplexVector y = measure(A, x, 0.05, rng);

    const double l1 = 0.2, l2 = 0.25;
    const SplitComplexVector sgl =
        sparse_group_lasso_solve(A, y, spec, l1, l2, 50000, 1e-12).x;
    LassoConfig cfg;
    cfg.lambda = l1;
    cfg.tol = 1e-12;
    cfg.max_iters = 50000;
    const SplitComplexVector pure_l1 = lasso_solve(A, y, cfg).x;
    const SplitComplexVector pure_l2 = group_lasso_solve(A, y, spec, l2, 50000, 1e-12).x;

    const double f_sgl = sparse_group_lasso_objective(A, y, sgl, spec, l1, l2);
    CHECK(f_sgl <= sparse_group_lasso_objective(A, y, pure_l1, spec, l1, l2) + 1e-10);
    CHECK(f_sgl <= sparse_group_lasso_objective(A, y, pure_l2, spec, l1, l2) + 1e-10);
}

TEST_CASE("group lasso zeroes or keeps whole groups") {
    Rng rng(29);
    const GroupSpec spec{3, 4};
    for (int trial = 0; trial < 10; ++trial) {
        const MeasurementMatrix A = random_pilot_matrix(8, 12, rng);
        // One whole group active (the p_u = 1 structure).
        SplitComplexVector x = SplitComplexVector::zero(12);
        const int g = static_cast<int>(rng.uniform() * 4);
        for (int k = 0; k < 3; ++k) {
            auto [re, im] = rng.normal_pair();
            x.re[g * 3 + k] = re;
            x.im[g * 3 + k] = im;
        }
        const SplitComplexVector y = measure(A, x, 1e-4, rng);
        const SplitComplexVector x_hat =
            group_lasso_solve(A, y, spec, 0.5, 20000, 1e-12).x;
        for (int grp = 0; grp < 4; ++grp) {
            int nonzero = 0;
            for (int k = 0; k < 3; ++k) {
                nonzero += SplitComplexVector{x_hat.re, x_hat.im}.magnitude(grp * 3 + k) > 1e-12;
            }
            CHECK((nonzero == 0 || nonzero == 3));
        }
    }
}

TEST_CASE("amp fixes the all-zero point") {
    Rng rng(31);
    const MeasurementMatrix A = random_pilot_matrix(4, 8, rng);
    AmpConfig cfg;
    const SolveResult res = amp_solve(A, SplitComplexVector::zero(4), cfg);
    CHECK(res.converged);
    CHECK(res.x.re.norm() == 0.0);
    CHECK(res.x.im.norm() == 0.0);
}

TEST_CASE("amp recovers a single spike under orthogonal pilots") {
    Rng rng(37);
    const int l = 8;
    const MeasurementMatrix A = orthogonal_pilots(l, rng);
    SplitComplexVector x = SplitComplexVector::zero(l);
    x.re[3] = 1.4;
    x.im[3] = -0.7;
    const SplitComplexVector y = measure(A, x, 0.0, rng);

    AmpConfig cfg;
    cfg.max_iters = 500;
    cfg.tol = 1e-12;
    const SolveResult res = amp_solve(A, y, cfg);
    CHECK(std::abs(res.x.re[3] - 1.4) < 1e-6);
    CHECK(std::abs(res.x.im[3] + 0.7) < 1e-6);
    for (int k = 0; k < l; ++k) {
        if (k != 3) CHECK(res.x.magnitude(k) < 1e-6);
    }
}

TEST_CASE("amp mse stays within 2x of lasso on small random instances") {
    Rng rng(41);
    double amp_mse = 0.0;
    double lasso_mse = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const MeasurementMatrix A = random_pilot_matrix(4, 8, rng);
        const SplitComplexVector x = random_signal(8, 1, rng);
        const SplitComplexVector y = measure(A, x, 0.01, rng);

        AmpConfig ac;
        ac.max_iters = 300;
        ac.damping = 0.5;
        ac.sigma2 = 0.01;
        const SplitComplexVector x_amp = amp_solve(A, y, ac).x;

        LassoConfig lc;
        lc.lambda = 0.1 * (A.to_complex().adjoint() * y.to_complex()).cwiseAbs().maxCoeff();
        lc.tol = 1e-10;
        lc.max_iters = 20000;
        const SplitComplexVector x_lasso = lasso_solve(A, y, lc).x;

        amp_mse += (x_amp.re - x.re).squaredNorm() + (x_amp.im - x.im).squaredNorm();
        lasso_mse += (x_lasso.re - x.re).squaredNorm() + (x_lasso.im - x.im).squaredNorm();
    }
    CHECK(amp_mse <= 2.0 * lasso_mse);
}

TEST_CASE("support extraction on exact estimates reaches zero error") {
    Rng rng(43);
    std::vector<SplitComplexVector> estimates;
    std::vector<BinaryVec> labels;
    double min_active = 1e300;
    for (int i = 0; i < 30; ++i) {
        const SplitComplexVector x = random_signal(10, 3, rng);
        estimates.push_back(x);
        labels.push_back(support_of(x, 0.0));
        for (int k = 0; k < 10; ++k) {
            const double mag = x.magnitude(k);
            if (mag > 0.0) min_active = std::min(min_active, mag);
        }
    }
    const SupportCalibration calib = calibrate_magnitude_threshold(estimates, labels);
    CHECK(calib.pe_star == 0.0);
    CHECK(calib.tau_star < min_active);
}

TEST_CASE("support extraction on all-zero estimates predicts silence") {
    Rng rng(47);
    std::vector<SplitComplexVector> estimates;
    std::vector<BinaryVec> labels;
    std::size_t active = 0;
    for (int i = 0; i < 50; ++i) {
        estimates.push_back(SplitComplexVector::zero(8));
        BinaryVec lab(8);
        for (int k = 0; k < 8; ++k) {
            lab[static_cast<std::size_t>(k)] = rng.bernoulli(0.2);
            active += lab[static_cast<std::size_t>(k)];
        }
        labels.push_back(lab);
    }
    const SupportCalibration calib = calibrate_magnitude_threshold(estimates, labels);
    CHECK(calib.pe_star == doctest::Approx(static_cast<double>(active) / 400.0));
    // tau = 0 with strict '>' predicts the all-zero support.
    CHECK(support_extract(estimates[0], calib.tau_star) == BinaryVec(8, 0));
}

TEST_CASE("support extraction grid matches a brute-force recomputation") {
    Rng rng(53);
    std::vector<SplitComplexVector> estimates;
    std::vector<BinaryVec> labels;
    for (int i = 0; i < 20; ++i) {
        SplitComplexVector x = SplitComplexVector::zero(6);
        BinaryVec lab(6);
        for (int k = 0; k < 6; ++k) {
            lab[static_cast<std::size_t>(k)] = rng.bernoulli(0.4);
            const double mag = rng.uniform();
            x.re[k] = mag * (lab[static_cast<std::size_t>(k)] ? 1.0 : 0.3);
        }
        estimates.push_back(x);
        labels.push_back(lab);
    }
    const SupportCalibration calib = calibrate_magnitude_threshold(estimates, labels);
    for (const auto& [tau, pe] : calib.grid) {
        std::size_t disagreements = 0;
        for (std::size_t i = 0; i < estimates.size(); ++i) {
            for (int k = 0; k < 6; ++k) {
                const int pred = estimates[i].magnitude(k) > tau ? 1 : 0;
                disagreements += pred != labels[i][static_cast<std::size_t>(k)];
            }
        }
        CHECK(pe == doctest::Approx(disagreements / 120.0).epsilon(1e-15));
        CHECK(calib.pe_star <= pe);
    }
}

TEST_CASE("select_lambda handles single grids and degenerate scenarios") {
    Rng rng(59);
    const MeasurementMatrix A = random_pilot_matrix(4, 8, rng);
    std::vector<SplitComplexVector> ys;
    std::vector<BinaryVec> labels;
    for (int i = 0; i < 20; ++i) {
        ys.push_back(measure(A, SplitComplexVector::zero(8), 0.01, rng));
        labels.push_back(BinaryVec(8, 0));
    }
    auto solver = [&](const SplitComplexVector& y, double lambda) {
        LassoConfig cfg;
        cfg.lambda = lambda;
        return lasso_solve(A, y, cfg).x;
    };
    // Single-element grid returns that element.
    const LambdaSelection single = select_lambda(solver, {0.7}, ys, labels);
    CHECK(single.lambda_star == 0.7);

    // All-inactive scenario: every lambda achieves zero error, the sparsest wins.
    const LambdaSelection sel = select_lambda(solver, {0.1, 0.5, 2.0}, ys, labels);
    CHECK(sel.lambda_star == 2.0);
    CHECK(sel.pe_star == 0.0);
}

TEST_CASE("select_lambda matches an exhaustive per-lambda table") {
    Rng rng(61);
    const MeasurementMatrix A = random_pilot_matrix(4, 8, rng);
    std::vector<SplitComplexVector> ys;
    std::vector<BinaryVec> labels;
    for (int i = 0; i < 25; ++i) {
        const SplitComplexVector x = random_signal(8, 1, rng);
        labels.push_back(support_of(x, 0.0));
        ys.push_back(measure(A, x, 0.01, rng));
    }
    const std::vector<double> grid = default_lambda_grid(A, ys, 8);
    auto solver = [&](const SplitComplexVector& y, double lambda) {
        LassoConfig cfg;
        cfg.lambda = lambda;
        return lasso_solve(A, y, cfg).x;
    };
    const LambdaSelection sel = select_lambda(solver, grid, ys, labels);

    // Exhaustive table built with direct loops.
    double best_pe = 1e300;
    double best_lambda = 0.0;
    for (const double lambda : grid) {
        std::vector<SplitComplexVector> estimates;
        for (const auto& y : ys) estimates.push_back(solver(y, lambda));
        const double pe = calibrate_magnitude_threshold(estimates, labels).pe_star;
        if (pe < best_pe || (pe == best_pe && lambda > best_lambda)) {
            best_pe = pe;
            best_lambda = lambda;
        }
    }
    CHECK(sel.lambda_star == best_lambda);
    CHECK(sel.pe_star == best_pe);
}
