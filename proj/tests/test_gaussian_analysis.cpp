#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "langevin/gaussian_analysis.hpp"
#include "langevin/matkit.hpp"
#include "oracles.hpp"

using namespace langevin;

namespace {

Matrix diag2(double a, double b) {
    Matrix k = Matrix::Zero(2, 2);
    k(0, 0) = a;
    k(1, 1) = b;
    return k;
}

double sigma2(double gamma, double mu, double nu, const Matrix& j, const Matrix& k, const Vector& l) {
    return asym_variance(PerturbationConfig::unit(gamma, mu, nu, AntiSymMatrix(j)),
                         QuadraticObservable{SymMatrix(k), l, 0.0});
}

Matrix fd_hessian(const std::function<double(double, double)>& g, double h) {
    Matrix out(2, 2);
    const double g0 = g(0.0, 0.0);
    out(0, 0) = (g(h, 0.0) - 2.0 * g0 + g(-h, 0.0)) / (h * h);
    out(1, 1) = (g(0.0, h) - 2.0 * g0 + g(0.0, -h)) / (h * h);
    out(0, 1) = out(1, 0) = oracle::central_mixed(g, h);
    return out;
}

// Entrywise error relative to the largest entry.
double hess_rel_err(const Matrix& got, const Matrix& ref) {
    return oracle::max_abs(got - ref) / std::max(1e-12, oracle::max_abs(ref));
}

}  // namespace

TEST(AMatrix, UnperturbedScalarCase) {
    Matrix expect(2, 2);
    expect << 0, 1, -1, 2;
    const PerturbationConfig cfg = PerturbationConfig::unit(2.0, 0.0, 0.0, AntiSymMatrix::zero(1));
    EXPECT_EQ(oracle::max_abs(a_matrix(cfg) - expect), 0.0);
}

TEST(AMatrix, PerturbedBlocksAndDriftTranspose) {
    const Matrix j = oracle::standard_j(2);
    const Matrix a = a_matrix(1.5, 1.0, 1.0, j);
    EXPECT_EQ(oracle::max_abs(a - oracle::unit_a(1.5, 1.0, 1.0, j)), 0.0);
    EXPECT_EQ(oracle::max_abs(drift_matrix(1.5, 1.0, 1.0, j) - a.transpose()), 0.0);
}

TEST(AMatrix, GeneralPrecisionMapsToAntisymmetricUnitGenerator) {
    oracle::Random rng(31);
    const SymMatrix s(rng.spd(3));
    const AntiSymMatrix j1(rng.antisymmetric(3));
    const PerturbationConfig cfg = PerturbationConfig::matched(s, 1.3, 0.7, 0.7, j1);
    const Matrix a = a_matrix(cfg);
    const Matrix root = spd_sqrt(s).mat();
    const Matrix jt = root * j1.mat() * root;
    EXPECT_LE(oracle::max_abs(jt + jt.transpose()), 1e-12 * oracle::max_abs(jt));
    EXPECT_LE(oracle::max_abs(a - oracle::unit_a(1.3, 0.7, 0.7, jt)), 1e-12);
}

TEST(AsymVariance, UnperturbedScalarValue) {
    Vector l = Vector::Zero(1);
    EXPECT_NEAR(sigma2(2.0, 0.0, 0.0, Matrix::Zero(1, 1), Matrix::Identity(1, 1), l), 2.5, 1e-13);
}

TEST(AsymVariance, ZeroObservable) {
    EXPECT_EQ(sigma2(1.0, 0.3, 0.3, oracle::standard_j(2), Matrix::Zero(2, 2), Vector::Zero(2)), 0.0);
}

TEST(AsymVariance, PerturbedExampleMatchesKroneckerOracle) {
    const Matrix j = oracle::standard_j(2);
    const Matrix k = diag2(2, 1);
    const Vector l = Vector::Zero(2);
    const double ref = oracle::unit_sigma2(2.0, 0.7, 0.7, j, k, l);
    EXPECT_NEAR(sigma2(2.0, 0.7, 0.7, j, k, l), ref, 1e-9 * std::abs(ref));
}

TEST(AsymVariance, UnperturbedClosedFormForQuadratic) {
    const double gamma = 2.0;
    const Matrix k = diag2(2, 1);
    EXPECT_NEAR(sigma2(gamma, 0.0, 0.0, oracle::standard_j(2), k, Vector::Zero(2)),
                (1.0 / gamma + gamma) * (k * k).trace(), 1e-12);
    EXPECT_NEAR(sigma2(gamma, 0.0, 0.0, oracle::standard_j(2), k, Vector::Zero(2)), 12.5, 1e-12);
}

TEST(AsymVariance, RandomInstancesMatchKroneckerOracle) {
    oracle::Random rng(32);
    for (int trial = 0; trial < 40; ++trial) {
        const int d = 1 + trial % 5;
        const double gamma = rng.uniform(0.3, 5.0);
        const double mu = rng.uniform(-3.0, 3.0), nu = rng.uniform(-3.0, 3.0);
        const Matrix j = rng.antisymmetric(d), k = rng.symmetric(d);
        const Vector l = rng.vector(d);
        const double ref = oracle::unit_sigma2(gamma, mu, nu, j, k, l);
        EXPECT_NEAR(sigma2(gamma, mu, nu, j, k, l), ref, 1e-9 * std::max(1.0, std::abs(ref)));
    }
}

TEST(AsymVariance, MomentumTraceIdentityOnSolutions) {
    oracle::Random rng(33);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 1 + trial % 6;
        const double gamma = rng.uniform(0.3, 5.0);
        const Matrix k = rng.symmetric(d);
        const PerturbationConfig cfg = PerturbationConfig::unit(
            gamma, rng.uniform(-2, 2), rng.uniform(-2, 2), AntiSymMatrix(rng.antisymmetric(d)));
        const VarianceDetail det = asym_variance_detail(cfg, QuadraticObservable{SymMatrix(k), Vector::Zero(d), 0});
        const double trace_p = det.C.mat().bottomRightCorner(d, d).trace();
        EXPECT_NEAR(2.0 * gamma * trace_p, k.trace(), 1e-8 * std::max(1.0, std::abs(k.trace())));
        EXPECT_LE(det.trace_residual, 1e-8 * std::max(1.0, k.norm()));
    }
}

TEST(AsymVariance, NonnegativeAndShiftInvariant) {
    oracle::Random rng(34);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 1 + trial % 4;
        const PerturbationConfig cfg = PerturbationConfig::unit(
            rng.uniform(0.2, 4.0), rng.uniform(-2, 2), rng.uniform(-2, 2), AntiSymMatrix(rng.antisymmetric(d)));
        const SymMatrix k(rng.symmetric(d));
        const Vector l = rng.vector(d);
        const double a = asym_variance(cfg, QuadraticObservable{k, l, 0.0});
        const double b = asym_variance(cfg, QuadraticObservable{k, l, 17.5});
        EXPECT_GE(a, 0.0);
        EXPECT_EQ(a, b);
    }
}

TEST(AsymVariance, InvariantUnderChangeToUnitCoordinates) {
    oracle::Random rng(35);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + trial % 4;
        const Matrix s = rng.spd(d);
        const Matrix j1 = rng.antisymmetric(d);
        const double gamma = rng.uniform(0.5, 3.0), mu = rng.uniform(-2, 2);
        const Matrix k = rng.symmetric(d);
        const Vector l = rng.vector(d);
        const PerturbationConfig cfg = PerturbationConfig::matched(SymMatrix(s), gamma, mu, mu, AntiSymMatrix(j1));
        const double got = asym_variance(cfg, QuadraticObservable{SymMatrix(k), l, 0.0});
        const double ref = oracle::phase_sigma2(mu, mu, s, s, gamma * s, j1, s * j1 * s, k, l);
        EXPECT_NEAR(got, ref, 1e-9 * std::max(1.0, std::abs(ref)));
    }
}

TEST(AsymVariance, RejectsUnmatchedConfiguration) {
    PerturbationConfig cfg = PerturbationConfig::unit(1.0, 0.5, 0.5, AntiSymMatrix::standard(2));
    cfg.M = SymMatrix(diag2(2, 1));
    EXPECT_THROW(asym_variance(cfg, QuadraticObservable{SymMatrix::identity(2), Vector::Zero(2), 0}),
                 std::invalid_argument);
}

TEST(ConfigValidation, RejectsBadInputs) {
    PerturbationConfig cfg = PerturbationConfig::unit(1.0, 0.0, 0.0, AntiSymMatrix::zero(2));
    cfg.gamma = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = PerturbationConfig::unit(1.0, 0.0, 0.0, AntiSymMatrix::zero(2));
    cfg.J1 = AntiSymMatrix::zero(3);
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(NuRule, ParseApplyAndPrint) {
    EXPECT_EQ(NuRule::parse("equal").apply(2.5), 2.5);
    EXPECT_EQ(NuRule::parse("opposed").apply(2.5), -2.5);
    EXPECT_DOUBLE_EQ(NuRule::parse("scaled(0.9)").apply(10.0), 9.0);
    EXPECT_EQ(NuRule::parse("fixed(1.5)").apply(100.0), 1.5);
    for (const char* s : {"equal", "opposed", "scaled(0.9)", "fixed(-2)"}) {
        EXPECT_EQ(NuRule::parse(s).to_string(), s);
    }
    for (const char* s : {"", "equals", "scaled()", "scaled(x)", "fixed(1", "scaled(1)x"}) {
        EXPECT_THROW(NuRule::parse(s), std::invalid_argument) << s;
    }
}

TEST(ThetaSurface, SinglePointMatchesDirectEvaluation) {
    const PerturbationConfig base = PerturbationConfig::unit(2.0, 0.0, 0.0, AntiSymMatrix::standard(2));
    const QuadraticObservable f{SymMatrix(diag2(2, 1)), Vector::Ones(2), 0.0};
    const auto pts = theta_surface(base, f, {0.4}, NuRule::equal());
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_EQ(pts[0].nu, 0.4);
    EXPECT_EQ(pts[0].sigma2, sigma2(2.0, 0.4, 0.4, oracle::standard_j(2), diag2(2, 1), Vector::Ones(2)));
}

TEST(ThetaSurface, EqualRuleNonincreasingOnLogGrid) {
    const PerturbationConfig base = PerturbationConfig::unit(2.0, 0.0, 0.0, AntiSymMatrix::standard(2));
    for (const Vector& l : {Vector(Vector::Zero(2)), Vector(Vector::Ones(2))}) {
        const QuadraticObservable f{SymMatrix(diag2(2, 1)), l, 0.0};
        std::vector<double> grid{0.0};
        for (int e = -20; e <= 30; ++e) grid.push_back(std::pow(10.0, e / 10.0));
        const auto pts = theta_surface(base, f, grid, NuRule::equal());
        for (std::size_t i = 1; i < pts.size(); ++i) {
            EXPECT_LE(pts[i].sigma2, pts[i - 1].sigma2 * (1.0 + 1e-12)) << "mu = " << pts[i].mu;
        }
    }
}

TEST(ThetaSurface, ApproximatelyEqualRuleGrowsForLargeMu) {
    const PerturbationConfig base = PerturbationConfig::unit(2.0, 0.0, 0.0, AntiSymMatrix::standard(2));
    const QuadraticObservable f{SymMatrix(diag2(2, 1)), Vector::Zero(2), 0.0};
    const auto pts = theta_surface(base, f, {0.0, 10.0, 100.0, 1000.0}, NuRule::scaled(0.9));
    EXPECT_GT(pts[2].sigma2, pts[1].sigma2);
    EXPECT_GT(pts[3].sigma2, pts[2].sigma2);
    EXPECT_GT(pts[3].sigma2, 10.0 * pts[0].sigma2);
}

TEST(ThetaHessianQuadratic, WorkedTwoDimensionalExample) {
    const ThetaDerivatives h = theta_hessian_quadratic(2.0, SymMatrix(diag2(2, 1)), AntiSymMatrix::standard(2));
    EXPECT_EQ(h.gradient.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_NEAR(h.hessian(0, 0), -6.125, 1e-12);
    EXPECT_NEAR(h.hessian(0, 1), -2.625, 1e-12);
    EXPECT_NEAR(h.hessian(1, 1), 4.375, 1e-12);
    const Eigen::Vector2d e(1.0, 1.0);
    EXPECT_NEAR(e.dot(h.hessian * e), -7.0, 1e-12);
}

TEST(ThetaHessianQuadratic, CommutingCaseWithComplexStructure) {
    // J^2 = -I and [J, K] = 0: both pure second derivatives equal 2 Tr(K^2) / gamma.
    const Matrix j = oracle::standard_j(4);
    Matrix k = Matrix::Zero(4, 4);
    k.diagonal() << 3.0, 3.0, -1.0, -1.0;
    for (double gamma : {0.5, 1.0, 2.0, 4.0}) {
        const ThetaDerivatives h = theta_hessian_quadratic(gamma, SymMatrix(k), AntiSymMatrix(j));
        EXPECT_NEAR(h.hessian(0, 0), 2.0 * (k * k).trace() / gamma, 1e-12);
        EXPECT_NEAR(h.hessian(1, 1), 2.0 * (k * k).trace() / gamma, 1e-12);
        auto g = [&](double mu, double nu) { return sigma2(gamma, mu, nu, j, k, Vector::Zero(4)); };
        EXPECT_LE(hess_rel_err(fd_hessian(g, 1e-3), h.hessian), 1e-4);
    }
}

TEST(ThetaHessianQuadratic, MatchesFiniteDifferencesOfPipeline) {
    oracle::Random rng(36);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + trial % 4;
        const double gamma = rng.uniform(0.5, 4.0);
        const Matrix j = rng.antisymmetric(d), k = rng.symmetric(d);
        auto g = [&](double mu, double nu) { return sigma2(gamma, mu, nu, j, k, Vector::Zero(d)); };
        const ThetaDerivatives h = theta_hessian_quadratic(gamma, SymMatrix(k), AntiSymMatrix(j));
        EXPECT_LE(hess_rel_err(fd_hessian(g, 1e-3), h.hessian), 1e-4) << "trial " << trial;
        const double scale = 1.0 + std::abs(g(0, 0));
        EXPECT_LE(std::abs(oracle::central_first([&](double x) { return g(x, 0); }, 0.0, 1e-5)), 1e-6 * scale);
        EXPECT_LE(std::abs(oracle::central_first([&](double x) { return g(0, x); }, 0.0, 1e-5)), 1e-6 * scale);
    }
}

TEST(ThetaHessianQuadratic, OpposedDirectionCanIncrease) {
    const Matrix j = oracle::standard_j(2), k = diag2(2, 1);
    const ThetaDerivatives h = theta_hessian_quadratic(2.0, SymMatrix(k), AntiSymMatrix(j));
    const Eigen::Vector2d e(1.0, -1.0);
    EXPECT_NEAR(e.dot(h.hessian * e), 3.5, 1e-12);
    auto along = [&](double t) { return sigma2(2.0, t, -t, j, k, Vector::Zero(2)); };
    EXPECT_NEAR(oracle::central_second(along, 0.0, 1e-3), 3.5, 1e-4 * 3.5);
    EXPECT_GT(along(0.1), along(0.0));

    // With a larger friction the same direction decreases the variance.
    const ThetaDerivatives h2 = theta_hessian_quadratic(4.0, SymMatrix(k), AntiSymMatrix(j));
    EXPECT_LT(e.dot(h2.hessian * e), 0.0);
}

TEST(ThetaHessianLinear, KernelGivesZeroAndWorkedExample) {
    Vector l(2);
    l << 1, 1;
    const ThetaDerivatives h = theta_hessian_linear(2.0, l, AntiSymMatrix::standard(2));
    Matrix expect(2, 2);
    expect << -32, 8, 8, 0;
    EXPECT_EQ(oracle::max_abs(Matrix(h.hessian) - expect), 0.0);
    Vector l3(3);
    l3 << 0, 0, 1;
    EXPECT_EQ(theta_hessian_linear(1.0, l3, AntiSymMatrix::standard(3)).hessian.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ThetaHessianLinear, MatchesFiniteDifferences) {
    oracle::Random rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + trial % 4;
        const double gamma = rng.uniform(0.5, 3.0);
        const AntiSymMatrix j(rng.antisymmetric(d));
        const Vector l = rng.vector(d);
        auto g = [&](double mu, double nu) { return theta_linear_closed(gamma, mu, nu, l, j); };
        const Matrix ref = fd_hessian(g, 1e-3);
        EXPECT_LE(hess_rel_err(Matrix(theta_hessian_linear(gamma, l, j).hessian), ref), 1e-4);
    }
}

TEST(ThetaLinearClosed, SpecialValues) {
    Vector l(2);
    l << 1.5, -0.5;
    EXPECT_NEAR(theta_linear_closed(2.0, 0.0, 0.0, l, AntiSymMatrix::standard(2)), 2.0 * l.squaredNorm(), 1e-13);
    Vector l1(1);
    l1 << 3.0;
    for (double mu : {0.0, 1.0, 100.0}) {
        EXPECT_NEAR(theta_linear_closed(0.7, mu, mu, l1, AntiSymMatrix::zero(1)), 0.7 * 9.0, 1e-12);
    }
    const double big = theta_linear_closed(2.0, 1e4, 1e4, l, AntiSymMatrix::standard(2));
    EXPECT_LE(big, 1e-6 * theta_linear_closed(2.0, 0.0, 0.0, l, AntiSymMatrix::standard(2)));
}

TEST(ThetaLinearClosed, AgreesWithLyapunovPipeline) {
    oracle::Random rng(38);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + trial % 5;
        const double gamma = rng.uniform(0.2, 5.0), mu = rng.uniform(-5, 5), nu = rng.uniform(-5, 5);
        const Matrix j = rng.antisymmetric(d);
        const Vector l = rng.vector(d);
        const double ref = sigma2(gamma, mu, nu, j, Matrix::Zero(d, d), l);
        EXPECT_NEAR(theta_linear_closed(gamma, mu, nu, l, AntiSymMatrix(j)), ref, 1e-10 * std::max(1.0, ref));
    }
}

TEST(LimitingVariance, SpecialCases) {
    oracle::Random rng(39);
    const SymMatrix s(rng.spd(3));
    const PerturbationConfig cfg0 = PerturbationConfig::matched(s, 1.5, 0, 0, AntiSymMatrix::zero(3));
    EXPECT_NEAR(limiting_variance_optimal(1.5, s, s),
                asym_variance(cfg0, QuadraticObservable{s, Vector::Zero(3), 0}), 1e-10);
    // Tr(S^{-1} K) = 0 for K = S^{1/2} K0 S^{1/2} with K0 traceless.
    Matrix k0 = Matrix::Zero(3, 3);
    k0.diagonal() << 1, -2, 1;
    const Matrix r = spd_sqrt(s).mat();
    EXPECT_NEAR(limiting_variance_optimal(1.5, s, SymMatrix::from_symmetric_product(r * k0 * r)), 0.0, 1e-12);
}

TEST(LimitingVariance, TwoDimensionalExampleUsesTracePart) {
    const double gamma = 2.0;
    const double expect = sigma2(gamma, 0, 0, Matrix::Zero(2, 2), 1.5 * Matrix::Identity(2, 2), Vector::Zero(2));
    EXPECT_NEAR(limiting_variance_optimal(gamma, SymMatrix::identity(2), SymMatrix(diag2(2, 1))), expect, 1e-12);
    EXPECT_NEAR(expect, (0.5 + 2.0) * 4.5, 1e-12);
}

TEST(InvarianceCommuting, ZeroPerturbationAndRotationCases) {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(5.0 * i);
    EXPECT_EQ(invariance_commuting_check(1.3, SymMatrix(diag2(2, 1)), Vector::Ones(2), AntiSymMatrix::zero(2), grid), 0.0);
    EXPECT_LE(invariance_commuting_check(2.0, SymMatrix::identity(2), Vector::Zero(2), AntiSymMatrix::standard(2), grid), 1e-8);

    Matrix k = Matrix::Zero(4, 4);
    k.diagonal() << 2.0, 2.0, -0.5, -0.5;
    Matrix j = oracle::standard_j(4);
    j.block(2, 2, 2, 2) *= 3.0;
    EXPECT_LE(invariance_commuting_check(0.8, SymMatrix(k), Vector::Zero(4), AntiSymMatrix(j), grid), 1e-8);
}

TEST(InvarianceCommuting, RejectsHypothesisViolations) {
    const std::vector<double> grid{0.0, 1.0};
    EXPECT_THROW(invariance_commuting_check(1.0, SymMatrix(diag2(2, 1)), Vector::Zero(2), AntiSymMatrix::standard(2), grid),
                 std::invalid_argument);
    EXPECT_THROW(invariance_commuting_check(1.0, SymMatrix::identity(2), Vector::Ones(2), AntiSymMatrix::standard(2), grid),
                 std::invalid_argument);
}

TEST(BasicInequalities, FrictionFactorNegativeAndTraceGap) {
    const double gmin = std::pow(8.0, 1.0 / 6.0);
    const BasicInequalities at_min = basic_inequalities(gmin, SymMatrix(diag2(2, 1)), AntiSymMatrix::standard(2));
    EXPECT_NEAR(at_min.gamma_factor, -5.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(at_min.trace_gap, 1.0, 1e-14);
    for (double g = 0.05; g < 20.0; g *= 1.1) {
        EXPECT_LT(basic_inequalities(g, SymMatrix(diag2(2, 1)), AntiSymMatrix::standard(2)).gamma_factor, 0.0);
    }
    EXPECT_EQ(basic_inequalities(1.0, SymMatrix::identity(2), AntiSymMatrix::standard(2)).trace_gap, 0.0);

    oracle::Random rng(40);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 2 + trial % 5;
        const BasicInequalities b = basic_inequalities(1.0, SymMatrix(rng.symmetric(d)), AntiSymMatrix(rng.antisymmetric(d)));
        EXPECT_GT(b.trace_gap, 0.0);
    }
}
