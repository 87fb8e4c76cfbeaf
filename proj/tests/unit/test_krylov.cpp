#include "fixtures.hpp"

#include "sns/errors.hpp"
#include "sns/krylov.hpp"
#include "sns/operators.hpp"
#include "sns/solver.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>

namespace sns {
namespace {

using testing::TorusFixture;

Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x[i] = g(rng);
    }
    return x;
}

double relative_error(const Eigen::VectorXd& x, const Eigen::VectorXd& ref)
{
    return (x - ref).norm() / ref.norm();
}

// Nonsymmetric momentum matrix of a small torus (P2 with frozen advection).
SparseOperator momentum_matrix(const TorusFixture& fx, Formulation formulation)
{
    SimConfig config;
    config.formulation = formulation;
    config.curvature.mode = CurvatureSource::Mode::AnalyticTorus;
    const OperatorSet ops = build_operators(fx.mesh, config);
    const VectorField3 v = 3.0 * testing::smooth_tangent_field(fx.mesh, ops.normals, 7);
    const SimulationState state = make_initial_state(ops, v);
    return formulation == Formulation::Problem2 ? build_momentum_system_p2(ops, state.field, config).matrix
                                                : build_momentum_system_p1(ops, state.field, config).matrix;
}

TEST(Krylov, IdentityReturnsRhs)
{
    SparseOperator id(50, 50);
    id.setIdentity();
    const Eigen::VectorXd b = random_vector(50, 1);
    const auto result = krylov_solve(id, b, {});
    EXPECT_LT(relative_error(result.x, b), 1e-14);
    EXPECT_LE(result.iterations, 1);
}

TEST(Krylov, DiagonalSystem)
{
    const int n = 200;
    Triplets t;
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) {
        d[i] = 1.0 + i;
        t.emplace_back(i, i, d[i]);
    }
    const SparseOperator a = from_triplets(n, n, t);
    const Eigen::VectorXd b = random_vector(n, 2);
    for (auto p : {Preconditioner::None, Preconditioner::Jacobi}) {
        const auto result = krylov_solve(a, b, {1e-12, 2000, p});
        EXPECT_LT(relative_error(result.x, b.cwiseQuotient(d)), 1e-10);
    }
}

TEST(Krylov, ZeroRhsGivesZero)
{
    const TorusFixture fx(12, 6);
    const SparseOperator a = momentum_matrix(fx, Formulation::Problem2);
    const Eigen::VectorXd x0 = random_vector(a.rows(), 3);
    const auto result = krylov_solve(a, Eigen::VectorXd::Zero(a.rows()), {}, &x0);
    EXPECT_EQ(result.x.norm(), 0.0);
    EXPECT_EQ(result.iterations, 0);
}

TEST(Krylov, MatchesDenseLuOnMomentumSystems)
{
    const TorusFixture fx(20, 10); // 200 vertices, 600 unknowns
    for (auto formulation : {Formulation::Problem1, Formulation::Problem2}) {
        const SparseOperator a = momentum_matrix(fx, formulation);
        ASSERT_GT(asymmetry(a), 0.0);
        const Eigen::VectorXd b = random_vector(a.rows(), 4);
        const Eigen::VectorXd dense = Eigen::MatrixXd(a).fullPivLu().solve(b);
        for (auto p : {Preconditioner::Jacobi, Preconditioner::BlockJacobi3}) {
            const auto result = krylov_solve(a, b, {1e-12, 2000, p});
            EXPECT_LT(relative_error(result.x, dense), 1e-8);
            EXPECT_LE(result.relative_residual, 1e-12);
        }
    }
}

TEST(Krylov, ManufacturedSolutionOnShiftedLaplacian)
{
    const TorusFixture fx(24, 12);
    const SparseOperator a = SparseOperator(assemble_stiffness(fx.mesh) + 0.1 * assemble_mass(fx.mesh));
    const Eigen::VectorXd x = random_vector(a.rows(), 5);
    const auto result = krylov_solve(a, a * x, {1e-12, 2000, Preconditioner::Jacobi});
    EXPECT_LT(relative_error(result.x, x), 1e-8);
    ASSERT_FALSE(result.history.empty());
    EXPECT_EQ(static_cast<int>(result.history.size()), result.iterations);
}

TEST(Krylov, WarmStartAtSolutionNeedsNoCycles)
{
    const TorusFixture fx(12, 6);
    const SparseOperator a = momentum_matrix(fx, Formulation::Problem2);
    const Eigen::VectorXd x = random_vector(a.rows(), 6);
    const Eigen::VectorXd b = a * x;
    const auto result = krylov_solve(a, b, {1e-10, 100, Preconditioner::Jacobi}, &x);
    EXPECT_EQ(result.iterations, 0);
}

TEST(Krylov, BudgetExhaustionThrowsWithHistory)
{
    const TorusFixture fx(24, 12);
    const SparseOperator a = assemble_stiffness(fx.mesh) + 1e-3 * assemble_mass(fx.mesh);
    const Eigen::VectorXd b = random_vector(a.rows(), 7);
    try {
        (void)krylov_solve(a, b, {1e-14, 1, Preconditioner::None});
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_NE(std::string(e.what()).find("residual history"), std::string::npos);
    }
}

TEST(Krylov, RejectsBadArguments)
{
    SparseOperator id(4, 4);
    id.setIdentity();
    EXPECT_THROW((void)krylov_solve(id, Eigen::VectorXd::Ones(3), {}), SolverError);
    EXPECT_THROW((void)krylov_solve(id, Eigen::VectorXd::Ones(4), {0.0, 10, Preconditioner::None}), SolverError);
    EXPECT_THROW((void)krylov_solve(id, Eigen::VectorXd::Ones(4), {1e-8, 0, Preconditioner::None}), SolverError);
    EXPECT_THROW((void)krylov_solve(id, Eigen::VectorXd::Ones(4), {1e-8, 10, Preconditioner::BlockJacobi3}),
                 SolverError);
}

TEST(PressurePoisson, MatchesDenseSolveOnComplement)
{
    const TorusFixture fx(20, 10);
    const SparseOperator k = assemble_stiffness(fx.mesh);
    const Eigen::VectorXd areas = fx.mesh.vertex_areas();
    const Eigen::VectorXd rhs = random_vector(k.rows(), 8);
    const auto result = pressure_poisson_solve(k, rhs, areas, {1e-12, 2000, Preconditioner::Jacobi});

    // Bordered system [K a; a^T 0] [p; l] = [rhs - mean; 0].
    const Eigen::Index n = k.rows();
    Eigen::MatrixXd bordered = Eigen::MatrixXd::Zero(n + 1, n + 1);
    bordered.topLeftCorner(n, n) = Eigen::MatrixXd(k);
    bordered.block(0, n, n, 1) = areas;
    bordered.block(n, 0, 1, n) = areas.transpose();
    Eigen::VectorXd rb = Eigen::VectorXd::Zero(n + 1);
    rb.head(n) = rhs - (rhs.sum() / areas.sum()) * areas;
    const Eigen::VectorXd ref = bordered.fullPivLu().solve(rb).head(n);

    EXPECT_LT(relative_error(result.x, ref), 1e-8);
    EXPECT_LT(std::abs(result.x.dot(areas)), 1e-12 * result.x.norm() * areas.norm());
}

TEST(PressurePoisson, ConstantShiftIsRemoved)
{
    const TorusFixture fx(16, 8);
    const SparseOperator k = assemble_stiffness(fx.mesh);
    const Eigen::VectorXd areas = fx.mesh.vertex_areas();
    Eigen::VectorXd p = random_vector(k.rows(), 9);
    p.array() -= p.dot(areas) / areas.sum();
    const auto result = pressure_poisson_solve(k, k * p + 5.0 * areas, areas, {1e-12, 2000, Preconditioner::Jacobi});
    EXPECT_LT(relative_error(result.x, p), 1e-8);
}

} // namespace
} // namespace sns
