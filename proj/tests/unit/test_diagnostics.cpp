#include "fixtures.hpp"

#include "sns/diagnostics.hpp"
#include "sns/errors.hpp"
#include "sns/levelset.hpp"
#include "sns/operators.hpp"
#include "sns/solver.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sns {
namespace {

using testing::TorusFixture;

struct Inventory {
    int plus = 0;
    int minus = 0;
    int other = 0;
};

Inventory inventory(const DefectReport& report)
{
    Inventory inv;
    for (const auto& d : report.defects) {
        if (d.index == 1) {
            ++inv.plus;
        } else if (d.index == -1) {
            ++inv.minus;
        } else {
            ++inv.other;
        }
    }
    return inv;
}

LevelSetNTorus ntorus(int n)
{
    LevelSetNTorus ls;
    ls.major_radius = 1.0;
    ls.minor_radius = 0.5;
    ls.axis = Axis::Z;
    if (n == 1) {
        ls.midpoints = {Vec3::Zero()};
    } else if (n == 2) {
        ls.midpoints = {Vec3(-1.2, 0, 0), Vec3(1.2, 0, 0)};
        ls.delta = 1.0;
    } else {
        ls.midpoints = {Vec3(-1.2, -0.75, 0), Vec3(1.2, -0.75, 0), Vec3(0, 1.33, 0)};
        ls.delta = 10.0;
    }
    return ls;
}

TEST(Energy, ZeroField)
{
    const TorusFixture fx(16, 8);
    EXPECT_EQ(kinetic_energy(VectorField3(fx.mesh.num_vertices()), assemble_mass(fx.mesh)), 0.0);
}

TEST(Energy, ConstantUnitVectorGivesHalfArea)
{
    const TorusFixture fx(32, 12);
    VectorField3 e(fx.mesh.num_vertices());
    e.x.setOnes();
    EXPECT_NEAR(kinetic_energy(e, assemble_mass(fx.mesh)), 0.5 * fx.mesh.total_area(), 1e-12);
}

TEST(Energy, PositiveForNonzeroField)
{
    const TorusFixture fx(16, 8);
    const auto v = testing::random_field(fx.mesh.num_vertices(), 3);
    EXPECT_GT(kinetic_energy(v, assemble_mass(fx.mesh)), 0.0);
}

TEST(H1Rescaled, ConstantFieldVanishes)
{
    const TorusFixture fx(16, 8);
    VectorField3 c(fx.mesh.num_vertices());
    c.y.setConstant(2.5);
    c.z.setConstant(-1.0);
    EXPECT_LT(h1_seminorm_rescaled(c, assemble_mass(fx.mesh), assemble_stiffness(fx.mesh)), 1e-7);
}

TEST(H1Rescaled, ScaleInvariant)
{
    const TorusFixture fx(24, 8);
    const auto m = assemble_mass(fx.mesh);
    const auto k = assemble_stiffness(fx.mesh);
    const auto v = testing::smooth_tangent_field(fx.mesh, fx.normals, 4);
    const double h = h1_seminorm_rescaled(v, m, k);
    EXPECT_GT(h, 0.0);
    EXPECT_NEAR(h1_seminorm_rescaled(2.0 * v, m, k), h, 1e-14 * h);
    EXPECT_NEAR(h1_seminorm_rescaled(1e-6 * v, m, k), h, 1e-12 * h);
}

TEST(H1Rescaled, ZeroFieldThrows)
{
    const TorusFixture fx(12, 6);
    EXPECT_THROW((void)h1_seminorm_rescaled(VectorField3(fx.mesh.num_vertices()), assemble_mass(fx.mesh),
                                            assemble_stiffness(fx.mesh)),
                 ParameterError);
}

TEST(NormalNorm, TangentialFieldVanishes)
{
    const TorusFixture fx(32, 12);
    EXPECT_LT(normal_norm(testing::killing_field(fx.mesh), fx.normals, fx.mesh.vertex_areas()), 1e-12);
}

TEST(NormalNorm, NormalFieldGivesRootArea)
{
    const TorusFixture fx(32, 12);
    const auto nu = VectorField3::from_vectors(fx.normals);
    EXPECT_NEAR(normal_norm(nu, fx.normals, fx.mesh.vertex_areas()), std::sqrt(fx.mesh.total_area()), 1e-12);
}

TEST(DivergenceDualNorm, MatchesEnergyOfPoissonSolution)
{
    const TorusFixture fx(24, 8);
    const auto k = assemble_stiffness(fx.mesh);
    const Eigen::VectorXd areas = fx.mesh.vertex_areas();
    // l = K q has dual norm sqrt(q^T K q).
    Eigen::VectorXd q(fx.mesh.num_vertices());
    for (int v = 0; v < fx.mesh.num_vertices(); ++v) {
        q[v] = std::sin(fx.mesh.position(v).x()) + fx.mesh.position(v).y();
    }
    const double expected = std::sqrt(q.dot(k * q));
    Eigen::VectorXd warm;
    const double got = divergence_dual_norm(k, k * q, areas, {1e-12, 2000, Preconditioner::Jacobi}, &warm);
    EXPECT_NEAR(got, expected, 1e-8 * expected);
    EXPECT_EQ(warm.size(), q.size());
}

TEST(Defects, KillingFieldHasNone)
{
    const TorusFixture fx(48, 16);
    const auto report = detect_defects(fx.mesh, fx.normals, testing::killing_field(fx.mesh));
    EXPECT_TRUE(report.defects.empty());
    EXPECT_EQ(report.index_sum, 0);
}

TEST(Defects, IndexSumIsEulerCharacteristicForArbitraryFields)
{
    const auto sphere = generate_icosphere(1.0, 3);
    const auto torus = generate_torus(2.0, 0.5, 24, 10);
    for (const SurfaceMesh* mesh : {&sphere, &torus}) {
        const auto normals = vertex_normals(*mesh);
        for (unsigned seed = 1; seed <= 3; ++seed) {
            const auto v = testing::random_field(mesh->num_vertices(), seed);
            const auto report = detect_defects(*mesh, normals, v);
            EXPECT_EQ(report.index_sum, mesh->euler_characteristic());
            int listed = 0;
            for (const auto& d : report.defects) {
                EXPECT_NE(d.index, 0);
                listed += d.index;
            }
            EXPECT_EQ(listed, report.index_sum);
        }
    }
}

TEST(Defects, SphereRotationHasTwoVortices)
{
    const auto mesh = generate_icosphere(1.0, 3);
    const auto normals = vertex_normals(mesh);
    VectorField3 v(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        const Vec3& p = mesh.position(i);
        v.set(i, Vec3(0.3, 0.2, 1.0).normalized().cross(p));
    }
    const auto report = detect_defects(mesh, normals, v);
    const auto inv = inventory(report);
    EXPECT_EQ(inv.plus, 2);
    EXPECT_EQ(inv.minus, 0);
    EXPECT_EQ(report.index_sum, 2);
    // Located near the rotation poles.
    for (const auto& d : report.defects) {
        EXPECT_GT(std::abs(d.position.normalized().dot(Vec3(0.3, 0.2, 1.0).normalized())), 0.95);
    }
}

TEST(Defects, RotStreamInventoriesOnNTori)
{
    struct Case {
        int genus;
        int resolution;
        int plus;
        int minus;
    };
    for (const Case c : {Case{1, 48, 2, 2}, Case{2, 64, 2, 4}, Case{3, 80, 3, 7}}) {
        const auto ls = ntorus(c.genus);
        const auto mesh = extract_levelset_mesh(ls, c.resolution);
        const auto normals = vertex_normals(mesh, ls);
        const auto report = detect_defects(mesh, normals, rot_stream_field(mesh));
        const auto inv = inventory(report);
        EXPECT_EQ(report.index_sum, 2 - 2 * c.genus) << "genus " << c.genus;
        EXPECT_EQ(inv.plus, c.plus) << "genus " << c.genus;
        EXPECT_EQ(inv.minus, c.minus) << "genus " << c.genus;
        EXPECT_EQ(inv.other, 0) << "genus " << c.genus;
    }
}

TEST(Defects, ZeroFieldThrows)
{
    const TorusFixture fx(12, 6);
    EXPECT_THROW((void)detect_defects(fx.mesh, fx.normals, VectorField3(fx.mesh.num_vertices())), ParameterError);
}

TEST(Defects, SizeMismatchThrows)
{
    const TorusFixture fx(12, 6);
    EXPECT_THROW((void)detect_defects(fx.mesh, fx.normals, VectorField3(5)), Error);
}

TEST(SpacetimeNorm, ConstantSeries)
{
    const std::vector<double> t{0.0, 0.5, 1.5, 3.0};
    const std::vector<double> c(4, 2.0);
    EXPECT_NEAR(spacetime_norm(c, t, 2.0), 2.0 * std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(spacetime_norm(c, t, 1.0), 6.0, 1e-14);
}

TEST(SpacetimeNorm, ZeroSeries)
{
    EXPECT_EQ(spacetime_norm({0.0, 0.0, 0.0}, {0.0, 1.0, 2.0}), 0.0);
}

TEST(SpacetimeNorm, LinearRampConvergesToClosedForm)
{
    // integral_0^1 t^2 dt = 1/3; trapezoid error is 1/(6 n^2).
    for (int n : {10, 100, 1000}) {
        std::vector<double> t(n + 1);
        for (int k = 0; k <= n; ++k) {
            t[k] = static_cast<double>(k) / n;
        }
        const double got = spacetime_norm(t, t, 2.0);
        EXPECT_NEAR(got * got, 1.0 / 3.0 + 1.0 / (6.0 * n * n), 1e-12);
    }
    std::vector<double> t(1001);
    for (int k = 0; k <= 1000; ++k) {
        t[k] = k / 1000.0;
    }
    EXPECT_NEAR(spacetime_norm(t, t), 1.0 / std::sqrt(3.0), 1e-6);
}

TEST(SpacetimeNorm, RejectsBadInput)
{
    EXPECT_THROW((void)spacetime_norm({1.0, 2.0}, {0.0}), ParameterError);
    EXPECT_THROW((void)spacetime_norm({1.0}, {0.0}), ParameterError);
    EXPECT_THROW((void)spacetime_norm({1.0, 2.0}, {1.0, 1.0}), ParameterError);
}

TEST(FullDivergence, TangentialFieldEqualsDivH)
{
    const TorusFixture fx(32, 12);
    const auto v = testing::killing_field(fx.mesh);
    const auto h = mean_curvature(fx.mesh);
    const ScalarField full = full_surface_divergence(fx.mesh, fx.normals, v, h);
    EXPECT_LT((full - div_h(fx.mesh, v)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FullDivergence, NormalFieldOnUnitSphere)
{
    const auto mesh = generate_icosphere(1.0, 4);
    const auto normals = vertex_normals(mesh);
    const auto h = mean_curvature(mesh);
    const ScalarField full = full_surface_divergence(mesh, normals, VectorField3::from_vectors(normals), h);
    const double mean = full.dot(mesh.vertex_areas()) / mesh.total_area();
    EXPECT_NEAR(mean, -2.0, 0.02);
}

TEST(FullDivergence, ZeroField)
{
    const TorusFixture fx(12, 6);
    const auto h = mean_curvature(fx.mesh);
    EXPECT_EQ(full_surface_divergence(fx.mesh, fx.normals, VectorField3(fx.mesh.num_vertices()), h).norm(), 0.0);
}

} // namespace
} // namespace sns
