#pragma once

#include "sns/fields.hpp"
#include "sns/krylov.hpp"
#include "sns/mesh.hpp"
#include "sns/sparse.hpp"

#include <vector>

namespace sns {

struct Defect {
    int vertex = -1;
    Vec3 position = Vec3::Zero();
    int index = 0;
};

struct DefectReport {
    std::vector<Defect> defects;
    /// Sum of all per-face indices; equals the Euler characteristic.
    int index_sum = 0;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double energy = 0.0;
    double h1 = 0.0;
    /// Normal component of the penalised unknown (w or v).
    double normal_norm = 0.0;
    double div_norm = 0.0;
    /// False when defect detection was skipped (zero field or cadence).
    bool defects_analyzed = false;
    std::vector<Defect> defects;
    int index_sum = 0;
};

/// 1/2 sum over components of v_c^T M v_c.
[[nodiscard]] double kinetic_energy(const VectorField3& v, const SparseOperator& mass);

/// sqrt(sum over components of v_c^T M v_c).
[[nodiscard]] double l2_norm(const VectorField3& v, const SparseOperator& mass);

/// H1 seminorm of v / ||v||_L2. Throws ParameterError for a zero field.
[[nodiscard]] double h1_seminorm_rescaled(const VectorField3& v, const SparseOperator& mass,
                                          const SparseOperator& stiffness);

/// Lumped-mass L2 norm of the vertex scalar v . nu.
[[nodiscard]] double normal_norm(const VectorField3& v, const std::vector<Vec3>& normals,
                                 const Eigen::VectorXd& areas);

/// sqrt(l^T K^+ l) for a weak divergence load l (the dual norm in which the
/// projection step is non-expansive).
[[nodiscard]] double divergence_dual_norm(const SparseOperator& stiffness, const Eigen::VectorXd& load,
                                          const Eigen::VectorXd& areas, const KrylovOptions& options,
                                          Eigen::VectorXd* warm_start = nullptr);

/// Discrete Poincare-Hopf index of the tangential part of v. Per-face indices
/// come from angle jumps between flattened vertex frames plus the face
/// holonomy, so they sum to the Euler characteristic exactly. Defect faces
/// sharing a vertex are merged; clusters with zero net index are dropped.
/// Vectors shorter than zero_threshold are treated as zero (angle 0); a
/// negative threshold selects 1e-3 times the mean vector length.
[[nodiscard]] DefectReport detect_defects(const SurfaceMesh& mesh, const std::vector<Vec3>& normals,
                                          const VectorField3& v, double zero_threshold = -1.0);

/// (integral |f|^p dt)^(1/p) by the trapezoidal rule.
[[nodiscard]] double spacetime_norm(const std::vector<double>& values, const std::vector<double>& times,
                                    double p = 2.0);

/// div_h v - H (v . nu).
[[nodiscard]] ScalarField full_surface_divergence(const SurfaceMesh& mesh, const std::vector<Vec3>& normals,
                                                  const VectorField3& v, const ScalarField& mean_curvature);

} // namespace sns
