#pragma once

#include "sns/diagnostics.hpp"
#include "sns/fields.hpp"
#include "sns/geometry.hpp"
#include "sns/krylov.hpp"
#include "sns/mesh.hpp"
#include "sns/sparse.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace sns {

enum class Formulation {
    /// Unrotated velocity v with the rot-rot viscous block.
    Problem1,
    /// Rotated velocity w = nu x v with the grad-div viscous block.
    Problem2,
};

enum class InitialCondition {
    HarmonicMean, ///< mean of the two harmonic torus fields
    RotStream,    ///< nu x grad psi0 with psi0 = (x + y + z) / 2
    Killing,      ///< d_phi x on the torus, unit L2 norm
    FromFile,     ///< one "x y z" line per vertex
};

struct SimConfig {
    double Re = 10.0;
    double tau = 0.1;
    double alpha = 3000.0;
    double t_end = 60.0;
    Formulation formulation = Formulation::Problem2;
    double krylov_tol = 1e-8;
    int krylov_max_iter = 5000;
    int output_every = 10;
    CurvatureSource curvature;
    InitialCondition initial_condition = InitialCondition::HarmonicMean;
    std::string initial_path;
    /// Defect detection every n steps (0 disables it).
    int defects_every = 1;

    /// Throws ConfigError on an invalid combination.
    void validate() const;
    [[nodiscard]] int num_steps() const;
};

/// Mesh-dependent operators shared by every step of a run.
struct OperatorSet {
    const SurfaceMesh* mesh = nullptr;
    std::vector<Vec3> normals;
    ScalarField kappa;
    SparseOperator mass;
    SparseOperator stiffness;
    Eigen::VectorXd lumped;
    /// (1/tau) M3 + (1/Re)(viscous - curvature) + penalty, component-major.
    SparseOperator implicit_part;
    /// M3 as a component-major monolithic operator.
    SparseOperator mass3;
    double tau = 0.0;
    Formulation formulation = Formulation::Problem2;
};

/// Analytic normals when the curvature source carries a level set (torus or
/// n-torus), angle-weighted discrete normals otherwise.
[[nodiscard]] std::vector<Vec3> normals_for(const SurfaceMesh& mesh, const CurvatureSource& source);

[[nodiscard]] OperatorSet build_operators(const SurfaceMesh& mesh, const SimConfig& config);

/// The two harmonic fields of the y-axis torus:
///   v_phi   = (-z, 0, x) / (4 rho^2)
///   v_theta = (-x y / rho, rho - R, -y z / rho) / (2 rho),  rho^2 = x^2 + z^2.
[[nodiscard]] std::pair<VectorField3, VectorField3> harmonic_fields_torus(const SurfaceMesh& mesh, double R,
                                                                         double r);

/// d_phi x = (-z, 0, x) scaled to unit L2 norm.
[[nodiscard]] VectorField3 killing_field_torus(const SurfaceMesh& mesh, const SparseOperator& mass);

/// Per-face n_f x grad psi0 averaged to vertices with face-area weights.
[[nodiscard]] VectorField3 rot_stream_field(const SurfaceMesh& mesh);

/// Plain-text field file, one "x y z" line per vertex ('#' starts a comment).
[[nodiscard]] VectorField3 load_field(const std::string& path, int expected_vertices);
void save_field(const VectorField3& field, const std::string& path);

/// Initial velocity v0 (always unrotated).
[[nodiscard]] VectorField3 initial_condition(const SurfaceMesh& mesh, const SimConfig& config,
                                             const SparseOperator& mass);

struct SimulationState {
    int step = 0;
    double t = 0.0;
    /// w for Problem2, v for Problem1.
    VectorField3 field;
    ScalarField pressure;
    /// Warm start for the post-projection divergence solve.
    Eigen::VectorXd div_potential;
};

[[nodiscard]] SimulationState make_initial_state(const OperatorSet& ops, const VectorField3& velocity);

/// Unrotated velocity of a state (v = -nu x w for Problem2).
[[nodiscard]] VectorField3 velocity_of(const OperatorSet& ops, const SimulationState& state);

struct MomentumSystem {
    SparseOperator matrix;
    Eigen::VectorXd rhs;
};

/// A = (1/tau) M3 - Adv(w^n) + (1/Re)(GradDiv - Curv) + Pen, rhs = (1/tau) M3 w^n.
[[nodiscard]] MomentumSystem build_momentum_system_p2(const OperatorSet& ops, const VectorField3& w,
                                                      const SimConfig& config);
/// A = (1/tau) M3 + Adv(v^n) + (1/Re)(RotRot - Curv) + Pen, rhs = (1/tau) M3 v^n.
[[nodiscard]] MomentumSystem build_momentum_system_p1(const OperatorSet& ops, const VectorField3& v,
                                                      const SimConfig& config);

struct StepReport {
    int momentum_iterations = 0;
    int pressure_iterations = 0;
    /// Weak-divergence dual norm of the tentative and the corrected field.
    double div_pre = 0.0;
    double div_post = 0.0;
    /// L2 norm of the tentative field.
    double tentative_norm = 0.0;
};

/// One Chorin projection step: momentum solve, pressure solve, correction.
[[nodiscard]] SimulationState chorin_step(const SimulationState& state, const OperatorSet& ops,
                                          const SimConfig& config, StepReport* report = nullptr);

struct RunResult {
    std::vector<DiagnosticsRecord> records;
    std::vector<StepReport> steps;
    /// Divergence norms of the initial field before and after one projection.
    double initial_div_pre = 0.0;
    double initial_div_post = 0.0;
    /// initial_div_post / initial_div_pre: the share of divergence the
    /// discrete correction leaves behind (0 for a zero initial field).
    double initial_consistency = 0.0;
    SimulationState final_state;
};

/// Called with each state at t = 0 and after every step.
using StepObserver = std::function<void(const SimulationState&, const VectorField3& velocity,
                                        const DiagnosticsRecord&)>;

[[nodiscard]] RunResult run_simulation(const SurfaceMesh& mesh, const SimConfig& config,
                                       const StepObserver& observer = {});

/// Same as above with an explicit initial velocity.
[[nodiscard]] RunResult run_simulation(const SurfaceMesh& mesh, const SimConfig& config, const VectorField3& v0,
                                       const StepObserver& observer = {});

/// Post-projection divergence against the pre-projection value and against
/// 10 (tol ||w*|| + c0 pre), c0 = initial_consistency.
struct ProjectionAudit {
    bool never_increases = true;
    bool within_bound = true;
    /// max over steps of post / bound.
    double worst_bound_ratio = 0.0;
    /// max over steps of post / pre.
    double worst_reduction = 0.0;
};

[[nodiscard]] ProjectionAudit audit_projection(const RunResult& result, double krylov_tol);

} // namespace sns
