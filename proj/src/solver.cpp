#include "sns/solver.hpp"

#include "sns/errors.hpp"
#include "sns/generators.hpp"
#include "sns/operators.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace sns {

namespace {

KrylovOptions momentum_options(const SimConfig& config)
{
    return {config.krylov_tol, config.krylov_max_iter, Preconditioner::BlockJacobi3};
}

KrylovOptions pressure_options(const SimConfig& config)
{
    return {config.krylov_tol, config.krylov_max_iter, Preconditioner::Jacobi};
}

ScalarField pressure_load(const OperatorSet& ops, const VectorField3& field)
{
    return ops.formulation == Formulation::Problem2 ? assemble_pressure_rhs_p2(*ops.mesh, field)
                                                    : assemble_pressure_rhs_p1(*ops.mesh, field);
}

struct Projection {
    VectorField3 corrected;
    ScalarField pressure;
    double pre = 0.0;
    double post = 0.0;
    int iterations = 0;
};

Projection project(const OperatorSet& ops, const VectorField3& tentative, const SimConfig& config,
                   const ScalarField* pressure_guess, Eigen::VectorXd* div_potential)
{
    const auto options = pressure_options(config);
    const ScalarField load = pressure_load(ops, tentative);
    const auto solve = pressure_poisson_solve(ops.stiffness, load / ops.tau, ops.lumped, options, pressure_guess);

    Projection out;
    out.pressure = solve.x;
    out.iterations = solve.iterations;
    const ScalarField compatible = load - (load.sum() / ops.lumped.sum()) * ops.lumped;
    out.pre = std::sqrt(std::max(0.0, ops.tau * compatible.dot(solve.x)));
    const VectorField3 correction = ops.formulation == Formulation::Problem2
                                        ? vertex_rotated_gradient(*ops.mesh, solve.x)
                                        : vertex_gradient(*ops.mesh, solve.x);
    out.corrected = tentative - ops.tau * correction;
    out.post = divergence_dual_norm(ops.stiffness, pressure_load(ops, out.corrected), ops.lumped, options,
                                    div_potential);
    return out;
}

Eigen::VectorXd initial_guess(const Eigen::VectorXd* p, Eigen::Index n)
{
    return p != nullptr && p->size() == n ? *p : Eigen::VectorXd::Zero(n);
}

} // namespace

void SimConfig::validate() const
{
    if (!(Re > 0.0)) {
        throw ConfigError("Re must be positive");
    }
    if (!(tau > 0.0)) {
        throw ConfigError("tau must be positive");
    }
    if (!(alpha >= 0.0)) {
        throw ConfigError("alpha must be non-negative");
    }
    if (!(t_end >= 0.0)) {
        throw ConfigError("t_end must be non-negative");
    }
    if (!(krylov_tol > 0.0 && krylov_tol < 1.0)) {
        throw ConfigError("krylov_tol must lie in (0, 1)");
    }
    if (krylov_max_iter < 1) {
        throw ConfigError("krylov_max_iter must be positive");
    }
    if (output_every < 1) {
        throw ConfigError("output_every must be positive");
    }
    if (defects_every < 0) {
        throw ConfigError("defects_every must be non-negative");
    }
    if (initial_condition == InitialCondition::FromFile && initial_path.empty()) {
        throw ConfigError("initial condition 'file' needs a field path");
    }
}

int SimConfig::num_steps() const
{
    return static_cast<int>(std::llround(t_end / tau));
}

std::vector<Vec3> normals_for(const SurfaceMesh& mesh, const CurvatureSource& source)
{
    switch (source.mode) {
    case CurvatureSource::Mode::AnalyticTorus:
        return vertex_normals(mesh, torus_levelset(source.major_radius, source.minor_radius, source.axis));
    case CurvatureSource::Mode::AnalyticLevelSet:
        return vertex_normals(mesh, source.levelset);
    case CurvatureSource::Mode::DiscreteAngleDefect:
        break;
    }
    return vertex_normals(mesh);
}

OperatorSet build_operators(const SurfaceMesh& mesh, const SimConfig& config)
{
    config.validate();
    OperatorSet ops;
    ops.mesh = &mesh;
    ops.tau = config.tau;
    ops.formulation = config.formulation;
    ops.normals = normals_for(mesh, config.curvature);
    ops.kappa = gaussian_curvature(mesh, config.curvature);
    ops.mass = assemble_mass(mesh);
    ops.stiffness = assemble_stiffness(mesh);
    ops.lumped = mesh.vertex_areas();

    const BlockOperator3 mass3 = BlockOperator3::diagonal(ops.mass);
    ops.mass3 = mass3.monolithic();
    BlockOperator3 viscous = config.formulation == Formulation::Problem2
                                 ? assemble_graddiv_block(mesh)
                                 : assemble_rotrot_block(mesh, ops.normals);
    BlockOperator3 curvature = assemble_curvature_term(mesh, ops.kappa);
    curvature *= -1.0;
    viscous += curvature;
    viscous *= 1.0 / config.Re;
    BlockOperator3 implicit = mass3;
    implicit *= 1.0 / config.tau;
    implicit += viscous;
    implicit += assemble_penalty(mesh, ops.normals, config.alpha);
    ops.implicit_part = implicit.monolithic();
    return ops;
}

std::pair<VectorField3, VectorField3> harmonic_fields_torus(const SurfaceMesh& mesh, double R, double r)
{
    if (!(R > r && r > 0.0)) {
        throw ParameterError("torus radii must satisfy R > r > 0");
    }
    VectorField3 v_phi(mesh.num_vertices());
    VectorField3 v_theta(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Vec3& p = mesh.position(v);
        const double rho2 = p.x() * p.x() + p.z() * p.z();
        if (!(rho2 > 0.0)) {
            throw GeometryError("vertex " + std::to_string(v) + " lies on the torus axis");
        }
        const double rho = std::sqrt(rho2);
        v_phi.set(v, Vec3(-p.z(), 0.0, p.x()) / (4.0 * rho2));
        v_theta.set(v, Vec3(-p.x() * p.y() / rho, rho - R, -p.y() * p.z() / rho) / (2.0 * rho));
    }
    return {v_phi, v_theta};
}

VectorField3 killing_field_torus(const SurfaceMesh& mesh, const SparseOperator& mass)
{
    VectorField3 f(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Vec3& p = mesh.position(v);
        f.set(v, Vec3(-p.z(), 0.0, p.x()));
    }
    return (1.0 / l2_norm(f, mass)) * f;
}

VectorField3 rot_stream_field(const SurfaceMesh& mesh)
{
    ScalarField psi(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Vec3& p = mesh.position(v);
        psi[v] = 0.5 * (p.x() + p.y() + p.z());
    }
    return vertex_rotated_gradient(mesh, psi);
}

VectorField3 load_field(const std::string& path, int expected_vertices)
{
    std::ifstream in(path);
    if (!in) {
        throw LoadError("cannot open field file " + path);
    }
    std::vector<Vec3> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::istringstream row(line);
        Vec3 v;
        std::string extra;
        if (!(row >> v.x() >> v.y() >> v.z()) || (row >> extra)) {
            throw LoadError(path + ": malformed vector on line " + std::to_string(line_no));
        }
        values.push_back(v);
    }
    if (static_cast<int>(values.size()) != expected_vertices) {
        throw LoadError(path + ": field has " + std::to_string(values.size()) + " vectors, mesh has " +
                        std::to_string(expected_vertices) + " vertices");
    }
    return VectorField3::from_vectors(values);
}

void save_field(const VectorField3& field, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write field file " + path);
    }
    out.precision(std::numeric_limits<double>::max_digits10);
    for (int v = 0; v < field.size(); ++v) {
        out << field.x[v] << ' ' << field.y[v] << ' ' << field.z[v] << '\n';
    }
}

VectorField3 initial_condition(const SurfaceMesh& mesh, const SimConfig& config, const SparseOperator& mass)
{
    const auto& c = config.curvature;
    switch (config.initial_condition) {
    case InitialCondition::HarmonicMean: {
        if (c.axis != Axis::Y) {
            throw ConfigError("the harmonic-mean initial condition is defined for the y-axis torus");
        }
        if (mesh.genus() != 1) {
            throw ConfigError("the harmonic-mean initial condition needs a genus-1 torus, mesh has genus " +
                              std::to_string(mesh.genus()));
        }
        auto [v_phi, v_theta] = harmonic_fields_torus(mesh, c.major_radius, c.minor_radius);
        return 0.5 * (v_phi + v_theta);
    }
    case InitialCondition::Killing:
        if (c.axis != Axis::Y) {
            throw ConfigError("the Killing initial condition is defined for the y-axis torus");
        }
        if (mesh.genus() != 1) {
            throw ConfigError("the Killing initial condition needs a genus-1 torus");
        }
        return killing_field_torus(mesh, mass);
    case InitialCondition::RotStream:
        return rot_stream_field(mesh);
    case InitialCondition::FromFile:
        return load_field(config.initial_path, mesh.num_vertices());
    }
    throw ConfigError("unknown initial condition");
}

SimulationState make_initial_state(const OperatorSet& ops, const VectorField3& velocity)
{
    require_size(*ops.mesh, velocity, "initial velocity");
    SimulationState state;
    state.field = ops.formulation == Formulation::Problem2 ? cross(ops.normals, velocity) : velocity;
    state.pressure = ScalarField::Zero(ops.mesh->num_vertices());
    state.div_potential = ScalarField::Zero(ops.mesh->num_vertices());
    return state;
}

VectorField3 velocity_of(const OperatorSet& ops, const SimulationState& state)
{
    if (ops.formulation == Formulation::Problem1) {
        return state.field;
    }
    return -1.0 * cross(ops.normals, state.field);
}

MomentumSystem build_momentum_system_p2(const OperatorSet& ops, const VectorField3& w, const SimConfig& config)
{
    if (ops.formulation != Formulation::Problem2) {
        throw ConfigError("operator set was built for the unrotated formulation");
    }
    const SparseOperator adv = assemble_advection_p2(*ops.mesh, ops.normals, w).monolithic();
    MomentumSystem sys;
    sys.matrix = ops.implicit_part - adv;
    sys.rhs = (ops.mass3 * w.flat()) / config.tau;
    return sys;
}

MomentumSystem build_momentum_system_p1(const OperatorSet& ops, const VectorField3& v, const SimConfig& config)
{
    if (ops.formulation != Formulation::Problem1) {
        throw ConfigError("operator set was built for the rotated formulation");
    }
    const SparseOperator adv = assemble_advection_p1(*ops.mesh, ops.normals, v).monolithic();
    MomentumSystem sys;
    sys.matrix = ops.implicit_part + adv;
    sys.rhs = (ops.mass3 * v.flat()) / config.tau;
    return sys;
}

SimulationState chorin_step(const SimulationState& state, const OperatorSet& ops, const SimConfig& config,
                            StepReport* report)
{
    const MomentumSystem sys = ops.formulation == Formulation::Problem2
                                   ? build_momentum_system_p2(ops, state.field, config)
                                   : build_momentum_system_p1(ops, state.field, config);
    const Eigen::VectorXd guess = state.field.flat();
    const auto momentum = krylov_solve(sys.matrix, sys.rhs, momentum_options(config), &guess);
    const VectorField3 tentative = VectorField3::from_flat(momentum.x);

    SimulationState next;
    next.div_potential = initial_guess(&state.div_potential, ops.mesh->num_vertices());
    const Projection proj = project(ops, tentative, config, &state.pressure, &next.div_potential);
    next.step = state.step + 1;
    next.t = next.step * config.tau;
    next.field = proj.corrected;
    next.pressure = proj.pressure;
    if (report != nullptr) {
        report->momentum_iterations = momentum.iterations;
        report->pressure_iterations = proj.iterations;
        report->div_pre = proj.pre;
        report->div_post = proj.post;
        report->tentative_norm = l2_norm(tentative, ops.mass);
    }
    return next;
}

RunResult run_simulation(const SurfaceMesh& mesh, const SimConfig& config, const StepObserver& observer)
{
    config.validate();
    return run_simulation(mesh, config, initial_condition(mesh, config, assemble_mass(mesh)), observer);
}

RunResult run_simulation(const SurfaceMesh& mesh, const SimConfig& config, const VectorField3& v0,
                         const StepObserver& observer)
{
    const OperatorSet ops = build_operators(mesh, config);
    RunResult result;
    SimulationState state = make_initial_state(ops, v0);

    const double initial_norm = l2_norm(state.field, ops.mass);
    Eigen::VectorXd scratch = Eigen::VectorXd::Zero(mesh.num_vertices());
    if (initial_norm > 0.0) {
        const Projection p0 = project(ops, state.field, config, nullptr, &scratch);
        result.initial_div_pre = p0.pre;
        result.initial_div_post = p0.post;
        result.initial_consistency = p0.pre > 0.0 ? p0.post / p0.pre : 0.0;
    }

    auto record = [&](const SimulationState& s, double div_norm) {
        const VectorField3 v = velocity_of(ops, s);
        DiagnosticsRecord rec;
        rec.t = s.t;
        rec.energy = kinetic_energy(v, ops.mass);
        // The penalised unknown carries the normal component; v = -nu x w drops it.
        rec.normal_norm = normal_norm(s.field, ops.normals, ops.lumped);
        rec.div_norm = div_norm;
        const bool nonzero = rec.energy > 0.0;
        rec.h1 = nonzero ? h1_seminorm_rescaled(v, ops.mass, ops.stiffness) : 0.0;
        if (nonzero && config.defects_every > 0 && s.step % config.defects_every == 0) {
            auto report = detect_defects(mesh, ops.normals, v);
            rec.defects_analyzed = true;
            rec.defects = std::move(report.defects);
            rec.index_sum = report.index_sum;
        }
        if (observer) {
            observer(s, v, rec);
        }
        result.records.push_back(std::move(rec));
    };

    const double div0 = divergence_dual_norm(ops.stiffness, pressure_load(ops, state.field), ops.lumped,
                                             pressure_options(config), &scratch);
    record(state, div0);
    const int steps = config.num_steps();
    for (int n = 0; n < steps; ++n) {
        StepReport report;
        state = chorin_step(state, ops, config, &report);
        result.steps.push_back(report);
        record(state, report.div_post);
    }
    result.final_state = std::move(state);
    return result;
}

ProjectionAudit audit_projection(const RunResult& result, double krylov_tol)
{
    ProjectionAudit audit;
    for (const auto& s : result.steps) {
        if (s.div_post > s.div_pre) {
            audit.never_increases = false;
        }
        if (s.div_pre > 0.0) {
            audit.worst_reduction = std::max(audit.worst_reduction, s.div_post / s.div_pre);
        }
        const double bound = 10.0 * (krylov_tol * s.tentative_norm + result.initial_consistency * s.div_pre);
        if (s.div_post > bound) {
            audit.within_bound = false;
        }
        if (bound > 0.0) {
            audit.worst_bound_ratio = std::max(audit.worst_bound_ratio, s.div_post / bound);
        }
    }
    return audit;
}

} // namespace sns
