#pragma once

#include "sns/fields.hpp"
#include "sns/mesh.hpp"
#include "sns/solver.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sns::cli {

/// Throws ConfigError unless there are at least three distinct positive values.
void validate_alphas(const std::vector<double>& alphas);

struct SweepRun {
    double alpha = 0.0;
    /// Velocity samples at the output cadence (t = 0 included).
    std::vector<double> sample_times;
    std::vector<VectorField3> samples;
    /// Normal component of the penalised unknown after every step.
    std::vector<double> step_times;
    std::vector<double> normal_norms;
};

[[nodiscard]] SweepRun run_alpha(const SurfaceMesh& mesh, SimConfig config, double alpha);

struct SweepPoint {
    double alpha = 0.0;
    /// L2-in-time of the L2 distance to the reference trajectory.
    double error = 0.0;
    /// L2-in-time of the normal-component norm.
    double normal_norm_accum = 0.0;
};

/// Self-errors against the run with the largest alpha (whose error is 0).
/// Rows are sorted by alpha.
[[nodiscard]] std::vector<SweepPoint> sweep_errors(const std::vector<SweepRun>& runs, const SparseOperator& mass);

/// Least-squares slope of log(y) against log(x).
[[nodiscard]] double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Slope over every row except the reference.
[[nodiscard]] double sweep_slope(const std::vector<SweepPoint>& points);

using SweepProgress = std::function<void(const SweepRun&)>;

/// Runs every alpha, up to `threads` at a time.
[[nodiscard]] std::vector<SweepPoint> alpha_sweep(const SurfaceMesh& mesh, const SimConfig& config,
                                                  const std::vector<double>& alphas, int threads = 1,
                                                  const SweepProgress& progress = {});

/// SNS_THREADS if set to a positive integer, else 1.
[[nodiscard]] int threads_from_environment();

} // namespace sns::cli
