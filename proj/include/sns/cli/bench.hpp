#pragma once

#include "sns/mesh.hpp"
#include "sns/operators.hpp"

#include <vector>

namespace sns::cli {

struct BenchRow {
    int dofs = 0;
    double t_rotrot = 0.0;
    double t_graddiv = 0.0;
    double ratio = 0.0;
};

[[nodiscard]] double median(std::vector<double> values);

/// Median wall time of assemble_rotrot_block and assemble_graddiv_block over
/// `repetitions` runs each; dofs = 3 * vertices.
[[nodiscard]] BenchRow bench_assembly(const SurfaceMesh& mesh, int repetitions = 5);

/// Assembly statistics of both blocks on the same mesh.
struct TermAudit {
    AssemblyStats rotrot;
    AssemblyStats graddiv;
};

[[nodiscard]] TermAudit term_audit(const SurfaceMesh& mesh);

} // namespace sns::cli
