#pragma once

#include "sns/sparse.hpp"

#include <Eigen/Core>

#include <vector>

namespace sns {

enum class Preconditioner {
    None,
    Jacobi,
    /// 3x3 point blocks for component-major vector systems (comp * V + vertex).
    BlockJacobi3,
};

struct KrylovOptions {
    double tol = 1e-10;
    int max_iter = 2000;
    Preconditioner preconditioner = Preconditioner::Jacobi;
};

struct KrylovResult {
    Eigen::VectorXd x;
    /// Completed BiCGStab(2) cycles.
    int iterations = 0;
    double relative_residual = 0.0;
    /// Relative residual after each cycle.
    std::vector<double> history;
};

/// BiCGStab(l) with l = 2, right preconditioning and a true-residual check on
/// exit. Throws SolverError on breakdown or when max_iter cycles do not reach
/// ||b - A x|| <= tol ||b||.
[[nodiscard]] KrylovResult krylov_solve(const SparseOperator& a, const Eigen::VectorXd& b,
                                        const KrylovOptions& options, const Eigen::VectorXd* x0 = nullptr);

/// Singular Neumann-type Poisson problem K p = rhs on a closed surface. The
/// rhs is made compatible by removing its weighted mean (weights = lumped
/// vertex areas) and the returned p has zero area-weighted mean.
[[nodiscard]] KrylovResult pressure_poisson_solve(const SparseOperator& k, const Eigen::VectorXd& rhs,
                                                  const Eigen::VectorXd& areas, const KrylovOptions& options,
                                                  const Eigen::VectorXd* x0 = nullptr);

} // namespace sns
