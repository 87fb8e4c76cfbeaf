#pragma once

#include "sns/fields.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <vector>

namespace sns {

/// Row-compressed sparse matrix over vertex degrees of freedom.
using SparseOperator = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplets = std::vector<Eigen::Triplet<double>>;

[[nodiscard]] SparseOperator from_triplets(int rows, int cols, const Triplets& triplets);

/// Max-norm asymmetry |A - A^T|_max.
[[nodiscard]] double asymmetry(const SparseOperator& a);

/// 3x3 grid of V x V blocks acting on VectorField3. Block (i, j) maps the
/// j-th component of the trial field to the i-th component of the result.
class BlockOperator3 {
public:
    BlockOperator3() = default;
    explicit BlockOperator3(int n);

    [[nodiscard]] int dim() const { return n_; }
    [[nodiscard]] SparseOperator& block(int i, int j) { return blocks_[3 * i + j]; }
    [[nodiscard]] const SparseOperator& block(int i, int j) const { return blocks_[3 * i + j]; }

    [[nodiscard]] VectorField3 apply(const VectorField3& u) const;
    /// test^T A trial.
    [[nodiscard]] double form(const VectorField3& test, const VectorField3& trial) const;
    /// 3V x 3V matrix with unknowns ordered component-major (comp * V + vertex).
    [[nodiscard]] SparseOperator monolithic() const;
    [[nodiscard]] long nonzeros() const;

    BlockOperator3& operator+=(const BlockOperator3& o);
    BlockOperator3& operator*=(double s);

    /// Same scalar operator on the three diagonal blocks.
    [[nodiscard]] static BlockOperator3 diagonal(const SparseOperator& a);

private:
    int n_ = 0;
    std::array<SparseOperator, 9> blocks_;
};

} // namespace sns
