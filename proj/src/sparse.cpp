#include "sns/sparse.hpp"

#include "sns/errors.hpp"

namespace sns {

SparseOperator from_triplets(int rows, int cols, const Triplets& triplets)
{
    SparseOperator a(rows, cols);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();
    return a;
}

double asymmetry(const SparseOperator& a)
{
    const SparseOperator t = a.transpose();
    const SparseOperator d = a - t;
    double worst = 0.0;
    for (int k = 0; k < d.outerSize(); ++k) {
        for (SparseOperator::InnerIterator it(d, k); it; ++it) {
            worst = std::max(worst, std::abs(it.value()));
        }
    }
    return worst;
}

BlockOperator3::BlockOperator3(int n) : n_(n)
{
    for (auto& b : blocks_) {
        b.resize(n, n);
    }
}

VectorField3 BlockOperator3::apply(const VectorField3& u) const
{
    if (u.size() != n_) {
        throw ParameterError("block operator applied to a field of the wrong size");
    }
    VectorField3 out(n_);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (block(i, j).nonZeros() > 0) {
                out.comp(i) += block(i, j) * u.comp(j);
            }
        }
    }
    return out;
}

double BlockOperator3::form(const VectorField3& test, const VectorField3& trial) const
{
    const VectorField3 au = apply(trial);
    return test.x.dot(au.x) + test.y.dot(au.y) + test.z.dot(au.z);
}

SparseOperator BlockOperator3::monolithic() const
{
    Triplets t;
    t.reserve(static_cast<std::size_t>(nonzeros()));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const auto& b = block(i, j);
            for (int k = 0; k < b.outerSize(); ++k) {
                for (SparseOperator::InnerIterator it(b, k); it; ++it) {
                    t.emplace_back(i * n_ + static_cast<int>(it.row()), j * n_ + static_cast<int>(it.col()), it.value());
                }
            }
        }
    }
    return from_triplets(3 * n_, 3 * n_, t);
}

long BlockOperator3::nonzeros() const
{
    long nnz = 0;
    for (const auto& b : blocks_) {
        nnz += b.nonZeros();
    }
    return nnz;
}

BlockOperator3& BlockOperator3::operator+=(const BlockOperator3& o)
{
    if (o.n_ != n_) {
        throw ParameterError("block operator dimensions differ");
    }
    for (int k = 0; k < 9; ++k) {
        blocks_[k] += o.blocks_[k];
    }
    return *this;
}

BlockOperator3& BlockOperator3::operator*=(double s)
{
    for (auto& b : blocks_) {
        b *= s;
    }
    return *this;
}

BlockOperator3 BlockOperator3::diagonal(const SparseOperator& a)
{
    BlockOperator3 out(static_cast<int>(a.rows()));
    for (int i = 0; i < 3; ++i) {
        out.block(i, i) = a;
    }
    return out;
}

} // namespace sns
