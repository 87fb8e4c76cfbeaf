#include "sns/krylov.hpp"

#include "sns/errors.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <sstream>

namespace sns {

namespace {

constexpr int kEll = 2;

class PreconditionerOp {
public:
    PreconditionerOp(const SparseOperator& a, Preconditioner kind) : kind_(kind)
    {
        const auto n = a.rows();
        if (kind == Preconditioner::Jacobi) {
            inv_diag_.resize(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = a.coeff(i, i);
                inv_diag_[i] = d != 0.0 ? 1.0 / d : 1.0;
            }
        } else if (kind == Preconditioner::BlockJacobi3) {
            if (n % 3 != 0) {
                throw SolverError("block Jacobi needs a system size divisible by 3");
            }
            nv_ = n / 3;
            blocks_.resize(nv_);
            for (Eigen::Index v = 0; v < nv_; ++v) {
                Eigen::Matrix3d b;
                for (int i = 0; i < 3; ++i) {
                    for (int j = 0; j < 3; ++j) {
                        b(i, j) = a.coeff(i * nv_ + v, j * nv_ + v);
                    }
                }
                Eigen::FullPivLU<Eigen::Matrix3d> lu(b);
                if (lu.isInvertible()) {
                    blocks_[v] = lu.inverse();
                } else {
                    blocks_[v].setZero();
                    for (int i = 0; i < 3; ++i) {
                        blocks_[v](i, i) = b(i, i) != 0.0 ? 1.0 / b(i, i) : 1.0;
                    }
                }
            }
        }
    }

    void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const
    {
        switch (kind_) {
        case Preconditioner::None:
            z = r;
            break;
        case Preconditioner::Jacobi:
            z = inv_diag_.cwiseProduct(r);
            break;
        case Preconditioner::BlockJacobi3:
            z.resize(r.size());
            for (Eigen::Index v = 0; v < nv_; ++v) {
                const Eigen::Vector3d rv(r[v], r[nv_ + v], r[2 * nv_ + v]);
                const Eigen::Vector3d zv = blocks_[v] * rv;
                z[v] = zv[0];
                z[nv_ + v] = zv[1];
                z[2 * nv_ + v] = zv[2];
            }
            break;
        }
    }

private:
    Preconditioner kind_;
    Eigen::VectorXd inv_diag_;
    Eigen::Index nv_ = 0;
    std::vector<Eigen::Matrix3d> blocks_;
};

std::string history_text(const std::vector<double>& history)
{
    std::ostringstream out;
    out << "residual history:";
    const std::size_t shown = std::min<std::size_t>(history.size(), 8);
    for (std::size_t k = 0; k < shown; ++k) {
        out << ' ' << history[k];
    }
    if (history.size() > shown) {
        out << " ... " << history.back();
    }
    return out.str();
}

} // namespace

KrylovResult krylov_solve(const SparseOperator& a, const Eigen::VectorXd& b, const KrylovOptions& options,
                          const Eigen::VectorXd* x0)
{
    if (a.rows() != a.cols() || a.rows() != b.size()) {
        throw SolverError("krylov_solve: dimension mismatch");
    }
    if (!(options.tol > 0.0 && options.tol < 1.0) || options.max_iter < 1) {
        throw SolverError("krylov_solve: tolerance must lie in (0, 1) and max_iter be positive");
    }
    if (x0 != nullptr && x0->size() != b.size()) {
        throw SolverError("krylov_solve: initial guess has the wrong size");
    }
    const auto n = b.size();
    KrylovResult result;
    result.x = x0 != nullptr ? *x0 : Eigen::VectorXd::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        result.x.setZero();
        return result;
    }
    const double target = options.tol * bnorm;
    const PreconditionerOp prec(a, options.preconditioner);

    // Operator of the right-preconditioned system A M^-1.
    Eigen::VectorXd scratch(n);
    auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
        prec.apply(in, scratch);
        out.noalias() = a * scratch;
    };

    std::array<Eigen::VectorXd, kEll + 1> r;
    std::array<Eigen::VectorXd, kEll + 1> u;
    Eigen::VectorXd xhat(n);
    Eigen::VectorXd rtilde(n);
    Eigen::VectorXd correction(n);
    Eigen::VectorXd true_residual = b - a * result.x;
    int restarts = 0;

    while (true) {
        if (true_residual.norm() <= target) {
            result.relative_residual = true_residual.norm() / bnorm;
            return result;
        }
        r[0] = true_residual;
        rtilde = r[0];
        for (auto& v : u) {
            v = Eigen::VectorXd::Zero(n);
        }
        for (int j = 1; j <= kEll; ++j) {
            r[j] = Eigen::VectorXd::Zero(n);
        }
        xhat.setZero();
        double rho0 = 1.0;
        double alpha = 0.0;
        double omega = 1.0;
        bool breakdown = false;
        bool recursive_converged = false;

        while (result.iterations < options.max_iter) {
            rho0 = -omega * rho0;
            for (int j = 0; j < kEll; ++j) {
                const double rho1 = r[j].dot(rtilde);
                if (rho0 == 0.0 || !std::isfinite(rho1)) {
                    breakdown = true;
                    break;
                }
                const double beta = alpha * rho1 / rho0;
                rho0 = rho1;
                for (int i = 0; i <= j; ++i) {
                    u[i] = r[i] - beta * u[i];
                }
                apply(u[j], u[j + 1]);
                const double gamma = u[j + 1].dot(rtilde);
                if (gamma == 0.0 || !std::isfinite(gamma)) {
                    breakdown = true;
                    break;
                }
                alpha = rho0 / gamma;
                for (int i = 0; i <= j; ++i) {
                    r[i] -= alpha * u[i + 1];
                }
                apply(r[j], r[j + 1]);
                xhat += alpha * u[0];
            }
            if (breakdown) {
                break;
            }

            // Minimal-residual polynomial part (modified Gram-Schmidt).
            double tau[kEll + 1][kEll + 1] = {};
            double sigma[kEll + 1] = {};
            double gamma_p[kEll + 1] = {};
            double gamma[kEll + 1] = {};
            double gamma_pp[kEll + 1] = {};
            for (int j = 1; j <= kEll; ++j) {
                for (int i = 1; i < j; ++i) {
                    tau[i][j] = r[j].dot(r[i]) / sigma[i];
                    r[j] -= tau[i][j] * r[i];
                }
                sigma[j] = r[j].squaredNorm();
                if (sigma[j] == 0.0 || !std::isfinite(sigma[j])) {
                    breakdown = true;
                    break;
                }
                gamma_p[j] = r[0].dot(r[j]) / sigma[j];
            }
            if (breakdown) {
                break;
            }
            gamma[kEll] = gamma_p[kEll];
            omega = gamma[kEll];
            for (int j = kEll - 1; j >= 1; --j) {
                double s = 0.0;
                for (int i = j + 1; i <= kEll; ++i) {
                    s += tau[j][i] * gamma[i];
                }
                gamma[j] = gamma_p[j] - s;
            }
            for (int j = 1; j < kEll; ++j) {
                double s = 0.0;
                for (int i = j + 1; i < kEll; ++i) {
                    s += tau[j][i] * gamma[i + 1];
                }
                gamma_pp[j] = gamma[j + 1] + s;
            }
            xhat += gamma[1] * r[0];
            r[0] -= gamma_p[kEll] * r[kEll];
            u[0] -= gamma[kEll] * u[kEll];
            for (int j = 1; j < kEll; ++j) {
                u[0] -= gamma[j] * u[j];
                xhat += gamma_pp[j] * r[j];
                r[0] -= gamma_p[j] * r[j];
            }
            ++result.iterations;
            const double rel = r[0].norm() / bnorm;
            result.history.push_back(rel);
            if (!std::isfinite(rel)) {
                breakdown = true;
                break;
            }
            if (r[0].norm() <= target) {
                recursive_converged = true;
                break;
            }
        }

        prec.apply(xhat, correction);
        result.x += correction;
        true_residual = b - a * result.x;
        result.relative_residual = true_residual.norm() / bnorm;
        if (result.relative_residual <= options.tol) {
            return result;
        }
        const bool out_of_budget = result.iterations >= options.max_iter;
        if (out_of_budget || restarts >= 20 || (breakdown && !recursive_converged && result.iterations == 0)) {
            std::ostringstream msg;
            msg << "BiCGStab(2) did not converge: relative residual " << result.relative_residual << " after "
                << result.iterations << " cycles (tol " << options.tol << ")" << (breakdown ? ", breakdown" : "")
                << "; " << history_text(result.history);
            throw SolverError(msg.str());
        }
        // Residual gap or breakdown: restart from the true residual.
        ++restarts;
    }
}

KrylovResult pressure_poisson_solve(const SparseOperator& k, const Eigen::VectorXd& rhs, const Eigen::VectorXd& areas,
                                    const KrylovOptions& options, const Eigen::VectorXd* x0)
{
    if (rhs.size() != k.rows() || areas.size() != k.rows()) {
        throw SolverError("pressure_poisson_solve: dimension mismatch");
    }
    const double total_area = areas.sum();
    const Eigen::VectorXd compatible = rhs - (rhs.sum() / total_area) * areas;
    KrylovResult result = krylov_solve(k, compatible, options, x0);
    result.x.array() -= result.x.dot(areas) / total_area;
    return result;
}

} // namespace sns
