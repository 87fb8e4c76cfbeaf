#pragma once

#include "sns/mesh.hpp"

#include <Eigen/Core>

#include <vector>

namespace sns {

using ScalarField = Eigen::VectorXd;

/// Per-vertex R^3-valued field stored as three component arrays.
/// Tangency is never enforced here; callers measure it.
struct VectorField3 {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd z;

    VectorField3() = default;
    explicit VectorField3(int n) : x(Eigen::VectorXd::Zero(n)), y(Eigen::VectorXd::Zero(n)), z(Eigen::VectorXd::Zero(n)) {}

    [[nodiscard]] static VectorField3 from_vectors(const std::vector<Vec3>& values);
    /// Inverse of flat(): components stacked as [x; y; z].
    [[nodiscard]] static VectorField3 from_flat(const Eigen::VectorXd& flat);

    [[nodiscard]] int size() const { return static_cast<int>(x.size()); }
    [[nodiscard]] Eigen::VectorXd& comp(int i) { return i == 0 ? x : (i == 1 ? y : z); }
    [[nodiscard]] const Eigen::VectorXd& comp(int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    [[nodiscard]] Vec3 at(int v) const { return {x[v], y[v], z[v]}; }
    void set(int v, const Vec3& value)
    {
        x[v] = value.x();
        y[v] = value.y();
        z[v] = value.z();
    }

    [[nodiscard]] Eigen::VectorXd flat() const;
    [[nodiscard]] std::vector<Vec3> to_vectors() const;

    VectorField3& operator+=(const VectorField3& o);
    VectorField3& operator-=(const VectorField3& o);
    VectorField3& operator*=(double s);
};

[[nodiscard]] VectorField3 operator+(VectorField3 a, const VectorField3& b);
[[nodiscard]] VectorField3 operator-(VectorField3 a, const VectorField3& b);
[[nodiscard]] VectorField3 operator*(double s, VectorField3 a);

/// Pointwise n_v x u_v.
[[nodiscard]] VectorField3 cross(const std::vector<Vec3>& normals, const VectorField3& u);
/// Pointwise n_v . u_v.
[[nodiscard]] ScalarField dot(const std::vector<Vec3>& normals, const VectorField3& u);

/// Throws ParameterError when the field length does not match the mesh.
void require_size(const SurfaceMesh& mesh, const VectorField3& u, const char* what);

} // namespace sns
