#include "sns/fields.hpp"

#include "sns/errors.hpp"

#include <Eigen/Geometry>

#include <string>

namespace sns {

VectorField3 VectorField3::from_vectors(const std::vector<Vec3>& values)
{
    VectorField3 f(static_cast<int>(values.size()));
    for (int v = 0; v < f.size(); ++v) {
        f.set(v, values[v]);
    }
    return f;
}

VectorField3 VectorField3::from_flat(const Eigen::VectorXd& flat)
{
    if (flat.size() % 3 != 0) {
        throw ParameterError("flat vector length is not a multiple of 3");
    }
    const auto n = flat.size() / 3;
    VectorField3 f;
    f.x = flat.segment(0, n);
    f.y = flat.segment(n, n);
    f.z = flat.segment(2 * n, n);
    return f;
}

Eigen::VectorXd VectorField3::flat() const
{
    Eigen::VectorXd out(3 * x.size());
    out << x, y, z;
    return out;
}

std::vector<Vec3> VectorField3::to_vectors() const
{
    std::vector<Vec3> out(size());
    for (int v = 0; v < size(); ++v) {
        out[v] = at(v);
    }
    return out;
}

VectorField3& VectorField3::operator+=(const VectorField3& o)
{
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
}

VectorField3& VectorField3::operator-=(const VectorField3& o)
{
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
}

VectorField3& VectorField3::operator*=(double s)
{
    x *= s;
    y *= s;
    z *= s;
    return *this;
}

VectorField3 operator+(VectorField3 a, const VectorField3& b)
{
    return a += b;
}

VectorField3 operator-(VectorField3 a, const VectorField3& b)
{
    return a -= b;
}

VectorField3 operator*(double s, VectorField3 a)
{
    return a *= s;
}

VectorField3 cross(const std::vector<Vec3>& normals, const VectorField3& u)
{
    VectorField3 out(u.size());
    for (int v = 0; v < u.size(); ++v) {
        out.set(v, normals[v].cross(u.at(v)));
    }
    return out;
}

ScalarField dot(const std::vector<Vec3>& normals, const VectorField3& u)
{
    ScalarField out(u.size());
    for (int v = 0; v < u.size(); ++v) {
        out[v] = normals[v].dot(u.at(v));
    }
    return out;
}

void require_size(const SurfaceMesh& mesh, const VectorField3& u, const char* what)
{
    if (u.size() != mesh.num_vertices() || u.y.size() != u.x.size() || u.z.size() != u.x.size()) {
        throw ParameterError(std::string(what) + " has " + std::to_string(u.size()) + " values, mesh has " +
                             std::to_string(mesh.num_vertices()) + " vertices");
    }
}

} // namespace sns
