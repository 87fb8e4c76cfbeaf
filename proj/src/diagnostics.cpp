#include "sns/diagnostics.hpp"

#include "sns/errors.hpp"
#include "sns/operators.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace sns {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a)
{
    a = std::fmod(a + std::numbers::pi, kTwoPi);
    if (a <= 0.0) {
        a += kTwoPi;
    }
    return a - std::numbers::pi;
}

double positive_angle(double a)
{
    a = std::fmod(a, kTwoPi);
    return a < 0.0 ? a + kTwoPi : a;
}

int corner_of(const Triangle& t, int v)
{
    return t[0] == v ? 0 : (t[1] == v ? 1 : 2);
}

// Flattened polar frame of every vertex: corner angles scaled to sum to 2 pi,
// angle 0 along the edge to one_ring(v)[0].
struct VertexFrames {
    std::vector<double> scale;
    std::vector<int> offset;
    std::vector<double> edge_angle;

    explicit VertexFrames(const SurfaceMesh& mesh)
    {
        const int nv = mesh.num_vertices();
        scale.resize(nv);
        offset.resize(nv + 1, 0);
        for (int v = 0; v < nv; ++v) {
            offset[v + 1] = offset[v] + static_cast<int>(mesh.one_ring(v).size());
        }
        edge_angle.resize(offset[nv]);
        for (int v = 0; v < nv; ++v) {
            const auto faces = mesh.ring_faces(v);
            double total = 0.0;
            for (int f : faces) {
                total += mesh.corner_angle(f, corner_of(mesh.triangle(f), v));
            }
            scale[v] = kTwoPi / total;
            double acc = 0.0;
            for (std::size_t k = 0; k < faces.size(); ++k) {
                edge_angle[offset[v] + k] = acc;
                acc += scale[v] * mesh.corner_angle(faces[k], corner_of(mesh.triangle(faces[k]), v));
            }
        }
    }

    [[nodiscard]] double angle(const SurfaceMesh& mesh, int i, int j) const
    {
        const auto ring = mesh.one_ring(i);
        for (std::size_t k = 0; k < ring.size(); ++k) {
            if (ring[k] == j) {
                return edge_angle[offset[i] + k];
            }
        }
        throw GeometryError("vertices " + std::to_string(i) + " and " + std::to_string(j) + " are not adjacent");
    }
};

// Angle of the tangential direction d in the flattened frame of v, by
// interpolating between the true tangent-plane angles of the ring edges.
double flattened_direction(const SurfaceMesh& mesh, const VertexFrames& frames, int v, const Vec3& n,
                           const Vec3& d)
{
    const auto ring = mesh.one_ring(v);
    const Vec3& p = mesh.position(v);
    auto project = [&](const Vec3& x) { return Vec3(x - n * n.dot(x)); };
    const Vec3 e1 = project(mesh.position(ring[0]) - p).normalized();
    const Vec3 e2 = n.cross(e1);
    auto true_angle = [&](const Vec3& x) { return positive_angle(std::atan2(x.dot(e2), x.dot(e1))); };

    const double target = true_angle(d);
    const std::size_t deg = ring.size();
    double prev_true = 0.0;
    for (std::size_t k = 0; k < deg; ++k) {
        const double next_true = k + 1 < deg ? true_angle(project(mesh.position(ring[k + 1]) - p)) : kTwoPi;
        if (next_true < prev_true) {
            // The projected ring folds over; fall back to the unflattened angle.
            return target;
        }
        if (target >= prev_true && target < next_true) {
            const double lo = frames.edge_angle[frames.offset[v] + k];
            const double hi = k + 1 < deg ? frames.edge_angle[frames.offset[v] + k + 1] : kTwoPi;
            const double span = next_true - prev_true;
            const double s = span > 0.0 ? (target - prev_true) / span : 0.0;
            return lo + s * (hi - lo);
        }
        prev_true = next_true;
    }
    return target;
}

} // namespace

double kinetic_energy(const VectorField3& v, const SparseOperator& mass)
{
    return 0.5 * std::pow(l2_norm(v, mass), 2);
}

double l2_norm(const VectorField3& v, const SparseOperator& mass)
{
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        sum += v.comp(c).dot(mass * v.comp(c));
    }
    return std::sqrt(std::max(sum, 0.0));
}

double h1_seminorm_rescaled(const VectorField3& v, const SparseOperator& mass, const SparseOperator& stiffness)
{
    const double norm = l2_norm(v, mass);
    if (!(norm > 0.0)) {
        throw ParameterError("H1 seminorm of the rescaled field is undefined for a zero field");
    }
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        sum += v.comp(c).dot(stiffness * v.comp(c));
    }
    return std::sqrt(std::max(sum, 0.0)) / norm;
}

double normal_norm(const VectorField3& v, const std::vector<Vec3>& normals, const Eigen::VectorXd& areas)
{
    const ScalarField vn = dot(normals, v);
    return std::sqrt(vn.cwiseAbs2().dot(areas));
}

double divergence_dual_norm(const SparseOperator& stiffness, const Eigen::VectorXd& load, const Eigen::VectorXd& areas,
                            const KrylovOptions& options, Eigen::VectorXd* warm_start)
{
    const bool warm = warm_start != nullptr && warm_start->size() == load.size();
    const auto result = pressure_poisson_solve(stiffness, load, areas, options, warm ? warm_start : nullptr);
    if (warm_start != nullptr) {
        *warm_start = result.x;
    }
    const Eigen::VectorXd compatible = load - (load.sum() / areas.sum()) * areas;
    return std::sqrt(std::max(0.0, compatible.dot(result.x)));
}

DefectReport detect_defects(const SurfaceMesh& mesh, const std::vector<Vec3>& normals, const VectorField3& v,
                            double zero_threshold)
{
    require_size(mesh, v, "field");
    const int nv = mesh.num_vertices();
    const VertexFrames frames(mesh);

    std::vector<Vec3> tangent(nv);
    double mean_length = 0.0;
    for (int i = 0; i < nv; ++i) {
        const Vec3 x = v.at(i);
        tangent[i] = x - normals[i] * normals[i].dot(x);
        mean_length += tangent[i].norm() / nv;
    }
    if (!(mean_length > 0.0)) {
        throw ParameterError("defect detection needs a field that is not identically zero");
    }
    const double threshold = zero_threshold < 0.0 ? 1e-3 * mean_length : zero_threshold;

    std::vector<double> theta(nv, 0.0);
    for (int i = 0; i < nv; ++i) {
        if (tangent[i].norm() > threshold) {
            theta[i] = flattened_direction(mesh, frames, i, normals[i], tangent[i]);
        }
    }

    // Angle jump along the oriented edge i -> j, antisymmetric by construction.
    auto jump = [&](int i, int j) {
        const int a = std::min(i, j);
        const int b = std::max(i, j);
        const double transport = frames.angle(mesh, b, a) + std::numbers::pi - frames.angle(mesh, a, b);
        const double d = wrap_angle(theta[b] - theta[a] - transport);
        return i == a ? d : -d;
    };

    std::vector<int> face_index(mesh.num_faces(), 0);
    DefectReport report;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangle(f);
        double raw = -std::numbers::pi;
        for (int k = 0; k < 3; ++k) {
            raw += frames.scale[t[k]] * mesh.corner_angle(f, k);
            raw += jump(t[k], t[(k + 1) % 3]);
        }
        raw /= kTwoPi;
        const double rounded = std::round(raw);
        if (std::abs(raw - rounded) > 1e-6) {
            throw Error("face " + std::to_string(f) + " has a non-integral index " + std::to_string(raw));
        }
        face_index[f] = static_cast<int>(rounded);
        report.index_sum += face_index[f];
    }

    // Merge defect faces that share a vertex.
    std::vector<int> parent(mesh.num_faces());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::vector<int> owner(nv, -1);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (face_index[f] == 0) {
            continue;
        }
        for (int vtx : mesh.triangle(f)) {
            if (owner[vtx] < 0) {
                owner[vtx] = f;
            } else {
                parent[find(f)] = find(owner[vtx]);
            }
        }
    }
    std::vector<int> cluster_index(mesh.num_faces(), 0);
    std::vector<int> cluster_vertex(mesh.num_faces(), -1);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (face_index[f] == 0) {
            continue;
        }
        const int root = find(f);
        cluster_index[root] += face_index[f];
        for (int vtx : mesh.triangle(f)) {
            int& best = cluster_vertex[root];
            if (best < 0 || tangent[vtx].norm() < tangent[best].norm()) {
                best = vtx;
            }
        }
    }
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (find(f) == f && cluster_index[f] != 0) {
            report.defects.push_back({cluster_vertex[f], mesh.position(cluster_vertex[f]), cluster_index[f]});
        }
    }
    return report;
}

double spacetime_norm(const std::vector<double>& values, const std::vector<double>& times, double p)
{
    if (values.size() != times.size()) {
        throw ParameterError("spacetime_norm: values and times differ in length");
    }
    if (values.size() < 2) {
        throw ParameterError("spacetime_norm needs at least two samples");
    }
    if (!(p >= 1.0)) {
        throw ParameterError("spacetime_norm needs p >= 1");
    }
    double sum = 0.0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        const double dt = times[k] - times[k - 1];
        if (!(dt > 0.0)) {
            throw ParameterError("spacetime_norm: times must be strictly increasing");
        }
        sum += 0.5 * dt * (std::pow(std::abs(values[k - 1]), p) + std::pow(std::abs(values[k]), p));
    }
    return std::pow(sum, 1.0 / p);
}

ScalarField full_surface_divergence(const SurfaceMesh& mesh, const std::vector<Vec3>& normals, const VectorField3& v,
                                    const ScalarField& mean_curvature)
{
    return div_h(mesh, v) - mean_curvature.cwiseProduct(dot(normals, v));
}

} // namespace sns
