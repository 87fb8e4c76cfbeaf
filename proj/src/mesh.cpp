#include "sns/mesh.hpp"

#include "sns/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sns {

namespace {

std::string edge_name(int a, int b)
{
    std::ostringstream out;
    out << "(" << std::min(a, b) << ", " << std::max(a, b) << ")";
    return out.str();
}

int find_root(std::vector<int>& parent, int x)
{
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

} // namespace

SurfaceMesh::SurfaceMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles))
{
    if (vertices_.empty() || triangles_.empty()) {
        throw TopologyError("mesh has no vertices or no faces");
    }
    build_topology();
    build_pattern();
    build_geometry();
}

void SurfaceMesh::build_pattern()
{
    const int nv = num_vertices();
    auto& p = pattern_;
    p.outer.assign(nv + 1, 0);
    p.inner.reserve(ring_vertices_.size() + nv);
    for (int v = 0; v < nv; ++v) {
        const auto row = static_cast<std::ptrdiff_t>(p.inner.size());
        const auto ring = one_ring(v);
        p.inner.push_back(v);
        p.inner.insert(p.inner.end(), ring.begin(), ring.end());
        std::sort(p.inner.begin() + row, p.inner.end());
        p.outer[v + 1] = static_cast<int>(p.inner.size());
    }
    p.face_slots.resize(triangles_.size());
    for (std::size_t f = 0; f < triangles_.size(); ++f) {
        const auto& t = triangles_[f];
        for (int b = 0; b < 3; ++b) {
            const auto first = p.inner.begin() + p.outer[t[b]];
            const auto last = p.inner.begin() + p.outer[t[b] + 1];
            for (int a = 0; a < 3; ++a) {
                p.face_slots[f][3 * b + a] = static_cast<int>(std::find(first, last, t[a]) - p.inner.begin());
            }
        }
    }
}

void SurfaceMesh::build_topology()
{
    const int nv = num_vertices();
    const int nf = num_faces();

    for (int f = 0; f < nf; ++f) {
        const auto& t = triangles_[f];
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= nv) {
                throw TopologyError("face " + std::to_string(f) + " references vertex " +
                                    std::to_string(t[k]) + " out of range");
            }
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            throw TopologyError("face " + std::to_string(f) + " repeats a vertex");
        }
    }

    // Undirected incidence counts first, so that a triple edge is reported as
    // non-manifold rather than as an orientation clash.
    std::unordered_map<std::uint64_t, int> undirected;
    undirected.reserve(static_cast<std::size_t>(3 * nf));
    for (const auto& t : triangles_) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[k];
            const int b = t[(k + 1) % 3];
            ++undirected[key(std::min(a, b), std::max(a, b))];
        }
    }
    // Over-shared edges are reported before boundary edges; ties go to the lowest key.
    std::uint64_t worst_key = 0;
    int worst_count = 2;
    for (const auto& [k, count] : undirected) {
        const bool worse = (count > 2 && (worst_count <= 2 || k < worst_key)) ||
                           (count < 2 && worst_count < 2 && k < worst_key) || (count < 2 && worst_count == 2);
        if (worse) {
            worst_key = k;
            worst_count = count;
        }
    }
    if (worst_count != 2) {
        const int a = static_cast<int>(worst_key / static_cast<std::uint64_t>(nv));
        const int b = static_cast<int>(worst_key % static_cast<std::uint64_t>(nv));
        throw TopologyError("non-manifold edge " + edge_name(a, b) + " is shared by " +
                            std::to_string(worst_count) + " faces (expected 2)");
    }

    halfedge_face_.reserve(static_cast<std::size_t>(3 * nf));
    for (int f = 0; f < nf; ++f) {
        const auto& t = triangles_[f];
        for (int k = 0; k < 3; ++k) {
            const int a = t[k];
            const int b = t[(k + 1) % 3];
            auto [it, inserted] = halfedge_face_.emplace(key(a, b), f);
            if (!inserted) {
                throw TopologyError("inconsistent orientation: faces " + std::to_string(it->second) +
                                    " and " + std::to_string(f) + " traverse edge " + edge_name(a, b) +
                                    " in the same direction");
            }
        }
    }

    edges_.clear();
    edges_.reserve(undirected.size());
    for (int f = 0; f < nf; ++f) {
        const auto& t = triangles_[f];
        for (int k = 0; k < 3; ++k) {
            const int a = t[k];
            const int b = t[(k + 1) % 3];
            if (a < b) {
                edges_.push_back({a, b});
            }
        }
    }
    std::sort(edges_.begin(), edges_.end());

    std::vector<int> incident_count(nv, 0);
    std::vector<int> first_face(nv, -1);
    for (int f = 0; f < nf; ++f) {
        for (int v : triangles_[f]) {
            ++incident_count[v];
            if (first_face[v] < 0) {
                first_face[v] = f;
            }
        }
    }

    ring_offsets_.assign(nv + 1, 0);
    ring_vertices_.clear();
    ring_faces_.clear();
    ring_vertices_.reserve(static_cast<std::size_t>(3 * nf));
    ring_faces_.reserve(static_cast<std::size_t>(3 * nf));
    for (int v = 0; v < nv; ++v) {
        if (first_face[v] < 0) {
            throw TopologyError("vertex " + std::to_string(v) + " is not referenced by any face");
        }
        ring_offsets_[v] = static_cast<int>(ring_vertices_.size());
        int f = first_face[v];
        int walked = 0;
        do {
            const auto& t = triangles_[f];
            const int k = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
            const int next = t[(k + 1) % 3];
            const int prev = t[(k + 2) % 3];
            ring_vertices_.push_back(next);
            ring_faces_.push_back(f);
            ++walked;
            f = face_of_halfedge(v, prev);
            if (walked > incident_count[v]) {
                break;
            }
        } while (f != first_face[v]);
        if (walked != incident_count[v]) {
            throw TopologyError("non-manifold vertex " + std::to_string(v) +
                                ": incident faces do not form a single fan");
        }
    }
    ring_offsets_[nv] = static_cast<int>(ring_vertices_.size());

    std::vector<int> parent(nv);
    std::iota(parent.begin(), parent.end(), 0);
    for (const auto& e : edges_) {
        const int ra = find_root(parent, e[0]);
        const int rb = find_root(parent, e[1]);
        if (ra != rb) {
            parent[ra] = rb;
        }
    }
    num_components_ = 0;
    for (int v = 0; v < nv; ++v) {
        if (find_root(parent, v) == v) {
            ++num_components_;
        }
    }
}

void SurfaceMesh::build_geometry()
{
    const int nf = num_faces();
    face_normals_.resize(nf);
    face_areas_.resize(nf);
    corner_angles_.resize(nf);
    vertex_areas_ = Eigen::VectorXd::Zero(num_vertices());

    for (int f = 0; f < nf; ++f) {
        const auto& t = triangles_[f];
        const Vec3& p0 = vertices_[t[0]];
        const Vec3& p1 = vertices_[t[1]];
        const Vec3& p2 = vertices_[t[2]];
        const Vec3 n = (p1 - p0).cross(p2 - p0);
        const double twice_area = n.norm();
        face_areas_[f] = 0.5 * twice_area;
        face_normals_[f] = twice_area > 0.0 ? Vec3(n / twice_area) : Vec3::Zero();
        for (int k = 0; k < 3; ++k) {
            const Vec3 e1 = vertices_[t[(k + 1) % 3]] - vertices_[t[k]];
            const Vec3 e2 = vertices_[t[(k + 2) % 3]] - vertices_[t[k]];
            corner_angles_[f][k] = std::atan2(e1.cross(e2).norm(), e1.dot(e2));
        }
        for (int v : t) {
            vertex_areas_[v] += face_areas_[f] / 3.0;
        }
    }
    total_area_ = std::accumulate(face_areas_.begin(), face_areas_.end(), 0.0);

    const double mean_area = total_area_ / nf;
    for (int f = 0; f < nf; ++f) {
        if (!(face_areas_[f] > 1e-12 * mean_area)) {
            throw TopologyError("degenerate face " + std::to_string(f) + " with area " +
                                std::to_string(face_areas_[f]));
        }
    }

    double length_sum = 0.0;
    for (const auto& e : edges_) {
        length_sum += (vertices_[e[0]] - vertices_[e[1]]).norm();
    }
    mean_edge_length_ = length_sum / static_cast<double>(edges_.size());
}

std::span<const int> SurfaceMesh::one_ring(int v) const
{
    const auto begin = static_cast<std::size_t>(ring_offsets_[v]);
    const auto count = static_cast<std::size_t>(ring_offsets_[v + 1] - ring_offsets_[v]);
    return std::span<const int>(ring_vertices_).subspan(begin, count);
}

std::span<const int> SurfaceMesh::ring_faces(int v) const
{
    const auto begin = static_cast<std::size_t>(ring_offsets_[v]);
    const auto count = static_cast<std::size_t>(ring_offsets_[v + 1] - ring_offsets_[v]);
    return std::span<const int>(ring_faces_).subspan(begin, count);
}

int SurfaceMesh::face_of_halfedge(int a, int b) const
{
    const auto it = halfedge_face_.find(key(a, b));
    return it == halfedge_face_.end() ? -1 : it->second;
}

int SurfaceMesh::genus() const
{
    return (2 - euler_characteristic()) / 2;
}

void require_genus(const SurfaceMesh& mesh, int genus)
{
    if (mesh.num_components() != 1) {
        throw TopologyError("mesh has " + std::to_string(mesh.num_components()) +
                            " connected components (expected 1)");
    }
    const int chi = mesh.euler_characteristic();
    if (chi != 2 - 2 * genus) {
        throw TopologyError("Euler characteristic " + std::to_string(chi) + " does not match genus " +
                            std::to_string(genus));
    }
}

} // namespace sns
