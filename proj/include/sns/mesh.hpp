#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace sns {

using Vec3 = Eigen::Vector3d;
using Triangle = std::array<int, 3>;

/// Row-compressed vertex adjacency (each row holds the vertex and its one
/// ring, sorted), shared by every P1 operator on the mesh. face_slots[f][3b+a]
/// is the entry index of the pair (triangle(f)[b], triangle(f)[a]).
struct SparsityPattern {
    std::vector<int> outer;
    std::vector<int> inner;
    std::vector<std::array<int, 9>> face_slots;
};

/// Closed, consistently oriented triangulation with derived geometry.
///
/// Construction validates the closed 2-manifold invariants (every edge shared
/// by exactly two faces, opposite traversal on shared edges, single fan per
/// vertex, no degenerate faces) and throws TopologyError otherwise. Once
/// constructed the object is immutable and safe to share across threads.
class SurfaceMesh {
public:
    SurfaceMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

    [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
    [[nodiscard]] int num_faces() const { return static_cast<int>(triangles_.size()); }
    [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }

    [[nodiscard]] const std::vector<Vec3>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<Triangle>& triangles() const { return triangles_; }
    [[nodiscard]] const std::vector<std::array<int, 2>>& edges() const { return edges_; }

    [[nodiscard]] const Vec3& position(int v) const { return vertices_[v]; }
    [[nodiscard]] const Triangle& triangle(int f) const { return triangles_[f]; }

    [[nodiscard]] const Vec3& face_normal(int f) const { return face_normals_[f]; }
    [[nodiscard]] double face_area(int f) const { return face_areas_[f]; }
    /// Interior angle of face f at its k-th corner.
    [[nodiscard]] double corner_angle(int f, int k) const { return corner_angles_[f][k]; }

    /// Barycentric lumped area (one third of the incident face areas).
    [[nodiscard]] double vertex_area(int v) const { return vertex_areas_[v]; }
    [[nodiscard]] const Eigen::VectorXd& vertex_areas() const { return vertex_areas_; }
    [[nodiscard]] double total_area() const { return total_area_; }
    [[nodiscard]] double mean_edge_length() const { return mean_edge_length_; }

    /// Neighbours of v in counter-clockwise order (seen from outside).
    [[nodiscard]] std::span<const int> one_ring(int v) const;
    /// Faces around v; face k lies between one_ring(v)[k] and one_ring(v)[k+1].
    [[nodiscard]] std::span<const int> ring_faces(int v) const;

    /// Face containing the directed edge a->b, or -1.
    [[nodiscard]] int face_of_halfedge(int a, int b) const;

    [[nodiscard]] const SparsityPattern& pattern() const { return pattern_; }

    [[nodiscard]] int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }
    [[nodiscard]] int num_components() const { return num_components_; }
    /// Genus of a connected surface, derived from the Euler characteristic.
    [[nodiscard]] int genus() const;

private:
    void build_topology();
    void build_geometry();
    void build_pattern();
    [[nodiscard]] std::uint64_t key(int a, int b) const
    {
        return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(vertices_.size()) +
               static_cast<std::uint64_t>(b);
    }

    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<std::array<int, 2>> edges_;
    std::unordered_map<std::uint64_t, int> halfedge_face_;

    std::vector<int> ring_offsets_;
    std::vector<int> ring_vertices_;
    std::vector<int> ring_faces_;
    SparsityPattern pattern_;

    std::vector<Vec3> face_normals_;
    std::vector<double> face_areas_;
    std::vector<std::array<double, 3>> corner_angles_;
    Eigen::VectorXd vertex_areas_;
    double total_area_ = 0.0;
    double mean_edge_length_ = 0.0;
    int num_components_ = 0;
};

/// Throws TopologyError unless the mesh is connected with the given genus.
void require_genus(const SurfaceMesh& mesh, int genus);

} // namespace sns
