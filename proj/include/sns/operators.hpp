#pragma once

#include "sns/fields.hpp"
#include "sns/mesh.hpp"
#include "sns/sparse.hpp"

#include <array>
#include <vector>

namespace sns {

enum class MassKind { Consistent, Lumped };

/// P1 mass matrix. Lumped uses the barycentric vertex areas on the diagonal.
[[nodiscard]] SparseOperator assemble_mass(const SurfaceMesh& mesh, MassKind kind = MassKind::Consistent);

/// P1 stiffness matrix, entries integral of grad phi_a . grad phi_b (cotangent weights).
[[nodiscard]] SparseOperator assemble_stiffness(const SurfaceMesh& mesh);

/// Per-face gradients of the three hat functions, in triangle corner order.
[[nodiscard]] std::vector<std::array<Vec3, 3>> basis_gradients(const SurfaceMesh& mesh);

/// Per-face tangential gradient of a P1 function.
[[nodiscard]] std::vector<Vec3> surface_gradient(const SurfaceMesh& mesh, const ScalarField& f);

/// Face-area-weighted average of per-face vectors at each vertex.
[[nodiscard]] VectorField3 face_to_vertex(const SurfaceMesh& mesh, const std::vector<Vec3>& per_face);

/// Weak divergence load D_a = -integral u . grad phi_a (centroid quadrature).
[[nodiscard]] ScalarField weak_divergence(const SurfaceMesh& mesh, const VectorField3& u);

/// Lumped-mass-normalised weak divergence.
[[nodiscard]] ScalarField div_h(const SurfaceMesh& mesh, const VectorField3& u);

/// Lumped-mass-normalised weak curl, rot u = -div(n x u) with vertex normals.
[[nodiscard]] ScalarField rot_h(const SurfaceMesh& mesh, const std::vector<Vec3>& normals, const VectorField3& u);

/// Work record of a term-by-term assembly.
struct AssemblyStats {
    /// Assembled products per block, row-major (i * 3 + j).
    std::array<int, 9> terms{};
    int quadrature_points = 0;
    /// Scalar multiply-adds over the whole mesh.
    long long products = 0;

    [[nodiscard]] int total_terms() const;
};

/// b(w, u) = integral div w div u. Symmetric PSD.
[[nodiscard]] BlockOperator3 assemble_graddiv_block(const SurfaceMesh& mesh, AssemblyStats* stats = nullptr);

/// r(v, u) = integral rot v rot u, with rot u = sum_b u_b . (nu_h x grad phi_b + phi_b c_f),
/// nu_h the P1 interpolant of the vertex normals and c_f = sum_a nu_a x grad phi_a.
[[nodiscard]] BlockOperator3 assemble_rotrot_block(const SurfaceMesh& mesh, const std::vector<Vec3>& normals,
                                                   AssemblyStats* stats = nullptr);

/// alpha integral (nu . w)(nu . u) with vertex quadrature: block (i, j) = diag(alpha A_a nu_ai nu_aj).
[[nodiscard]] BlockOperator3 assemble_penalty(const SurfaceMesh& mesh, const std::vector<Vec3>& normals, double alpha);

/// Diagonal blocks integral 2 kappa phi_a phi_b with kappa interpolated as a P1 function.
[[nodiscard]] BlockOperator3 assemble_curvature_term(const SurfaceMesh& mesh, const ScalarField& kappa);

/// Frozen-coefficient form integral div(w*) (C . u), C the face average of nu x w^n.
[[nodiscard]] BlockOperator3 assemble_advection_p2(const SurfaceMesh& mesh, const std::vector<Vec3>& normals,
                                                   const VectorField3& w);

/// Frozen-coefficient form integral rot(v*) (C . u), C the face average of nu x v^n,
/// rot evaluated at face centroids as in assemble_rotrot_block.
[[nodiscard]] BlockOperator3 assemble_advection_p1(const SurfaceMesh& mesh, const std::vector<Vec3>& normals,
                                                   const VectorField3& v);

/// L_q = integral v* . grad phi_q.
[[nodiscard]] ScalarField assemble_pressure_rhs_p1(const SurfaceMesh& mesh, const VectorField3& v);

/// L_q = -integral (n_f x w*) . grad phi_q with face normals n_f.
[[nodiscard]] ScalarField assemble_pressure_rhs_p2(const SurfaceMesh& mesh, const VectorField3& w);

/// Vertex average of the per-face gradients of p.
[[nodiscard]] VectorField3 vertex_gradient(const SurfaceMesh& mesh, const ScalarField& p);

/// Vertex average of the per-face n_f x grad p.
[[nodiscard]] VectorField3 vertex_rotated_gradient(const SurfaceMesh& mesh, const ScalarField& p);

} // namespace sns
