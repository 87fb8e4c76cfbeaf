#include "sns/operators.hpp"

#include "sns/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>

namespace sns {

namespace {

Vec3 centroid_value(const VectorField3& u, const Triangle& t)
{
    return (u.at(t[0]) + u.at(t[1]) + u.at(t[2])) / 3.0;
}

constexpr int levi_civita(int i, int k, int l)
{
    return (i - k) * (k - l) * (l - i) / 2;
}

// One factor of a term: sign * coefficient[coef] * basis[basis], where basis
// 0..2 is the l-th gradient component of the hat function and 3 its value.
struct Factor {
    double sign = 1.0;
    int coef = 0;
    int basis = 0;
};

struct Term {
    Factor test;
    Factor trial;
};

struct QuadPoint {
    std::array<double, 3> bary;
    double weight;
};

// Coefficient table layout shared by the term lists below:
//   0           constant 1
//   1 + k       k-th component of the interpolated vertex normal at the point
//   4 + 3k + l  C_kl = sum_a nu_ak (grad phi_a)_l  (face constant)
constexpr int kCoefOne = 0;
constexpr int kCoefNormal = 1;
constexpr int kCoefC = 4;
constexpr int kNumCoefs = 13;
constexpr int kBasisValue = 3;

struct BilinearForm {
    std::array<std::vector<Term>, 9> terms;
    std::vector<QuadPoint> quadrature;
    bool uses_normals = false;
};

// Factors of (rot u)_i: sum over eps_ikl of nu_k d_l phi and phi C_kl.
std::vector<Factor> rot_factors(int i)
{
    std::vector<Factor> out;
    for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
            const int e = levi_civita(i, k, l);
            if (e != 0) {
                out.push_back({static_cast<double>(e), kCoefNormal + k, l});
            }
        }
    }
    for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
            const int e = levi_civita(i, k, l);
            if (e != 0) {
                out.push_back({static_cast<double>(e), kCoefC + 3 * k + l, kBasisValue});
            }
        }
    }
    return out;
}

BilinearForm graddiv_form()
{
    BilinearForm form;
    form.quadrature = {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 1.0}};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            form.terms[3 * i + j].push_back({{1.0, kCoefOne, i}, {1.0, kCoefOne, j}});
        }
    }
    return form;
}

BilinearForm rotrot_form()
{
    BilinearForm form;
    // Degree-2 exact rule.
    const double a = 2.0 / 3.0;
    const double b = 1.0 / 6.0;
    form.quadrature = {{{a, b, b}, 1.0 / 3.0}, {{b, a, b}, 1.0 / 3.0}, {{b, b, a}, 1.0 / 3.0}};
    form.uses_normals = true;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (const auto& ft : rot_factors(i)) {
                for (const auto& fu : rot_factors(j)) {
                    form.terms[3 * i + j].push_back({ft, fu});
                }
            }
        }
    }
    return form;
}

// Zero-valued operator with the mesh sparsity, assembled in place.
void shape(const SparsityPattern& p, int n, SparseOperator& m)
{
    m.resize(n, n);
    m.resizeNonZeros(static_cast<Eigen::Index>(p.inner.size()));
    std::copy(p.outer.begin(), p.outer.end(), m.outerIndexPtr());
    std::copy(p.inner.begin(), p.inner.end(), m.innerIndexPtr());
    std::fill_n(m.valuePtr(), p.inner.size(), 0.0);
}

BlockOperator3 assemble_form(const SurfaceMesh& mesh, const std::vector<Vec3>* normals, const BilinearForm& form,
                             AssemblyStats* stats)
{
    const int n = mesh.num_vertices();
    const int nq = static_cast<int>(form.quadrature.size());
    const auto& pattern = mesh.pattern();
    BlockOperator3 out(n);
    std::array<double*, 9> values{};
    for (int blk = 0; blk < 9; ++blk) {
        if (!form.terms[blk].empty()) {
            auto& m = out.block(blk / 3, blk % 3);
            shape(pattern, n, m);
            values[blk] = m.valuePtr();
        }
    }
    const auto grads = basis_gradients(mesh);
    std::vector<std::array<double, kNumCoefs>> coef(nq);
    std::vector<std::array<std::array<double, 4>, 3>> basis(nq);

    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangle(f);
        const auto& g = grads[f];
        const double area = mesh.face_area(f);
        Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
        if (form.uses_normals) {
            for (int a = 0; a < 3; ++a) {
                c += (*normals)[t[a]] * g[a].transpose();
            }
        }
        for (int q = 0; q < nq; ++q) {
            const auto& bary = form.quadrature[q].bary;
            auto& cq = coef[q];
            cq[kCoefOne] = 1.0;
            if (form.uses_normals) {
                const Vec3 nu = bary[0] * (*normals)[t[0]] + bary[1] * (*normals)[t[1]] + bary[2] * (*normals)[t[2]];
                for (int k = 0; k < 3; ++k) {
                    cq[kCoefNormal + k] = nu[k];
                    for (int l = 0; l < 3; ++l) {
                        cq[kCoefC + 3 * k + l] = c(k, l);
                    }
                }
            }
            for (int a = 0; a < 3; ++a) {
                basis[q][a] = {g[a].x(), g[a].y(), g[a].z(), bary[a]};
            }
        }
        for (int blk = 0; blk < 9; ++blk) {
            const auto& terms = form.terms[blk];
            if (terms.empty()) {
                continue;
            }
            double local[3][3] = {};
            for (int q = 0; q < nq; ++q) {
                const double w = form.quadrature[q].weight * area;
                for (const auto& term : terms) {
                    const double s = w * term.test.sign * term.trial.sign * coef[q][term.test.coef] *
                                     coef[q][term.trial.coef];
                    for (int b = 0; b < 3; ++b) {
                        const double sb = s * basis[q][b][term.test.basis];
                        for (int a = 0; a < 3; ++a) {
                            local[b][a] += sb * basis[q][a][term.trial.basis];
                        }
                    }
                }
            }
            double* v = values[blk];
            const auto& slot = pattern.face_slots[f];
            for (int b = 0; b < 3; ++b) {
                for (int a = 0; a < 3; ++a) {
                    v[slot[3 * b + a]] += local[b][a];
                }
            }
        }
    }

    if (stats != nullptr) {
        *stats = {};
        stats->quadrature_points = nq;
        for (int blk = 0; blk < 9; ++blk) {
            stats->terms[blk] = static_cast<int>(form.terms[blk].size());
            stats->products += static_cast<long long>(mesh.num_faces()) * nq * stats->terms[blk] * 9;
        }
    }
    return out;
}

} // namespace

int AssemblyStats::total_terms() const
{
    int total = 0;
    for (int t : terms) {
        total += t;
    }
    return total;
}

SparseOperator assemble_mass(const SurfaceMesh& mesh, MassKind kind)
{
    const int n = mesh.num_vertices();
    Triplets t;
    if (kind == MassKind::Lumped) {
        for (int v = 0; v < n; ++v) {
            t.emplace_back(v, v, mesh.vertex_area(v));
        }
        return from_triplets(n, n, t);
    }
    t.reserve(static_cast<std::size_t>(9) * mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& tri = mesh.triangle(f);
        const double area = mesh.face_area(f);
        for (int b = 0; b < 3; ++b) {
            for (int a = 0; a < 3; ++a) {
                t.emplace_back(tri[b], tri[a], area * (a == b ? 1.0 / 6.0 : 1.0 / 12.0));
            }
        }
    }
    return from_triplets(n, n, t);
}

std::vector<std::array<Vec3, 3>> basis_gradients(const SurfaceMesh& mesh)
{
    std::vector<std::array<Vec3, 3>> grads(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangle(f);
        const Vec3& n = mesh.face_normal(f);
        const double scale = 1.0 / (2.0 * mesh.face_area(f));
        for (int a = 0; a < 3; ++a) {
            const Vec3 opposite = mesh.position(t[(a + 2) % 3]) - mesh.position(t[(a + 1) % 3]);
            grads[f][a] = scale * n.cross(opposite);
        }
    }
    return grads;
}

SparseOperator assemble_stiffness(const SurfaceMesh& mesh)
{
    const auto grads = basis_gradients(mesh);
    Triplets t;
    t.reserve(static_cast<std::size_t>(9) * mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& tri = mesh.triangle(f);
        const double area = mesh.face_area(f);
        for (int b = 0; b < 3; ++b) {
            for (int a = 0; a < 3; ++a) {
                t.emplace_back(tri[b], tri[a], area * grads[f][b].dot(grads[f][a]));
            }
        }
    }
    return from_triplets(mesh.num_vertices(), mesh.num_vertices(), t);
}

std::vector<Vec3> surface_gradient(const SurfaceMesh& mesh, const ScalarField& f)
{
    if (f.size() != mesh.num_vertices()) {
        throw ParameterError("scalar field size does not match the mesh");
    }
    const auto grads = basis_gradients(mesh);
    std::vector<Vec3> out(mesh.num_faces());
    for (int face = 0; face < mesh.num_faces(); ++face) {
        const auto& t = mesh.triangle(face);
        out[face] = f[t[0]] * grads[face][0] + f[t[1]] * grads[face][1] + f[t[2]] * grads[face][2];
    }
    return out;
}

VectorField3 face_to_vertex(const SurfaceMesh& mesh, const std::vector<Vec3>& per_face)
{
    std::vector<Vec3> sum(mesh.num_vertices(), Vec3::Zero());
    std::vector<double> weight(mesh.num_vertices(), 0.0);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        for (int v : mesh.triangle(f)) {
            sum[v] += mesh.face_area(f) * per_face[f];
            weight[v] += mesh.face_area(f);
        }
    }
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        sum[v] /= weight[v];
    }
    return VectorField3::from_vectors(sum);
}

ScalarField weak_divergence(const SurfaceMesh& mesh, const VectorField3& u)
{
    require_size(mesh, u, "velocity field");
    const auto grads = basis_gradients(mesh);
    ScalarField d = ScalarField::Zero(mesh.num_vertices());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangle(f);
        const Vec3 ub = centroid_value(u, t);
        for (int a = 0; a < 3; ++a) {
            d[t[a]] -= mesh.face_area(f) * ub.dot(grads[f][a]);
        }
    }
    return d;
}

ScalarField div_h(const SurfaceMesh& mesh, const VectorField3& u)
{
    return weak_divergence(mesh, u).cwiseQuotient(mesh.vertex_areas());
}

ScalarField rot_h(const SurfaceMesh& mesh, const std::vector<Vec3>& normals, const VectorField3& u)
{
    return -div_h(mesh, cross(normals, u));
}

BlockOperator3 assemble_graddiv_block(const SurfaceMesh& mesh, AssemblyStats* stats)
{
    static const BilinearForm form = graddiv_form();
    return assemble_form(mesh, nullptr, form, stats);
}

BlockOperator3 assemble_rotrot_block(const SurfaceMesh& mesh, const std::vector<Vec3>& normals, AssemblyStats* stats)
{
    if (static_cast<int>(normals.size()) != mesh.num_vertices()) {
        throw ParameterError("normal count does not match the mesh");
    }
    static const BilinearForm form = rotrot_form();
    return assemble_form(mesh, &normals, form, stats);
}

BlockOperator3 assemble_penalty(const SurfaceMesh& mesh, const std::vector<Vec3>& normals, double alpha)
{
    if (!(alpha >= 0.0)) {
        throw ParameterError("penalty parameter must be non-negative");
    }
    const int n = mesh.num_vertices();
    BlockOperator3 out(n);
    if (alpha == 0.0) {
        return out;
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            Triplets t;
            t.reserve(n);
            for (int v = 0; v < n; ++v) {
                const double value = alpha * mesh.vertex_area(v) * normals[v][i] * normals[v][j];
                if (value != 0.0) {
                    t.emplace_back(v, v, value);
                }
            }
            out.block(i, j) = from_triplets(n, n, t);
        }
    }
    return out;
}

BlockOperator3 assemble_curvature_term(const SurfaceMesh& mesh, const ScalarField& kappa)
{
    if (kappa.size() != mesh.num_vertices()) {
        throw ParameterError("curvature field size does not match the mesh");
    }
    const int n = mesh.num_vertices();
    Triplets t;
    t.reserve(static_cast<std::size_t>(9) * mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& tri = mesh.triangle(f);
        const double area = mesh.face_area(f);
        for (int b = 0; b < 3; ++b) {
            for (int a = 0; a < 3; ++a) {
                // integral phi_a phi_b phi_c: A/10 (all equal), A/30 (two equal), A/60 (distinct).
                double sum = 0.0;
                for (int c = 0; c < 3; ++c) {
                    const int equal = (a == b) + (b == c) + (a == c);
                    const double w = equal == 3 ? 1.0 / 10.0 : (equal == 1 ? 1.0 / 30.0 : 1.0 / 60.0);
                    sum += w * kappa[tri[c]];
                }
                t.emplace_back(tri[b], tri[a], 2.0 * area * sum);
            }
        }
    }
    return BlockOperator3::diagonal(from_triplets(n, n, t));
}

BlockOperator3 assemble_advection_p2(const SurfaceMesh& mesh, const std::vector<Vec3>& normals, const VectorField3& w)
{
    require_size(mesh, w, "advecting field");
    const int n = mesh.num_vertices();
    const auto grads = basis_gradients(mesh);
    std::array<Triplets, 9> triplets;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangle(f);
        Vec3 coef = Vec3::Zero();
        for (int a = 0; a < 3; ++a) {
            coef += normals[t[a]].cross(w.at(t[a])) / 3.0;
        }
        const double third = mesh.face_area(f) / 3.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                for (int b = 0; b < 3; ++b) {
                    for (int a = 0; a < 3; ++a) {
                        triplets[3 * i + j].emplace_back(t[b], t[a], third * coef[i] * grads[f][a][j]);
                    }
                }
            }
        }
    }
    BlockOperator3 out(n);
    for (int blk = 0; blk < 9; ++blk) {
        out.block(blk / 3, blk % 3) = from_triplets(n, n, triplets[blk]);
    }
    return out;
}

BlockOperator3 assemble_advection_p1(const SurfaceMesh& mesh, const std::vector<Vec3>& normals, const VectorField3& v)
{
    require_size(mesh, v, "advecting field");
    const int n = mesh.num_vertices();
    const auto grads = basis_gradients(mesh);
    std::array<Triplets, 9> triplets;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangle(f);
        Vec3 coef = Vec3::Zero();
        Vec3 nu = Vec3::Zero();
        Vec3 c = Vec3::Zero();
        for (int a = 0; a < 3; ++a) {
            coef += normals[t[a]].cross(v.at(t[a])) / 3.0;
            nu += normals[t[a]] / 3.0;
            c += normals[t[a]].cross(grads[f][a]);
        }
        // rot u at the centroid = sum_a u_a . r_a
        std::array<Vec3, 3> r;
        for (int a = 0; a < 3; ++a) {
            r[a] = nu.cross(grads[f][a]) + c / 3.0;
        }
        const double third = mesh.face_area(f) / 3.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                for (int b = 0; b < 3; ++b) {
                    for (int a = 0; a < 3; ++a) {
                        triplets[3 * i + j].emplace_back(t[b], t[a], third * coef[i] * r[a][j]);
                    }
                }
            }
        }
    }
    BlockOperator3 out(n);
    for (int blk = 0; blk < 9; ++blk) {
        out.block(blk / 3, blk % 3) = from_triplets(n, n, triplets[blk]);
    }
    return out;
}

ScalarField assemble_pressure_rhs_p1(const SurfaceMesh& mesh, const VectorField3& v)
{
    return -weak_divergence(mesh, v);
}

ScalarField assemble_pressure_rhs_p2(const SurfaceMesh& mesh, const VectorField3& w)
{
    require_size(mesh, w, "rotated velocity");
    const auto grads = basis_gradients(mesh);
    ScalarField load = ScalarField::Zero(mesh.num_vertices());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangle(f);
        const Vec3 rotated = mesh.face_normal(f).cross(centroid_value(w, t));
        for (int a = 0; a < 3; ++a) {
            load[t[a]] -= mesh.face_area(f) * rotated.dot(grads[f][a]);
        }
    }
    return load;
}

VectorField3 vertex_gradient(const SurfaceMesh& mesh, const ScalarField& p)
{
    return face_to_vertex(mesh, surface_gradient(mesh, p));
}

VectorField3 vertex_rotated_gradient(const SurfaceMesh& mesh, const ScalarField& p)
{
    auto g = surface_gradient(mesh, p);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        g[f] = mesh.face_normal(f).cross(g[f]);
    }
    return face_to_vertex(mesh, g);
}

} // namespace sns
