#include "sns/levelset.hpp"

#include "sns/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

namespace sns {

Vec3 axis_vector(Axis axis)
{
    switch (axis) {
    case Axis::X:
        return Vec3::UnitX();
    case Axis::Y:
        return Vec3::UnitY();
    case Axis::Z:
        return Vec3::UnitZ();
    }
    return Vec3::UnitY();
}

void LevelSetNTorus::validate() const
{
    if (midpoints.empty()) {
        throw ParameterError("level set needs at least one torus midpoint");
    }
    if (!(minor_radius > 0.0) || !(major_radius > minor_radius)) {
        throw ParameterError("torus radii must satisfy R > r > 0");
    }
    if (midpoints.size() >= 2 && !(delta > 0.0)) {
        throw ParameterError("level-set offset delta must be positive for n >= 2");
    }
}

namespace {

struct TorusTerm {
    double value;
    Vec3 gradient;
    Eigen::Matrix3d hessian;
};

TorusTerm torus_term(const LevelSetNTorus& ls, const Vec3& x, bool with_hessian)
{
    const Vec3 a = axis_vector(ls.axis);
    const double big = ls.major_radius * ls.major_radius;
    const double c = big - ls.minor_radius * ls.minor_radius;
    const double s = x.squaredNorm();
    const double along = x.dot(a);
    const double q = s - along * along;
    const Vec3 radial = x - along * a;

    TorusTerm t;
    t.value = (s + c) * (s + c) - 4.0 * big * q;
    t.gradient = 4.0 * (s + c) * x - 8.0 * big * radial;
    if (with_hessian) {
        const Eigen::Matrix3d eye = Eigen::Matrix3d::Identity();
        t.hessian = 4.0 * (s + c) * eye + 8.0 * x * x.transpose() - 8.0 * big * (eye - a * a.transpose());
    } else {
        t.hessian.setZero();
    }
    return t;
}

std::vector<TorusTerm> all_terms(const LevelSetNTorus& ls, const Vec3& x, bool with_hessian)
{
    std::vector<TorusTerm> terms;
    terms.reserve(ls.midpoints.size());
    for (const auto& m : ls.midpoints) {
        terms.push_back(torus_term(ls, x - m, with_hessian));
    }
    return terms;
}

// Product of all term values except those at indices skip0 and skip1.
double product_except(const std::vector<TorusTerm>& terms, std::size_t skip0, std::size_t skip1)
{
    double p = 1.0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        if (k != skip0 && k != skip1) {
            p *= terms[k].value;
        }
    }
    return p;
}

} // namespace

LevelSetSample eval_levelset(const LevelSetNTorus& ls, const Vec3& x)
{
    const auto terms = all_terms(ls, x, false);
    const std::size_t none = terms.size();
    LevelSetSample out;
    out.value = product_except(terms, none, none) - static_cast<double>(terms.size() - 1) * ls.delta;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        out.gradient += product_except(terms, i, none) * terms[i].gradient;
    }
    return out;
}

Eigen::Matrix3d levelset_hessian(const LevelSetNTorus& ls, const Vec3& x)
{
    const auto terms = all_terms(ls, x, true);
    const std::size_t none = terms.size();
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        h += product_except(terms, i, none) * terms[i].hessian;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            if (j != i) {
                h += product_except(terms, i, j) * terms[i].gradient * terms[j].gradient.transpose();
            }
        }
    }
    return h;
}

double levelset_gaussian_curvature(const LevelSetNTorus& ls, const Vec3& x)
{
    const Vec3 g = eval_levelset(ls, x).gradient;
    const Eigen::Matrix3d h = levelset_hessian(ls, x);
    const double g2 = g.squaredNorm();
    if (!(g2 > 0.0)) {
        throw GeometryError("level-set gradient vanishes; curvature undefined");
    }
    // g^T adj(H) g / |g|^4
    Eigen::Matrix3d adj;
    adj(0, 0) = h(1, 1) * h(2, 2) - h(1, 2) * h(2, 1);
    adj(0, 1) = h(0, 2) * h(2, 1) - h(0, 1) * h(2, 2);
    adj(0, 2) = h(0, 1) * h(1, 2) - h(0, 2) * h(1, 1);
    adj(1, 0) = h(1, 2) * h(2, 0) - h(1, 0) * h(2, 2);
    adj(1, 1) = h(0, 0) * h(2, 2) - h(0, 2) * h(2, 0);
    adj(1, 2) = h(0, 2) * h(1, 0) - h(0, 0) * h(1, 2);
    adj(2, 0) = h(1, 0) * h(2, 1) - h(1, 1) * h(2, 0);
    adj(2, 1) = h(0, 1) * h(2, 0) - h(0, 0) * h(2, 1);
    adj(2, 2) = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
    return g.dot(adj * g) / (g2 * g2);
}

Vec3 project_to_levelset(const LevelSetNTorus& ls, const Vec3& x, double tol)
{
    Vec3 p = x;
    for (int it = 0; it < 100; ++it) {
        const auto s = eval_levelset(ls, p);
        const double g2 = s.gradient.squaredNorm();
        if (!(g2 > 0.0)) {
            throw GeometryError("level-set gradient vanishes during projection");
        }
        const Vec3 step = s.value / g2 * s.gradient;
        p -= step;
        if (step.norm() < tol * ls.major_radius) {
            const auto after = eval_levelset(ls, p);
            if (std::abs(after.value) / after.gradient.norm() < tol * ls.major_radius) {
                return p;
            }
        }
    }
    return p;
}

namespace {

// Kuhn decomposition of the unit cube into six tetrahedra sharing the main
// diagonal. Corner c has offset (c & 1, (c >> 1) & 1, (c >> 2) & 1). The
// decomposition matches across neighbouring cubes, so the output is watertight.
constexpr std::array<std::array<int, 4>, 6> kTets = {{
    {0, 1, 3, 7},
    {0, 1, 5, 7},
    {0, 2, 3, 7},
    {0, 2, 6, 7},
    {0, 4, 5, 7},
    {0, 4, 6, 7},
}};

struct Grid {
    Vec3 origin;
    double h = 0.0;
    std::array<int, 3> nodes{};

    [[nodiscard]] long index(int i, int j, int k) const
    {
        return (static_cast<long>(k) * nodes[1] + j) * nodes[0] + i;
    }
    [[nodiscard]] Vec3 point(int i, int j, int k) const { return origin + h * Vec3(i, j, k); }
};

struct EdgeKeyHash {
    std::size_t operator()(const std::pair<long, long>& e) const
    {
        return std::hash<long>()(e.first * 1000003L) ^ std::hash<long>()(e.second);
    }
};

} // namespace

SurfaceMesh extract_levelset_mesh(const LevelSetNTorus& ls, int grid_resolution,
                                  const ExtractionOptions& options)
{
    ls.validate();
    if (grid_resolution < 8) {
        throw ParameterError("grid resolution must be at least 8");
    }

    const double reach = ls.major_radius + ls.minor_radius;
    Vec3 lo = ls.midpoints.front();
    Vec3 hi = ls.midpoints.front();
    for (const auto& m : ls.midpoints) {
        lo = lo.cwiseMin(m);
        hi = hi.cwiseMax(m);
    }
    lo.array() -= reach;
    hi.array() += reach;
    const double longest = (hi - lo).maxCoeff();
    Grid grid;
    grid.h = longest / grid_resolution;
    lo.array() -= 2.0 * grid.h;
    hi.array() += 2.0 * grid.h;
    grid.origin = lo;
    for (int d = 0; d < 3; ++d) {
        grid.nodes[d] = static_cast<int>(std::ceil((hi[d] - lo[d]) / grid.h)) + 1;
    }

    // The quartic products span many orders of magnitude; only signs and
    // linear interpolation weights are used, so raw values are fine.
    std::vector<double> values(static_cast<std::size_t>(grid.nodes[0]) * grid.nodes[1] * grid.nodes[2]);
    for (int k = 0; k < grid.nodes[2]; ++k) {
        for (int j = 0; j < grid.nodes[1]; ++j) {
            for (int i = 0; i < grid.nodes[0]; ++i) {
                double v = eval_levelset(ls, grid.point(i, j, k)).value;
                if (v == 0.0) {
                    v = std::numeric_limits<double>::min();
                }
                values[grid.index(i, j, k)] = v;
            }
        }
    }

    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::unordered_map<std::pair<long, long>, int, EdgeKeyHash> edge_vertex;

    auto crossing = [&](long a, const Vec3& pa, long b, const Vec3& pb) {
        const auto key = std::make_pair(std::min(a, b), std::max(a, b));
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) {
            return it->second;
        }
        const double va = values[a];
        const double vb = values[b];
        const double t = va / (va - vb);
        vertices.push_back(pa + t * (pb - pa));
        const int id = static_cast<int>(vertices.size()) - 1;
        edge_vertex.emplace(key, id);
        return id;
    };

    // Orientation is decided on the edge-midpoint cross-section, which is never
    // degenerate, even when interpolated crossings nearly coincide.
    auto emit = [&](int a, int b, int c, const std::array<Vec3, 3>& mids, const Vec3& inside_to_outside) {
        const Vec3 n = (mids[1] - mids[0]).cross(mids[2] - mids[0]);
        if (n.dot(inside_to_outside) >= 0.0) {
            triangles.push_back({a, b, c});
        } else {
            triangles.push_back({a, c, b});
        }
    };

    for (int k = 0; k + 1 < grid.nodes[2]; ++k) {
        for (int j = 0; j + 1 < grid.nodes[1]; ++j) {
            for (int i = 0; i + 1 < grid.nodes[0]; ++i) {
                std::array<long, 8> id{};
                std::array<Vec3, 8> pos;
                for (int c = 0; c < 8; ++c) {
                    const int di = c & 1;
                    const int dj = (c >> 1) & 1;
                    const int dk = (c >> 2) & 1;
                    id[c] = grid.index(i + di, j + dj, k + dk);
                    pos[c] = grid.point(i + di, j + dj, k + dk);
                }
                for (const auto& tet : kTets) {
                    std::array<int, 4> inside{};
                    std::array<int, 4> outside{};
                    int n_in = 0;
                    int n_out = 0;
                    for (int c : tet) {
                        if (values[id[c]] < 0.0) {
                            inside[n_in++] = c;
                        } else {
                            outside[n_out++] = c;
                        }
                    }
                    if (n_in == 0 || n_out == 0) {
                        continue;
                    }
                    Vec3 in_centre = Vec3::Zero();
                    Vec3 out_centre = Vec3::Zero();
                    for (int q = 0; q < n_in; ++q) {
                        in_centre += pos[inside[q]] / n_in;
                    }
                    for (int q = 0; q < n_out; ++q) {
                        out_centre += pos[outside[q]] / n_out;
                    }
                    const Vec3 dir = out_centre - in_centre;
                    auto x = [&](int a, int b) { return crossing(id[a], pos[a], id[b], pos[b]); };
                    auto m = [&](int a, int b) { return Vec3(0.5 * (pos[a] + pos[b])); };
                    if (n_in == 1) {
                        const int a = inside[0];
                        const auto [o0, o1, o2] = std::array<int, 3>{outside[0], outside[1], outside[2]};
                        emit(x(a, o0), x(a, o1), x(a, o2), {m(a, o0), m(a, o1), m(a, o2)}, dir);
                    } else if (n_out == 1) {
                        const int b = outside[0];
                        const auto [i0, i1, i2] = std::array<int, 3>{inside[0], inside[1], inside[2]};
                        emit(x(i0, b), x(i1, b), x(i2, b), {m(i0, b), m(i1, b), m(i2, b)}, dir);
                    } else {
                        const int a = inside[0];
                        const int b = inside[1];
                        const int c = outside[0];
                        const int d = outside[1];
                        const int ac = x(a, c);
                        const int ad = x(a, d);
                        const int bd = x(b, d);
                        const int bc = x(b, c);
                        emit(ac, ad, bd, {m(a, c), m(a, d), m(b, d)}, dir);
                        emit(ac, bd, bc, {m(a, c), m(b, d), m(b, c)}, dir);
                    }
                }
            }
        }
    }

    for (auto& p : vertices) {
        p = project_to_levelset(ls, p);
    }

    // Tangential smoothing needs adjacency; build it once from the faces.
    std::vector<std::vector<int>> neighbours(vertices.size());
    for (const auto& t : triangles) {
        for (int q = 0; q < 3; ++q) {
            neighbours[t[q]].push_back(t[(q + 1) % 3]);
            neighbours[t[q]].push_back(t[(q + 2) % 3]);
        }
    }
    for (auto& nb : neighbours) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    for (int pass = 0; pass < options.smoothing_passes; ++pass) {
        std::vector<Vec3> next(vertices.size());
        for (std::size_t v = 0; v < vertices.size(); ++v) {
            if (neighbours[v].empty()) {
                next[v] = vertices[v];
                continue;
            }
            Vec3 centre = Vec3::Zero();
            for (int u : neighbours[v]) {
                centre += vertices[u];
            }
            centre /= static_cast<double>(neighbours[v].size());
            const Vec3 g = eval_levelset(ls, vertices[v]).gradient;
            const Vec3 n = g.normalized();
            Vec3 move = options.smoothing_weight * (centre - vertices[v]);
            move -= n * n.dot(move);
            next[v] = project_to_levelset(ls, vertices[v] + move);
        }
        vertices = std::move(next);
    }

    try {
        SurfaceMesh mesh(std::move(vertices), std::move(triangles));
        require_genus(mesh, ls.genus());
        return mesh;
    } catch (const TopologyError& e) {
        throw ExtractionError(std::string("level-set extraction failed (") + e.what() +
                              "); increase the grid resolution");
    }
}

} // namespace sns
