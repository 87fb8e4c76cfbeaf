#include "sns/cli/bench.hpp"

#include "sns/errors.hpp"
#include "sns/geometry.hpp"

#include <algorithm>
#include <chrono>

namespace sns::cli {

namespace {

template <class F>
double time_once(F&& f)
{
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

double median(std::vector<double> values)
{
    if (values.empty()) {
        throw ParameterError("median of an empty list");
    }
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

BenchRow bench_assembly(const SurfaceMesh& mesh, int repetitions)
{
    if (repetitions < 1) {
        throw ParameterError("bench_assembly needs at least one repetition");
    }
    const auto normals = vertex_normals(mesh);
    std::vector<double> rr;
    std::vector<double> gd;
    long long sink = 0;
    for (int k = 0; k < repetitions; ++k) {
        rr.push_back(time_once([&] { sink += assemble_rotrot_block(mesh, normals).nonzeros(); }));
        gd.push_back(time_once([&] { sink += assemble_graddiv_block(mesh).nonzeros(); }));
    }
    if (sink == 0) {
        throw Error("assembly produced empty operators");
    }
    BenchRow row;
    row.dofs = 3 * mesh.num_vertices();
    row.t_rotrot = median(rr);
    row.t_graddiv = median(gd);
    row.ratio = row.t_rotrot / row.t_graddiv;
    return row;
}

TermAudit term_audit(const SurfaceMesh& mesh)
{
    TermAudit audit;
    (void)assemble_rotrot_block(mesh, vertex_normals(mesh), &audit.rotrot);
    (void)assemble_graddiv_block(mesh, &audit.graddiv);
    return audit;
}

} // namespace sns::cli
