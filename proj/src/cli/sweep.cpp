#include "sns/cli/sweep.hpp"

#include "sns/diagnostics.hpp"
#include "sns/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <string>
#include <thread>

namespace sns::cli {

void validate_alphas(const std::vector<double>& alphas)
{
    if (alphas.size() < 3) {
        throw ConfigError("an alpha sweep needs at least three values, got " + std::to_string(alphas.size()));
    }
    std::set<double> seen;
    for (double a : alphas) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw ConfigError("alpha values must be positive and finite");
        }
        if (!seen.insert(a).second) {
            throw ConfigError("alpha value " + std::to_string(a) + " appears more than once");
        }
    }
}

SweepRun run_alpha(const SurfaceMesh& mesh, SimConfig config, double alpha)
{
    config.alpha = alpha;
    config.defects_every = 0;
    SweepRun run;
    run.alpha = alpha;
    (void)run_simulation(mesh, config, [&](const SimulationState& s, const VectorField3& v, const DiagnosticsRecord& r) {
        run.step_times.push_back(r.t);
        run.normal_norms.push_back(r.normal_norm);
        if (s.step % config.output_every == 0) {
            run.sample_times.push_back(r.t);
            run.samples.push_back(v);
        }
    });
    return run;
}

std::vector<SweepPoint> sweep_errors(const std::vector<SweepRun>& runs, const SparseOperator& mass)
{
    if (runs.empty()) {
        throw ParameterError("sweep_errors: no runs");
    }
    const auto ref = std::max_element(runs.begin(), runs.end(),
                                      [](const SweepRun& a, const SweepRun& b) { return a.alpha < b.alpha; });
    std::vector<SweepPoint> points;
    for (const auto& run : runs) {
        if (run.sample_times != ref->sample_times) {
            throw ParameterError("sweep_errors: runs were sampled at different times");
        }
        std::vector<double> distance;
        for (std::size_t k = 0; k < run.samples.size(); ++k) {
            distance.push_back(l2_norm(run.samples[k] - ref->samples[k], mass));
        }
        points.push_back({run.alpha, spacetime_norm(distance, run.sample_times),
                          spacetime_norm(run.normal_norms, run.step_times)});
    }
    std::sort(points.begin(), points.end(), [](const SweepPoint& a, const SweepPoint& b) { return a.alpha < b.alpha; });
    return points;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw ParameterError("loglog_slope needs two or more matching samples");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0 && y[k] > 0.0)) {
            throw ParameterError("loglog_slope needs positive samples");
        }
        const double lx = std::log(x[k]);
        const double ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (!(denom > 0.0)) {
        throw ParameterError("loglog_slope needs distinct x values");
    }
    return (n * sxy - sx * sy) / denom;
}

double sweep_slope(const std::vector<SweepPoint>& points)
{
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
        x.push_back(points[k].alpha);
        y.push_back(points[k].error);
    }
    return loglog_slope(x, y);
}

std::vector<SweepPoint> alpha_sweep(const SurfaceMesh& mesh, const SimConfig& config,
                                    const std::vector<double>& alphas, int threads, const SweepProgress& progress)
{
    validate_alphas(alphas);
    std::vector<SweepRun> runs(alphas.size());
    std::atomic<std::size_t> next{0};
    std::mutex lock;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t k = next++; k < alphas.size(); k = next++) {
            try {
                runs[k] = run_alpha(mesh, config, alphas[k]);
                const std::lock_guard<std::mutex> guard(lock);
                if (progress) {
                    progress(runs[k]);
                }
            } catch (...) {
                const std::lock_guard<std::mutex> guard(lock);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = alphas.size();
            }
        }
    };
    const int n = std::clamp(threads, 1, static_cast<int>(alphas.size()));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return sweep_errors(runs, build_operators(mesh, config).mass);
}

int threads_from_environment()
{
    const char* value = std::getenv("SNS_THREADS");
    if (value == nullptr) {
        return 1;
    }
    char* end = nullptr;
    const long n = std::strtol(value, &end, 10);
    if (end == value || *end != '\0' || n < 1 || n > 1024) {
        throw ConfigError(std::string("SNS_THREADS must be a positive integer, got '") + value + "'");
    }
    return static_cast<int>(n);
}

} // namespace sns::cli
