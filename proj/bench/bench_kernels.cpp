// Serial vs OpenMP timing of the flow sweep and derived-field kernels.
//
//   bench_kernels [--dim 2] [--nodes-per-axis 256] [--repeats 20]

#include "hmp/kernels.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include <chrono>
#include <memory>
#include <random>

using namespace hmp;

namespace
{

template <class F>
double seconds_per_call(int repeats, F&& f)
{
    f(); // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r)
        f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / repeats;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"kernel benchmark"};
    int dim = 2, per_axis = 256, repeats = 20;
    app.add_option("--dim", dim, "domain dimension (1..3)");
    app.add_option("--nodes-per-axis", per_axis, "lattice nodes per axis");
    app.add_option("--repeats", repeats, "timed calls per kernel");
    CLI11_PARSE(app, argc, argv);

    GridSpec spec;
    spec.dim = dim;
    spec.region = RegionKind::box;
    spec.h = 1.0 / (per_axis - 1);
    spec.lower = {0.0, 0.0, 0.0};
    spec.upper = {1.0, 1.0, 1.0};
    spec.bc = BoundaryCondition::dirichlet;
    const DomainGrid grid(spec);

    const TargetChart chart(GeometryKind::sphere_stereographic, 2, 1.0);
    const Potential pot(PotentialKind::cosine_of_distance, {0.5, 1.0}, chart);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uni(-0.3, 0.3);
    std::vector<double> in(grid.num_nodes() * 2);
    for (double& v : in)
        v = uni(rng);
    std::vector<double> out = in;
    const auto sources = kernels::quadrature_sources(grid, 2);
    const double dt = 1e-3 * spec.h * spec.h;

    fmt::print("grid {}^{} = {} nodes, {} OpenMP threads\n", per_axis, dim, grid.num_nodes(), omp_get_max_threads());
    fmt::print("{:<16} {:>14} {:>14} {:>9}\n", "kernel", "serial [ms]", "openmp [ms]", "speedup");

    auto row = [&](const char* name, double ts, double to) {
        fmt::print("{:<16} {:>14.3f} {:>14.3f} {:>9.2f}\n", name, 1e3 * ts, 1e3 * to, ts / to);
    };
    row("flow_sweep",
        seconds_per_call(repeats, [&] { kernels::serial::flow_sweep(grid, chart, pot, sources, in, out, dt); }),
        seconds_per_call(repeats, [&] { kernels::omp::flow_sweep(grid, chart, pot, sources, in, out, dt); }));
    kernels::DerivedFields d;
    row("derived_fields", seconds_per_call(repeats, [&] { kernels::serial::derived_fields(grid, chart, pot, in, d); }),
        seconds_per_call(repeats, [&] { kernels::omp::derived_fields(grid, chart, pot, in, d); }));
    row("max_stiffness", seconds_per_call(repeats, [&] { kernels::serial::max_stiffness(grid, chart, pot, in); }),
        seconds_per_call(repeats, [&] { kernels::omp::max_stiffness(grid, chart, pot, in); }));
    return 0;
}
