#include "hmp/flow.hpp"

#include <fmt/format.h>

#include <cmath>

namespace hmp
{

namespace
{

double max_stiffness(const MapField& field, const Potential& pot, KernelBackend backend)
{
    if (backend == KernelBackend::serial)
        return kernels::serial::max_stiffness(field.grid(), field.chart(), pot, field.values());
    return kernels::omp::max_stiffness(field.grid(), field.chart(), pot, field.values());
}

double dt_from_stiffness(const DomainGrid& grid, double stiffness, double safety)
{
    const double h2 = grid.h() * grid.h();
    const double n = grid.dim();
    return safety * h2 / (2.0 * n) / (1.0 + h2 * stiffness / (4.0 * n));
}

kernels::SweepResult sweep(const MapField& field, const Potential& pot, const std::vector<std::int64_t>& sources,
                           std::vector<double>& out, double dt, KernelBackend backend)
{
    if (backend == KernelBackend::serial)
        return kernels::serial::flow_sweep(field.grid(), field.chart(), pot, sources, field.values(), out, dt);
    return kernels::omp::flow_sweep(field.grid(), field.chart(), pot, sources, field.values(), out, dt);
}

[[noreturn]] void report_chart_exit(const MapField& field, std::int64_t node, long step)
{
    const auto x = field.grid().coordinate(static_cast<std::size_t>(node));
    throw ChartDomainError(fmt::format("update at step {} moved node {} (x = [{}]) outside the chart", step, node,
                                       fmt::join(x.begin(), x.begin() + field.grid().dim(), ", ")));
}

} // namespace

double stable_dt(const MapField& field, const Potential& potential, double safety, KernelBackend backend)
{
    if (!(safety > 0.0 && safety <= 1.0))
        throw ConfigError(fmt::format("flow.dt_safety must be in (0, 1], got {}", safety));
    return dt_from_stiffness(field.grid(), max_stiffness(field, potential, backend), safety);
}

MapField step(const MapField& field, const Potential& potential, double dt, KernelBackend backend)
{
    if (!(dt > 0.0))
        throw ConfigError("dt must be positive");
    const double limit = stable_dt(field, potential, 1.0, backend);
    if (dt > limit)
        throw ConfigError(fmt::format("dt = {} exceeds the stability limit {}", dt, limit));
    MapField next = field;
    const auto sources = kernels::quadrature_sources(field.grid(), field.m());
    const auto res = sweep(field, potential, sources, next.values(), dt, backend);
    if (res.bad_node >= 0)
        report_chart_exit(field, res.bad_node, 0);
    return next;
}

double energy(const MapField& field, const Potential& potential)
{
    const auto der = derive(field, potential);
    std::vector<double> integrand(field.grid().num_nodes(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t node : field.grid().valued_nodes())
        if (der.has_jet[node])
            integrand[node] = der.energy[node] - der.potential[node];
    return Quadrature(field.grid_ptr()).integrate(integrand);
}

FlowResult run_to_convergence(const MapField& field, const Potential& potential, const FlowOptions& options)
{
    if (!(options.tol > 0.0))
        throw ConfigError("flow.tol must be positive");
    if (options.max_steps < 0)
        throw ConfigError("flow.max_steps must be non-negative");
    if (options.log_every < 1 || options.stiffness_every < 1)
        throw ConfigError("flow.log_every must be positive");
    field.require_chart_valid();

    FlowResult result(field);
    if (std::isinf(options.tol)) {
        result.converged = true;
        return result;
    }

    const auto& grid = field.grid();
    const auto sources = kernels::quadrature_sources(grid, field.m());
    MapField next = field;
    MapField* cur = &result.field;
    MapField* nxt = &next;

    double dt = 0.0;
    double prev_energy = 0.0;
    double prev_sup = 0.0;
    double prev_delta = 0.0;
    long k = 0;
    for (;; ++k) {
        if (k % options.stiffness_every == 0)
            dt = dt_from_stiffness(grid, max_stiffness(*cur, potential, options.backend), options.dt_safety);
        // Boundary values never change, so nxt keeps them from the copy above.
        const auto res = sweep(*cur, potential, sources, nxt->values(), dt, options.backend);
        const double l2 = std::sqrt(res.residual_l2_sq);

        if (k > 0) {
            const double rise = res.energy - prev_energy;
            const double floor = 1e-13 * (1.0 + std::abs(prev_energy));
            const double excess = rise - prev_delta - floor;
            result.max_energy_rise = std::max(result.max_energy_rise, rise);
            result.worst_dissipation_excess = std::max(result.worst_dissipation_excess, excess);
            if (excess > 0.0) {
                ++result.dissipation_violations;
                if (res.residual_sup > prev_sup)
                    throw StabilityError(fmt::format(
                        "energy rose by {:.3e} (allowed {:.3e}) at step {} while the residual grew to {:.3e}", rise,
                        prev_delta + floor, k, res.residual_sup));
            }
        }
        if (!std::isfinite(res.energy) || !std::isfinite(res.residual_sup))
            throw StabilityError(fmt::format("non-finite energy or residual at step {}", k));

        const bool done = res.residual_sup <= options.tol || k >= options.max_steps;
        if (k % options.log_every == 0 || done)
            result.history.push_back({k, res.energy, res.residual_sup, l2});
        if (done) {
            result.converged = res.residual_sup <= options.tol;
            result.residual_sup = res.residual_sup;
            result.residual_l2 = l2;
            result.energy = res.energy;
            break;
        }
        if (res.bad_node >= 0)
            report_chart_exit(*cur, res.bad_node, k);

        prev_energy = res.energy;
        prev_sup = res.residual_sup;
        prev_delta = 10.0 * dt * res.residual_sup * res.residual_sup;
        std::swap(cur, nxt);
    }
    if (cur != &result.field)
        result.field = *cur;
    result.steps = k;
    result.dt = dt;
    return result;
}

} // namespace hmp
