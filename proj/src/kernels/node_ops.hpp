#pragma once

// Per-node bodies shared by the serial and OpenMP loops.

#include "hmp/kernels.hpp"

#include <fmt/format.h>

#include <limits>

namespace hmp::kernels::detail
{

struct NodeUpdate
{
    double residual_g = 0.0; // |R|_g
    bool left_chart = false;
};

inline NodeUpdate update_node(const DomainGrid& grid, const TargetChart& chart, const Potential& pot,
                              const double* in, double* out, std::size_t node, double dt)
{
    const int m = chart.dim();
    double jet[kMaxJet];
    double tau[kMaxDim];
    double grad[kMaxDim];
    if (!differential_at(grid, m, in, node, jet) || !tension_at(grid, chart, in, node, jet, tau))
        throw IndexError(fmt::format("active node {} lacks a complete stencil", node));
    const double* y = in + node * m;
    pot.gradient_at(chart, y, grad);
    double q = 0.0;
    double rr = 0.0;
    double* y_new = out + node * m;
    for (int a = 0; a < m; ++a) {
        const double r = tau[a] + grad[a];
        q += y[a] * y[a];
        rr += r * r;
        y_new[a] = y[a] + dt * r;
    }
    NodeUpdate u;
    u.residual_g = chart.omega(q) * std::sqrt(rr);
    u.left_chart = !chart.is_valid(y_new) || !std::isfinite(u.residual_g);
    return u;
}

/// w * (e - V) at a quadrature node, read from its source node.
inline double energy_node(const DomainGrid& grid, const TargetChart& chart, const Potential& pot, const double* in,
                          const std::vector<std::int64_t>& sources, std::size_t node)
{
    const auto src = sources[node];
    if (src < 0)
        throw IndexError(fmt::format("quadrature node {} has no integrand source", node));
    const int m = chart.dim();
    double jet[kMaxJet];
    differential_at(grid, m, in, static_cast<std::size_t>(src), jet);
    const double* y = in + src * m;
    return grid.region_weights()[node] * (energy_density_of(chart, grid.dim(), y, jet) - pot.value_at(chart, y));
}

inline void derive_node(const DomainGrid& grid, const TargetChart& chart, const Potential& pot, const double* in,
                        std::size_t node, DerivedFields& out)
{
    const int n = grid.dim();
    const int m = chart.dim();
    const double* y = in + node * m;
    double* jet = out.jet.data() + node * n * m;
    out.potential[node] = pot.value_at(chart, y);
    if (!differential_at(grid, m, in, node, jet))
        return;
    out.has_jet[node] = 1;
    out.energy[node] = energy_density_of(chart, n, y, jet);
    if (grid.state(node) != NodeState::active)
        return;
    double* tau = out.tension.data() + node * m;
    if (!tension_at(grid, chart, in, node, jet, tau))
        return;
    out.has_tension[node] = 1;
    double grad[kMaxDim];
    pot.gradient_at(chart, y, grad);
    for (int a = 0; a < m; ++a)
        out.residual[node * m + a] = tau[a] + grad[a];
}

inline void reset_derived(const DomainGrid& grid, int m, DerivedFields& out)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::size_t total = grid.num_nodes();
    out.n = grid.dim();
    out.m = m;
    out.jet.assign(total * grid.dim() * m, nan);
    out.energy.assign(total, nan);
    out.potential.assign(total, nan);
    out.tension.assign(total * m, nan);
    out.residual.assign(total * m, nan);
    out.has_jet.assign(total, 0);
    out.has_tension.assign(total, 0);
}

} // namespace hmp::kernels::detail
