#pragma once

#include "hmp/fields.hpp"

#include <limits>
#include <vector>

namespace hmp
{

enum class KernelBackend
{
    openmp,
    serial,
};

/**
 * Largest explicit Euler step times `safety`.
 *
 * The update is y <- y + dt (Lap y + Q(y, dy)) with Lap the (2n+1)-point
 * Laplacian (spectral radius 4n/h^2) and Q Lipschitz with constant L estimated
 * node-wise by kernels::stiffness_at. Stability of the linearized step needs
 * dt (4n/h^2 + L) <= 2, so
 *
 *     dt = safety * h^2 / (2n) / (1 + h^2 L / (4n)).
 *
 * safety = 1 is the limit itself.
 */
double stable_dt(const MapField& field, const Potential& potential, double safety,
                 KernelBackend backend = KernelBackend::openmp);

/// One explicit Euler step phi <- phi + dt (tau + grad V) on the active nodes.
/// ConfigError if dt exceeds the stability limit, ChartDomainError on chart exit.
MapField step(const MapField& field, const Potential& potential, double dt,
              KernelBackend backend = KernelBackend::openmp);

/// E = integral of 1/2 |d phi|^2 - V(phi) over the region.
double energy(const MapField& field, const Potential& potential);

struct FlowOptions
{
    double tol = 1e-8;
    long max_steps = 1'000'000;
    double dt_safety = 0.2;
    long log_every = 100;
    /// Steps between refreshes of the stiffness estimate (and so of dt).
    long stiffness_every = 100;
    KernelBackend backend = KernelBackend::openmp;
};

struct FlowHistoryRow
{
    long step = 0;
    double energy = 0.0;
    double residual_sup = 0.0;
    double residual_l2 = 0.0;
};

struct FlowResult
{
    explicit FlowResult(MapField f) : field(std::move(f)) {}

    MapField field;
    bool converged = false;
    long steps = 0;
    double dt = 0.0;
    double residual_sup = 0.0;
    double residual_l2 = 0.0;
    double energy = 0.0;
    std::vector<FlowHistoryRow> history;

    /// Steps on which E rose by more than delta_E = 10 dt sup|R|^2 (+ rounding floor).
    long dissipation_violations = 0;
    /// Largest E(k+1) - E(k) - delta_E seen (<= 0 when every step dissipated).
    double worst_dissipation_excess = -std::numeric_limits<double>::infinity();
    /// Largest one-step energy increase seen (may be negative).
    double max_energy_rise = -std::numeric_limits<double>::infinity();
};

/**
 * Iterates step() until sup |tau + grad V|_g <= tol or max_steps.
 *
 * The divergence detector aborts (StabilityError) when E grows by more than
 * delta_E while the residual also grows; isolated rises near convergence, where
 * consistency error between the discrete energy and the discrete tension
 * dominates |R|^2, are counted in dissipation_violations instead.
 */
FlowResult run_to_convergence(const MapField& field, const Potential& potential, const FlowOptions& options);

} // namespace hmp
