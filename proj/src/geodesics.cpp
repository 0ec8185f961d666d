#include "hmp/geodesics.hpp"

#include "hmp/kernels.hpp"

#include <fmt/format.h>

#include <cmath>

namespace hmp
{

namespace
{

void require_state(const TargetChart& chart, const GeodesicState& s)
{
    if (s.position.size() != chart.dim() || s.velocity.size() != chart.dim())
        throw ConfigError(fmt::format("geodesic state must have {} components", chart.dim()));
}

} // namespace

Vec acceleration(const TargetChart& chart, const Potential& potential, const GeodesicState& state)
{
    require_state(chart, state);
    chart.require_valid(state.position, "geodesic position");
    const int m = chart.dim();
    Vec gam(m), grad(m);
    kernels::christoffel_contract(chart, 1, state.position.data(), state.velocity.data(), gam.data());
    potential.gradient_at(chart, state.position.data(), grad.data());
    return -gam - grad;
}

double total_energy(const TargetChart& chart, const Potential& potential, const GeodesicState& state)
{
    const double w = chart.omega(state.position.squaredNorm());
    return 0.5 * w * w * state.velocity.squaredNorm() + potential.value_at(chart, state.position.data());
}

Trajectory integrate_trajectory(const TargetChart& chart, const Potential& potential, const GeodesicState& initial,
                                double dt, double t_end)
{
    if (!(dt > 0.0))
        throw ConfigError("geodesic dt must be positive");
    if (!(t_end >= 0.0))
        throw ConfigError("geodesic t_end must be non-negative");
    require_state(chart, initial);
    chart.require_valid(initial.position, "initial geodesic position");

    Trajectory traj;
    traj.states.push_back(initial);
    traj.energy.push_back(total_energy(chart, potential, initial));

    const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    GeodesicState s = initial;
    auto stage = [&](const Vec& y, const Vec& v) {
        if (!chart.is_valid(y))
            throw ChartDomainError("geodesic stage outside the chart");
        return acceleration(chart, potential, {y, v, 0.0});
    };
    // Compensated (Kahan) accumulation of the increments: over 1e4+ steps plain
    // addition leaves a rounding random walk that swamps the O(dt^4) drift.
    Vec carry_y = Vec::Zero(chart.dim());
    Vec carry_v = Vec::Zero(chart.dim());
    auto kahan_add = [](const Vec& sum, const Vec& inc, Vec& carry) {
        const Vec corrected = inc - carry;
        Vec out = sum + corrected;
        carry = (out - sum) - corrected;
        return out;
    };
    for (long k = 0; k < steps; ++k) {
        const double t_next = std::min(initial.time + (k + 1) * dt, initial.time + t_end);
        const double h = t_next - s.time;
        try {
            const Vec& y = s.position;
            const Vec& v = s.velocity;
            const Vec k1y = v;
            const Vec k1v = stage(y, v);
            const Vec k2y = v + 0.5 * h * k1v;
            const Vec k2v = stage(y + 0.5 * h * k1y, k2y);
            const Vec k3y = v + 0.5 * h * k2v;
            const Vec k3v = stage(y + 0.5 * h * k2y, k3y);
            const Vec k4y = v + h * k3v;
            const Vec k4v = stage(y + h * k3y, k4y);
            GeodesicState n;
            Vec cy = carry_y, cv = carry_v;
            n.position = kahan_add(y, h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y), cy);
            n.velocity = kahan_add(v, h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v), cv);
            n.time = t_next;
            if (!chart.is_valid(n.position) || !n.velocity.allFinite())
                throw ChartDomainError("geodesic left the chart");
            s = n;
            carry_y = cy;
            carry_v = cv;
        } catch (const ChartDomainError&) {
            traj.truncated = true;
            break;
        }
        traj.states.push_back(s);
        traj.energy.push_back(total_energy(chart, potential, s));
    }
    return traj;
}

ConservationAudit conservation_audit(const Trajectory& trajectory)
{
    if (trajectory.energy.empty())
        throw ConfigError("conservation audit needs a non-empty trajectory");
    ConservationAudit audit;
    const double h0 = trajectory.energy.front();
    audit.drift.reserve(trajectory.energy.size());
    for (double h : trajectory.energy) {
        const double d = std::abs(h - h0);
        audit.drift.push_back(d);
        audit.max_drift = std::max(audit.max_drift, d);
    }
    return audit;
}

} // namespace hmp
