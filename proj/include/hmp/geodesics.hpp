#pragma once

#include "hmp/potentials.hpp"

#include <vector>

namespace hmp
{

struct GeodesicState
{
    Vec position;
    Vec velocity;
    double time = 0.0;
};

/// a^c = -Gamma^c_ab v^a v^b - (grad V)^c.
Vec acceleration(const TargetChart& chart, const Potential& potential, const GeodesicState& state);

/// H = 1/2 g_y(v, v) + V(y).
double total_energy(const TargetChart& chart, const Potential& potential, const GeodesicState& state);

struct Trajectory
{
    std::vector<GeodesicState> states;
    std::vector<double> energy;
    /// Set when the integration stopped early because a stage left the chart.
    bool truncated = false;
};

/// Classical RK4 on (y, v) from t0 to t0 + t_end; the last step is shortened to land on t_end.
Trajectory integrate_trajectory(const TargetChart& chart, const Potential& potential, const GeodesicState& initial,
                                double dt, double t_end);

struct ConservationAudit
{
    double max_drift = 0.0;
    std::vector<double> drift; // |H(t) - H(0)| per stored state
};

ConservationAudit conservation_audit(const Trajectory& trajectory);

} // namespace hmp
