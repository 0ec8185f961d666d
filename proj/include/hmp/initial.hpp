#pragma once

#include "hmp/config.hpp"

#include <memory>

namespace hmp
{

/// Noise-free initializer value at x; this is also the Dirichlet data.
Vec initial_value(const InitialSpec& spec, const TargetChart& chart, int n, const Point& x);

/**
 * Builds the starting field: the initializer on every valued node plus, when
 * noise_amplitude > 0, seeded noise on the active nodes. The noise is uniform
 * in [-1, 1] per component, smoothed by the (1/4, 1/2, 1/4) kernel along each
 * axis and shrunk globally if needed so the field stays inside 90% of the
 * chart's validity radius.
 */
MapField build_initial_field(const ExperimentConfig& cfg, std::shared_ptr<const DomainGrid> grid);

} // namespace hmp
