#pragma once

#include "hmp/fields.hpp"

#include <functional>
#include <memory>

namespace support
{

using namespace hmp;

inline Vec vec(std::initializer_list<double> xs)
{
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs)
        v[i++] = x;
    return v;
}

inline std::shared_ptr<const DomainGrid> box(int n, double lo, double hi, double h,
                                             BoundaryCondition bc = BoundaryCondition::dirichlet)
{
    GridSpec s;
    s.dim = n;
    s.region = RegionKind::box;
    s.lower = {lo, lo, lo};
    s.upper = {hi, hi, hi};
    s.h = h;
    s.bc = bc;
    return std::make_shared<const DomainGrid>(s);
}

inline std::shared_ptr<const DomainGrid> ball(int n, double radius, double extent, double h,
                                              BoundaryCondition bc = BoundaryCondition::dirichlet, int layers = 2)
{
    GridSpec s;
    s.dim = n;
    s.region = RegionKind::ball;
    s.lower = {-extent, -extent, -extent};
    s.upper = {extent, extent, extent};
    s.radius = radius;
    s.h = h;
    s.bc = bc;
    s.boundary_layers = layers;
    return std::make_shared<const DomainGrid>(s);
}

/// z^3 / 3 in complex notation: a holomorphic, hence harmonic, map into the sphere chart.
inline Vec cubic_holomorphic(const Point& x)
{
    return vec({x[0] * x[0] * x[0] / 3.0 - x[0] * x[1] * x[1], x[0] * x[0] * x[1] - x[1] * x[1] * x[1] / 3.0});
}

/// Fills every valued node with f(x).
inline MapField make_field(std::shared_ptr<const DomainGrid> grid, const TargetChart& chart,
                           const std::function<Vec(const Point&)>& f)
{
    MapField field(grid, chart);
    for (std::size_t node : grid->valued_nodes())
        field.set(node, f(grid->coordinate(node)));
    return field;
}

/// Node closest to x among the active nodes.
inline std::size_t nearest_active(const DomainGrid& grid, const Point& x)
{
    std::size_t best = grid.active_nodes().front();
    double bd = 1e300;
    for (std::size_t node : grid.active_nodes()) {
        const auto c = grid.coordinate(node);
        double d = 0.0;
        for (int i = 0; i < grid.dim(); ++i)
            d += (c[i] - x[i]) * (c[i] - x[i]);
        if (d < bd) {
            bd = d;
            best = node;
        }
    }
    return best;
}

} // namespace support
