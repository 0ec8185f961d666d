#pragma once

#include "hmp/grid.hpp"
#include "hmp/kernels.hpp"
#include "hmp/potentials.hpp"

#include <span>
#include <vector>

namespace hmp
{

/// n x m matrix of first partials d_i phi^a at an active node.
Mat differential(const MapField& field, std::size_t node);

/// 1/2 delta^{ij} g_ab(phi) d_i phi^a d_j phi^b at an active node.
double energy_density(const MapField& field, std::size_t node);

/// tau^a = Laplacian phi^a + Gamma^a_bc(phi) d_i phi^b d_i phi^c at an active node.
Vec tension_field(const MapField& field, std::size_t node);

struct ResidualField
{
    /// Per-node R = tau + grad V (node-major, m per node; NaN off the active set).
    std::vector<double> values;
    double sup = 0.0; // max |R|_g
    double l2 = 0.0;  // (sum w |R|_g^2)^{1/2}
};

ResidualField residual(const MapField& field, const Potential& potential);

/// Derived per-node quantities of a snapshot (OpenMP kernel).
kernels::DerivedFields derive(const MapField& field, const Potential& potential);

/**
 * Cut-cell volume and sphere quadrature over a grid.
 *
 * Node quantities are arrays indexed by node. Nodes whose integrand is not
 * defined (no stencil / no value) borrow it from the nearest node that has
 * one, which keeps the cut boundary O(h).
 */
class Quadrature
{
public:
    explicit Quadrature(std::shared_ptr<const DomainGrid> grid);

    const DomainGrid& grid() const { return *grid_; }
    const std::vector<std::int64_t>& sources() const { return sources_; }

    /// Integral over the whole region.
    double integrate(std::span<const double> quantity) const;
    /// Integral over region ∩ B_r(center); RangeError when B_r leaves the region's extent.
    double integrate_ball(std::span<const double> quantity, const Point& center, double r) const;
    /// Integral over the sphere |x - center| = r by multilinear interpolation.
    double surface_integrate(std::span<const double> quantity, const Point& center, double r) const;

    /// Value a node contributes (itself or its source). NaN if none.
    double sample(std::span<const double> quantity, std::size_t node) const;
    /// Multilinear interpolation at x.
    double interpolate(std::span<const double> quantity, const Point& x) const;

    static constexpr int kAngularNodes2d = 64;
    static constexpr int kPolarNodes3d = 32;
    static constexpr int kAzimuthNodes3d = 64;

private:
    std::shared_ptr<const DomainGrid> grid_;
    std::vector<std::int64_t> sources_;
};

} // namespace hmp
