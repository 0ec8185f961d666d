#pragma once

#include "hmp/geometry.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace hmp
{

enum class RegionKind
{
    box,
    ball,
    annulus,
};

enum class BoundaryCondition
{
    dirichlet,
    periodic,
    free,
};

enum class NodeState : std::uint8_t
{
    exterior,
    active,
    boundary,
};

std::string to_string(RegionKind kind);
std::string to_string(BoundaryCondition bc);
RegionKind parse_region_kind(const std::string& name);
BoundaryCondition parse_boundary_condition(const std::string& name);

using Point = std::array<double, kMaxDim>;

struct GridSpec
{
    int dim = 1;
    RegionKind region = RegionKind::box;
    /// Bounding box of the node lattice.
    Point lower{0.0, 0.0, 0.0};
    Point upper{1.0, 1.0, 1.0};
    /// Ball / annulus center and radii.
    Point center{0.0, 0.0, 0.0};
    double radius = 1.0;
    double inner_radius = 0.0;
    double h = 0.1;
    BoundaryCondition bc = BoundaryCondition::dirichlet;
    /// Depth of the Dirichlet node band around ball/annulus regions.
    int boundary_layers = 2;
};

/**
 * Uniform node lattice over a Euclidean region with an active / boundary /
 * exterior mask, face-neighbor table and cut-cell quadrature weights.
 *
 * Node i sits at lower + idx * h; its dual cell is the cube of side h around
 * it. Periodic boxes omit the duplicated upper face.
 */
class DomainGrid
{
public:
    explicit DomainGrid(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    int dim() const { return spec_.dim; }
    double h() const { return spec_.h; }
    BoundaryCondition bc() const { return spec_.bc; }
    std::size_t num_nodes() const { return state_.size(); }
    const std::array<int, kMaxDim>& counts() const { return counts_; }

    NodeState state(std::size_t node) const { return state_[node]; }
    bool has_value(std::size_t node) const { return state_[node] != NodeState::exterior; }
    const std::vector<std::size_t>& active_nodes() const { return active_; }
    /// Nodes carrying a value: active followed by boundary.
    const std::vector<std::size_t>& valued_nodes() const { return valued_; }

    /// Face neighbor in direction d (0-based) with sign +-1; -1 when off-lattice.
    /// Wraps for periodic grids.
    std::int64_t neighbor(std::size_t node, int d, int sign) const
    {
        return neighbors_[node * 2 * kMaxDim + 2 * d + (sign > 0 ? 1 : 0)];
    }

    std::array<int, kMaxDim> index_of(std::size_t node) const;
    std::size_t node_at(const std::array<int, kMaxDim>& idx) const;
    Point coordinate(std::size_t node) const;

    /// Region membership of a point (ignores the lattice bounding box).
    bool in_region(const Point& x) const;

    /// Cut-cell weight fraction * h^n of each node for the whole region.
    const std::vector<double>& region_weights() const { return weights_; }
    /// Nodes with positive region weight.
    const std::vector<std::size_t>& quadrature_nodes() const { return quad_nodes_; }

    /// Fraction of node's dual cell inside region ∩ box ∩ B_r(c), by 4^n subsampling.
    double cell_fraction(std::size_t node, const Point& c, double r) const;

    /// Radius of the largest ball around c inside the region's extent.
    double max_ball_radius(const Point& c) const;

    double cell_volume() const;

private:
    void build_mask();
    void build_neighbors();
    void build_weights();

    GridSpec spec_;
    std::array<int, kMaxDim> counts_{1, 1, 1};
    std::array<std::size_t, kMaxDim> strides_{0, 0, 0};
    std::vector<NodeState> state_;
    std::vector<std::int64_t> neighbors_;
    std::vector<std::size_t> active_;
    std::vector<std::size_t> valued_;
    std::vector<double> weights_;
    std::vector<std::size_t> quad_nodes_;
};

/**
 * Discretized map phi: grid -> target chart. Values are stored node-major,
 * chart.dim() doubles per node; nodes without a value hold NaN.
 */
class MapField
{
public:
    MapField(std::shared_ptr<const DomainGrid> grid, TargetChart chart);

    const DomainGrid& grid() const { return *grid_; }
    const std::shared_ptr<const DomainGrid>& grid_ptr() const { return grid_; }
    const TargetChart& chart() const { return chart_; }
    int m() const { return chart_.dim(); }

    double* at(std::size_t node) { return values_.data() + node * chart_.dim(); }
    const double* at(std::size_t node) const { return values_.data() + node * chart_.dim(); }
    Vec value(std::size_t node) const;
    void set(std::size_t node, const Vec& y);

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    /// Throws ChartDomainError naming the first node outside the chart.
    void require_chart_valid() const;

private:
    std::shared_ptr<const DomainGrid> grid_;
    TargetChart chart_;
    std::vector<double> values_;
};

} // namespace hmp
