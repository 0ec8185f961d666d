#include "hmp/grid.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace hmp
{

std::string to_string(RegionKind kind)
{
    switch (kind) {
    case RegionKind::box: return "box";
    case RegionKind::ball: return "ball";
    case RegionKind::annulus: return "annulus";
    }
    return "?";
}

std::string to_string(BoundaryCondition bc)
{
    switch (bc) {
    case BoundaryCondition::dirichlet: return "dirichlet";
    case BoundaryCondition::periodic: return "periodic";
    case BoundaryCondition::free: return "free";
    }
    return "?";
}

RegionKind parse_region_kind(const std::string& name)
{
    if (name == "box")
        return RegionKind::box;
    if (name == "ball")
        return RegionKind::ball;
    if (name == "annulus")
        return RegionKind::annulus;
    throw ConfigError(fmt::format("unknown domain.region '{}'", name));
}

BoundaryCondition parse_boundary_condition(const std::string& name)
{
    if (name == "dirichlet")
        return BoundaryCondition::dirichlet;
    if (name == "periodic")
        return BoundaryCondition::periodic;
    if (name == "free")
        return BoundaryCondition::free;
    throw ConfigError(fmt::format("unknown domain.bc '{}'", name));
}

DomainGrid::DomainGrid(const GridSpec& spec) : spec_(spec)
{
    const int n = spec_.dim;
    if (n < 1 || n > kMaxDim)
        throw ConfigError(fmt::format("domain.dim must be in [1, {}], got {}", kMaxDim, n));
    if (!(spec_.h > 0.0))
        throw ConfigError("domain.h must be positive");
    if (spec_.region != RegionKind::box && spec_.bc == BoundaryCondition::periodic)
        throw ConfigError("periodic boundary conditions need a box region");
    if (spec_.region == RegionKind::annulus && !(spec_.inner_radius > 0.0 && spec_.inner_radius < spec_.radius))
        throw ConfigError("annulus needs 0 < inner_radius < radius");
    if (spec_.region != RegionKind::box && !(spec_.radius > 0.0))
        throw ConfigError("ball/annulus radius must be positive");
    if (spec_.boundary_layers < 1)
        throw ConfigError("domain.boundary_layers must be >= 1");

    std::size_t total = 1;
    for (int d = 0; d < kMaxDim; ++d) {
        if (d >= n) {
            counts_[d] = 1;
            continue;
        }
        const double len = spec_.upper[d] - spec_.lower[d];
        if (!(len > 0.0))
            throw ConfigError("domain.upper must exceed domain.lower");
        const double cells = len / spec_.h;
        const double rounded = std::round(cells);
        if (std::abs(cells - rounded) > 1e-6 * std::max(1.0, cells))
            throw ConfigError(fmt::format("domain extent {} is not a multiple of h = {}", len, spec_.h));
        counts_[d] = static_cast<int>(rounded) + (spec_.bc == BoundaryCondition::periodic ? 0 : 1);
        if (counts_[d] < 3)
            throw ConfigError("each domain direction needs at least 3 nodes");
        total *= static_cast<std::size_t>(counts_[d]);
    }
    strides_[0] = 1;
    for (int d = 1; d < kMaxDim; ++d)
        strides_[d] = strides_[d - 1] * static_cast<std::size_t>(counts_[d - 1]);

    state_.assign(total, NodeState::exterior);
    build_neighbors();
    build_mask();
    build_weights();
}

std::array<int, kMaxDim> DomainGrid::index_of(std::size_t node) const
{
    std::array<int, kMaxDim> idx{0, 0, 0};
    for (int d = 0; d < kMaxDim; ++d) {
        idx[d] = static_cast<int>(node % static_cast<std::size_t>(counts_[d]));
        node /= static_cast<std::size_t>(counts_[d]);
    }
    return idx;
}

std::size_t DomainGrid::node_at(const std::array<int, kMaxDim>& idx) const
{
    std::size_t node = 0;
    for (int d = 0; d < kMaxDim; ++d)
        node += strides_[d] * static_cast<std::size_t>(idx[d]);
    return node;
}

Point DomainGrid::coordinate(std::size_t node) const
{
    const auto idx = index_of(node);
    Point x{0.0, 0.0, 0.0};
    for (int d = 0; d < spec_.dim; ++d)
        x[d] = spec_.lower[d] + idx[d] * spec_.h;
    return x;
}

namespace
{

double distance(const Point& x, const Point& c, int n)
{
    double s = 0.0;
    for (int d = 0; d < n; ++d)
        s += (x[d] - c[d]) * (x[d] - c[d]);
    return std::sqrt(s);
}

} // namespace

bool DomainGrid::in_region(const Point& x) const
{
    if (spec_.region == RegionKind::box) {
        for (int d = 0; d < spec_.dim; ++d)
            if (x[d] < spec_.lower[d] || x[d] > spec_.upper[d])
                return false;
        return true;
    }
    const double r = distance(x, spec_.center, spec_.dim);
    if (spec_.region == RegionKind::annulus && !(r > spec_.inner_radius))
        return false;
    return r < spec_.radius;
}

void DomainGrid::build_neighbors()
{
    const int n = spec_.dim;
    const bool periodic = spec_.bc == BoundaryCondition::periodic;
    neighbors_.assign(state_.size() * 2 * kMaxDim, -1);
    for (std::size_t node = 0; node < state_.size(); ++node) {
        const auto idx = index_of(node);
        for (int d = 0; d < n; ++d) {
            for (int s = 0; s < 2; ++s) {
                int j = idx[d] + (s ? 1 : -1);
                if (periodic)
                    j = (j + counts_[d]) % counts_[d];
                else if (j < 0 || j >= counts_[d])
                    continue;
                auto other = idx;
                other[d] = j;
                neighbors_[node * 2 * kMaxDim + 2 * d + s] = static_cast<std::int64_t>(node_at(other));
            }
        }
    }
}

void DomainGrid::build_mask()
{
    const int n = spec_.dim;
    const std::size_t total = state_.size();

    if (spec_.region == RegionKind::box) {
        for (std::size_t node = 0; node < total; ++node) {
            bool face = false;
            const auto idx = index_of(node);
            for (int d = 0; d < n; ++d)
                face = face || idx[d] == 0 || idx[d] == counts_[d] - 1;
            state_[node] = (spec_.bc == BoundaryCondition::dirichlet && face) ? NodeState::boundary : NodeState::active;
        }
    } else {
        for (std::size_t node = 0; node < total; ++node)
            if (in_region(coordinate(node)))
                state_[node] = NodeState::active;

        if (spec_.bc == BoundaryCondition::free) {
            // Ghost extrapolation needs the opposite neighbor whenever one side is missing.
            bool changed = true;
            while (changed) {
                changed = false;
                for (std::size_t node = 0; node < total; ++node) {
                    if (state_[node] != NodeState::active)
                        continue;
                    for (int d = 0; d < n; ++d) {
                        const auto lo = neighbor(node, d, -1);
                        const auto hi = neighbor(node, d, +1);
                        const bool has_lo = lo >= 0 && state_[lo] == NodeState::active;
                        const bool has_hi = hi >= 0 && state_[hi] == NodeState::active;
                        if (!has_lo && !has_hi) {
                            state_[node] = NodeState::exterior;
                            changed = true;
                            break;
                        }
                    }
                }
            }
        } else {
            // Dirichlet band: breadth-first layers around the active set.
            std::deque<std::pair<std::size_t, int>> queue;
            for (std::size_t node = 0; node < total; ++node)
                if (state_[node] == NodeState::active)
                    queue.emplace_back(node, 0);
            while (!queue.empty()) {
                auto [node, depth] = queue.front();
                queue.pop_front();
                if (depth >= spec_.boundary_layers)
                    continue;
                for (int d = 0; d < n; ++d)
                    for (int s : {-1, 1}) {
                        const auto other = neighbor(node, d, s);
                        if (other < 0) {
                            if (state_[node] == NodeState::active)
                                throw ConfigError("domain box too small: active node touches the lattice edge");
                            continue;
                        }
                        if (state_[other] == NodeState::exterior) {
                            state_[other] = NodeState::boundary;
                            queue.emplace_back(static_cast<std::size_t>(other), depth + 1);
                        }
                    }
            }
        }
    }

    for (std::size_t node = 0; node < total; ++node)
        if (state_[node] == NodeState::active)
            active_.push_back(node);
    valued_ = active_;
    for (std::size_t node = 0; node < total; ++node)
        if (state_[node] == NodeState::boundary)
            valued_.push_back(node);
    if (active_.empty())
        throw ConfigError("domain has no active nodes");
}

double DomainGrid::cell_volume() const
{
    return std::pow(spec_.h, spec_.dim);
}

double DomainGrid::cell_fraction(std::size_t node, const Point& c, double r) const
{
    const int n = spec_.dim;
    const bool periodic = spec_.bc == BoundaryCondition::periodic;
    const Point x = coordinate(node);
    const double half_diag = 0.5 * spec_.h * std::sqrt(static_cast<double>(n));

    // Quick accept / reject against the query ball.
    const double rc = distance(x, c, n);
    if (rc - half_diag > r)
        return 0.0;
    bool inside_query = rc + half_diag <= r;

    bool full_region = false;
    if (spec_.region == RegionKind::box) {
        full_region = periodic;
        if (!periodic) {
            full_region = true;
            for (int d = 0; d < n; ++d)
                full_region = full_region && x[d] - 0.5 * spec_.h >= spec_.lower[d] &&
                              x[d] + 0.5 * spec_.h <= spec_.upper[d];
        }
    } else {
        const double rr = distance(x, spec_.center, n);
        if (rr - half_diag >= spec_.radius)
            return 0.0;
        if (spec_.region == RegionKind::annulus && rr + half_diag <= spec_.inner_radius)
            return 0.0;
        full_region = rr + half_diag < spec_.radius &&
                      (spec_.region != RegionKind::annulus || rr - half_diag > spec_.inner_radius);
    }
    if (full_region && inside_query)
        return 1.0;

    static constexpr double offsets[4] = {-0.375, -0.125, 0.125, 0.375};
    int inside = 0;
    int total = 1;
    for (int d = 0; d < n; ++d)
        total *= 4;
    for (int s = 0; s < total; ++s) {
        Point p = x;
        int code = s;
        for (int d = 0; d < n; ++d) {
            p[d] += offsets[code % 4] * spec_.h;
            code /= 4;
        }
        if (!inside_query && distance(p, c, n) > r)
            continue;
        if (!full_region) {
            if (spec_.region == RegionKind::box) {
                bool ok = true;
                for (int d = 0; d < n; ++d)
                    ok = ok && p[d] >= spec_.lower[d] && p[d] <= spec_.upper[d];
                if (!ok)
                    continue;
            } else if (!in_region(p)) {
                continue;
            }
        }
        ++inside;
    }
    return static_cast<double>(inside) / total;
}

void DomainGrid::build_weights()
{
    const double vol = cell_volume();
    const double inf = std::numeric_limits<double>::infinity();
    weights_.assign(state_.size(), 0.0);
    for (std::size_t node = 0; node < state_.size(); ++node) {
        weights_[node] = cell_fraction(node, spec_.center, inf) * vol;
        if (weights_[node] > 0.0)
            quad_nodes_.push_back(node);
    }
}

double DomainGrid::max_ball_radius(const Point& c) const
{
    const int n = spec_.dim;
    if (spec_.region == RegionKind::box) {
        double r = std::numeric_limits<double>::infinity();
        for (int d = 0; d < n; ++d) {
            double lo = spec_.lower[d];
            double hi = spec_.upper[d];
            if (spec_.bc == BoundaryCondition::periodic)
                hi = lo + counts_[d] * spec_.h;
            r = std::min({r, c[d] - lo, hi - c[d]});
        }
        return r;
    }
    return spec_.radius - distance(c, spec_.center, n);
}

MapField::MapField(std::shared_ptr<const DomainGrid> grid, TargetChart chart)
    : grid_(std::move(grid)), chart_(chart),
      values_(grid_->num_nodes() * static_cast<std::size_t>(chart.dim()), std::numeric_limits<double>::quiet_NaN())
{
}

Vec MapField::value(std::size_t node) const
{
    Vec y(m());
    for (int a = 0; a < m(); ++a)
        y[a] = at(node)[a];
    return y;
}

void MapField::set(std::size_t node, const Vec& y)
{
    for (int a = 0; a < m(); ++a)
        at(node)[a] = y[a];
}

void MapField::require_chart_valid() const
{
    for (std::size_t node : grid_->valued_nodes()) {
        if (!chart_.is_valid(at(node))) {
            const auto x = grid_->coordinate(node);
            chart_.require_valid(at(node), fmt::format("node {} (x = {:.4g}, {:.4g}, {:.4g})", node, x[0], x[1], x[2]));
        }
    }
}

} // namespace hmp
