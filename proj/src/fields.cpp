#include "hmp/fields.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace hmp
{

namespace
{

void require_active(const MapField& field, std::size_t node)
{
    if (node >= field.grid().num_nodes() || field.grid().state(node) != NodeState::active)
        throw IndexError(fmt::format("node {} is not an active node", node));
}

// Full Gauss-Legendre rule on [-1, 1] from boost's half-rule tables.
template <int N>
std::pair<std::vector<double>, std::vector<double>> gauss_legendre()
{
    using rule = boost::math::quadrature::gauss<double, N>;
    std::vector<double> x, w;
    const auto& abs = rule::abscissa();
    const auto& wts = rule::weights();
    for (std::size_t i = 0; i < abs.size(); ++i) {
        if (abs[i] == 0.0) {
            x.push_back(0.0);
            w.push_back(wts[i]);
            continue;
        }
        x.push_back(-abs[i]);
        w.push_back(wts[i]);
        x.push_back(abs[i]);
        w.push_back(wts[i]);
    }
    return {x, w};
}

} // namespace

Mat differential(const MapField& field, std::size_t node)
{
    require_active(field, node);
    const int n = field.grid().dim();
    const int m = field.m();
    double jet[kernels::kMaxJet];
    if (!kernels::differential_at(field.grid(), m, field.values().data(), node, jet))
        throw IndexError(fmt::format("node {} lacks a differential stencil", node));
    Mat out(n, m);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a)
            out(i, a) = jet[i * m + a];
    return out;
}

double energy_density(const MapField& field, std::size_t node)
{
    const Mat jet = differential(field, node);
    double buf[kernels::kMaxJet];
    for (int i = 0; i < jet.rows(); ++i)
        for (int a = 0; a < jet.cols(); ++a)
            buf[i * jet.cols() + a] = jet(i, a);
    return kernels::energy_density_of(field.chart(), field.grid().dim(), field.at(node), buf);
}

Vec tension_field(const MapField& field, std::size_t node)
{
    require_active(field, node);
    const int m = field.m();
    double jet[kernels::kMaxJet];
    Vec tau(m);
    if (!kernels::differential_at(field.grid(), m, field.values().data(), node, jet) ||
        !kernels::tension_at(field.grid(), field.chart(), field.values().data(), node, jet, tau.data()))
        throw ConfigError(fmt::format("node {} has no Laplacian stencil (both neighbors missing)", node));
    return tau;
}

kernels::DerivedFields derive(const MapField& field, const Potential& potential)
{
    kernels::DerivedFields out;
    kernels::omp::derived_fields(field.grid(), field.chart(), potential, field.values(), out);
    return out;
}

ResidualField residual(const MapField& field, const Potential& potential)
{
    const auto der = derive(field, potential);
    const auto& grid = field.grid();
    const int m = field.m();
    ResidualField out;
    out.values = der.residual;
    double l2 = 0.0;
    for (std::size_t node : grid.active_nodes()) {
        if (!der.has_tension[node])
            continue;
        const double* y = field.at(node);
        double q = 0.0;
        double rr = 0.0;
        for (int a = 0; a < m; ++a) {
            q += y[a] * y[a];
            rr += der.residual[node * m + a] * der.residual[node * m + a];
        }
        const double norm = field.chart().omega(q) * std::sqrt(rr);
        out.sup = std::max(out.sup, norm);
        l2 += grid.region_weights()[node] * norm * norm;
    }
    out.l2 = std::sqrt(l2);
    return out;
}

Quadrature::Quadrature(std::shared_ptr<const DomainGrid> grid)
    : grid_(std::move(grid)), sources_(kernels::quadrature_sources(*grid_, 1))
{
}

double Quadrature::sample(std::span<const double> quantity, std::size_t node) const
{
    if (std::isfinite(quantity[node]))
        return quantity[node];
    const auto src = sources_[node];
    if (src >= 0)
        return quantity[static_cast<std::size_t>(src)];
    return std::numeric_limits<double>::quiet_NaN();
}

double Quadrature::integrate(std::span<const double> quantity) const
{
    const auto& weights = grid_->region_weights();
    double sum = 0.0;
    for (std::size_t node : grid_->quadrature_nodes()) {
        const double v = sample(quantity, node);
        if (!std::isfinite(v))
            throw RangeError(fmt::format("integrand undefined at node {}", node));
        sum += weights[node] * v;
    }
    return sum;
}

double Quadrature::integrate_ball(std::span<const double> quantity, const Point& center, double r) const
{
    const double limit = grid_->max_ball_radius(center);
    if (!(r > 0.0) || r > limit * (1.0 + 1e-12))
        throw RangeError(fmt::format("ball radius {} exceeds the grid extent {}", r, limit));
    const int n = grid_->dim();
    const double vol = grid_->cell_volume();
    const double reach = r + 0.5 * grid_->h() * std::sqrt(static_cast<double>(n));
    double sum = 0.0;
    for (std::size_t node : grid_->quadrature_nodes()) {
        const Point x = grid_->coordinate(node);
        double dist2 = 0.0;
        for (int d = 0; d < n; ++d)
            dist2 += (x[d] - center[d]) * (x[d] - center[d]);
        if (dist2 > reach * reach)
            continue;
        const double frac = grid_->cell_fraction(node, center, r);
        if (frac == 0.0)
            continue;
        const double v = sample(quantity, node);
        if (!std::isfinite(v))
            throw RangeError(fmt::format("integrand undefined at node {}", node));
        sum += frac * vol * v;
    }
    return sum;
}

double Quadrature::interpolate(std::span<const double> quantity, const Point& x) const
{
    const int n = grid_->dim();
    const auto& spec = grid_->spec();
    const auto& counts = grid_->counts();
    const bool periodic = spec.bc == BoundaryCondition::periodic;
    std::array<int, kMaxDim> base{0, 0, 0};
    std::array<double, kMaxDim> t{0.0, 0.0, 0.0};
    for (int d = 0; d < n; ++d) {
        const double u = (x[d] - spec.lower[d]) / spec.h;
        int i = static_cast<int>(std::floor(u));
        t[d] = u - i;
        if (!periodic) {
            if (i == counts[d] - 1 && t[d] < 1e-12) {
                i -= 1;
                t[d] = 1.0;
            }
            if (i < 0 || i + 1 >= counts[d])
                throw RangeError("interpolation point outside the lattice");
        }
        base[d] = i;
    }
    double sum = 0.0;
    for (int corner = 0; corner < (1 << n); ++corner) {
        std::array<int, kMaxDim> idx{0, 0, 0};
        double wgt = 1.0;
        for (int d = 0; d < n; ++d) {
            const int bit = (corner >> d) & 1;
            int i = base[d] + bit;
            if (periodic)
                i = ((i % counts[d]) + counts[d]) % counts[d];
            idx[d] = i;
            wgt *= bit ? t[d] : 1.0 - t[d];
        }
        if (wgt == 0.0)
            continue;
        const double v = sample(quantity, grid_->node_at(idx));
        if (!std::isfinite(v))
            throw RangeError("integrand undefined near the interpolation point");
        sum += wgt * v;
    }
    return sum;
}

double Quadrature::surface_integrate(std::span<const double> quantity, const Point& center, double r) const
{
    const int n = grid_->dim();
    if (!(r > 0.0))
        throw RangeError("sphere radius must be positive");
    if (grid_->spec().bc != BoundaryCondition::periodic) {
        for (int d = 0; d < n; ++d)
            if (center[d] - r < grid_->spec().lower[d] - 1e-12 || center[d] + r > grid_->spec().upper[d] + 1e-12)
                throw RangeError(fmt::format("sphere of radius {} leaves the lattice", r));
    }

    if (n == 1) {
        Point a = center, b = center;
        a[0] += r;
        b[0] -= r;
        return interpolate(quantity, a) + interpolate(quantity, b);
    }
    if (n == 2) {
        static const auto rule = gauss_legendre<kAngularNodes2d>();
        double sum = 0.0;
        for (std::size_t j = 0; j < rule.first.size(); ++j) {
            const double theta = M_PI * (1.0 + rule.first[j]);
            Point p = center;
            p[0] += r * std::cos(theta);
            p[1] += r * std::sin(theta);
            sum += M_PI * rule.second[j] * interpolate(quantity, p);
        }
        return r * sum;
    }
    static const auto rule = gauss_legendre<kPolarNodes3d>();
    const double dphi = 2.0 * M_PI / kAzimuthNodes3d;
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.first.size(); ++j) {
        const double z = rule.first[j];
        const double rho = std::sqrt(1.0 - z * z);
        for (int k = 0; k < kAzimuthNodes3d; ++k) {
            const double phi = (k + 0.5) * dphi;
            Point p = center;
            p[0] += r * rho * std::cos(phi);
            p[1] += r * rho * std::sin(phi);
            p[2] += r * z;
            sum += rule.second[j] * dphi * interpolate(quantity, p);
        }
    }
    return r * r * sum;
}

} // namespace hmp
