#include "hmp/geometry.hpp"

#include <fmt/format.h>

namespace hmp
{

namespace detail
{

double sinc(double x)
{
    if (std::abs(x) < 1e-4) {
        double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

double atanc(double x)
{
    if (std::abs(x) < 1e-4) {
        double x2 = x * x;
        return 1.0 - x2 / 3.0 + x2 * x2 / 5.0;
    }
    return std::atan(x) / x;
}

double atanhc(double x)
{
    if (std::abs(x) < 1e-4) {
        double x2 = x * x;
        return 1.0 + x2 / 3.0 + x2 * x2 / 5.0;
    }
    return std::atanh(x) / x;
}

double xcot(double x)
{
    if (std::abs(x) < 1e-4) {
        double x2 = x * x;
        return 1.0 - x2 / 3.0 - x2 * x2 / 45.0;
    }
    return x / std::tan(x);
}

double xcoth(double x)
{
    if (std::abs(x) < 1e-4) {
        double x2 = x * x;
        return 1.0 + x2 / 3.0 - x2 * x2 / 45.0;
    }
    return x / std::tanh(x);
}

} // namespace detail

std::string to_string(GeometryKind kind)
{
    switch (kind) {
    case GeometryKind::euclidean: return "euclidean";
    case GeometryKind::sphere_stereographic: return "sphere";
    case GeometryKind::hyperbolic_poincare: return "hyperbolic";
    }
    return "?";
}

GeometryKind parse_geometry_kind(const std::string& name)
{
    if (name == "euclidean")
        return GeometryKind::euclidean;
    if (name == "sphere" || name == "sphere_stereographic")
        return GeometryKind::sphere_stereographic;
    if (name == "hyperbolic" || name == "hyperbolic_poincare")
        return GeometryKind::hyperbolic_poincare;
    throw ConfigError(fmt::format("unknown target.kind '{}'", name));
}

TargetChart::TargetChart(GeometryKind kind, int dim, double curvature_scale)
    : kind_(kind), dim_(dim), k_(curvature_scale), k2_(curvature_scale * curvature_scale)
{
    if (dim < 1 || dim > kMaxDim)
        throw ConfigError(fmt::format("target.dim must be in [1, {}], got {}", kMaxDim, dim));
    if (!(curvature_scale > 0.0) || !std::isfinite(curvature_scale))
        throw ConfigError("target.curvature_scale must be positive");
}

double TargetChart::curvature_bound() const
{
    switch (kind_) {
    case GeometryKind::sphere_stereographic: return k2_;
    case GeometryKind::hyperbolic_poincare: return -k2_;
    default: return 0.0;
    }
}

double TargetChart::validity_radius() const
{
    if (kind_ == GeometryKind::hyperbolic_poincare)
        return 1.0 / k_;
    return std::numeric_limits<double>::infinity();
}

bool TargetChart::is_valid(const double* y) const
{
    double q = 0.0;
    for (int a = 0; a < dim_; ++a) {
        if (!std::isfinite(y[a]))
            return false;
        q += y[a] * y[a];
    }
    if (kind_ == GeometryKind::hyperbolic_poincare)
        return k2_ * q < 1.0;
    return std::isfinite(q);
}

void TargetChart::require_valid(const double* y, const std::string& where) const
{
    if (is_valid(y))
        return;
    std::string coords;
    for (int a = 0; a < dim_; ++a)
        coords += fmt::format("{}{:.6g}", a ? ", " : "", y[a]);
    throw ChartDomainError(fmt::format("point ({}) outside the {} chart{}{}", coords, to_string(kind_),
                                       where.empty() ? "" : " at ", where));
}

double TargetChart::radial_distance(double s) const
{
    return s * distance_over_radius(s);
}

double TargetChart::distance_over_radius(double s) const
{
    switch (kind_) {
    case GeometryKind::sphere_stereographic: return 2.0 * detail::atanc(k_ * s);
    case GeometryKind::hyperbolic_poincare: return 2.0 * detail::atanhc(k_ * s);
    default: return 1.0;
    }
}

double TargetChart::chart_radius_of_distance(double rho) const
{
    switch (kind_) {
    case GeometryKind::sphere_stereographic: return std::tan(0.5 * k_ * rho) / k_;
    case GeometryKind::hyperbolic_poincare: return std::tanh(0.5 * k_ * rho) / k_;
    default: return rho;
    }
}

double TargetChart::rho_cot(double rho) const
{
    switch (kind_) {
    case GeometryKind::sphere_stereographic: return detail::xcot(k_ * rho);
    case GeometryKind::hyperbolic_poincare: return detail::xcoth(k_ * rho);
    default: return 1.0;
    }
}

Mat metric_at(const TargetChart& chart, const Vec& y)
{
    chart.require_valid(y, "metric_at");
    double w = chart.omega(y.squaredNorm());
    Mat g = Mat::Identity(chart.dim(), chart.dim());
    return w * w * g;
}

Christoffel christoffel_at(const TargetChart& chart, const Vec& y)
{
    chart.require_valid(y, "christoffel_at");
    const int m = chart.dim();
    const double kappa = chart.log_omega_slope(y.squaredNorm());
    Christoffel gamma(m);
    // g = e^{2f} delta: Gamma^a_bc = delta^a_b f_c + delta^a_c f_b - delta_bc f_a
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                double v = 0.0;
                if (a == b)
                    v += kappa * y[c];
                if (a == c)
                    v += kappa * y[b];
                if (b == c)
                    v -= kappa * y[a];
                gamma(a, b, c) = v;
            }
    return gamma;
}

double distance_from_center(const TargetChart& chart, const Vec& y)
{
    chart.require_valid(y, "distance_from_center");
    return chart.radial_distance(y.norm());
}

double xi_function(const TargetChart& chart, const Vec& y, double d)
{
    if (!(d > 0.0))
        throw ConfigError("xi_function requires d > 0");
    const double rho = distance_from_center(chart, y);
    const double sd = std::sqrt(d);
    if (!(rho < xi_cap_radius(d)))
        throw OutOfCapError(fmt::format("rho = {:.6g} is not below pi/(2 sqrt d) = {:.6g}", rho, xi_cap_radius(d)));
    const double xi = sd * std::cos(sd * rho);
    if (!(xi > 0.0))
        throw OutOfCapError(fmt::format("xi = {:.3g} is not positive at rho = {:.6g}", xi, rho));
    return xi;
}

} // namespace hmp
