#pragma once

#include "hmp/common.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace hmp
{

enum class GeometryKind
{
    euclidean,
    sphere_stereographic,
    hyperbolic_poincare,
};

std::string to_string(GeometryKind kind);
/// Accepts the config spellings `euclidean`, `sphere`, `hyperbolic` (and the long names).
GeometryKind parse_geometry_kind(const std::string& name);

/// Christoffel symbols Gamma^a_{bc}, stored densely.
class Christoffel
{
public:
    explicit Christoffel(int dim) : dim_(dim) { data_.fill(0.0); }

    int dim() const { return dim_; }
    double& operator()(int a, int b, int c) { return data_[(a * kMaxDim + b) * kMaxDim + c]; }
    double operator()(int a, int b, int c) const { return data_[(a * kMaxDim + b) * kMaxDim + c]; }

private:
    int dim_;
    std::array<double, kMaxDim * kMaxDim * kMaxDim> data_;
};

/**
 * A constant-curvature model space in one global conformal chart centred at
 * the origin: g = Omega(|y|^2)^2 * delta.
 *
 *   euclidean             Omega = 1
 *   sphere_stereographic  Omega = 2 / (1 + k^2 |y|^2)   (antipode at infinity)
 *   hyperbolic_poincare   Omega = 2 / (1 - k^2 |y|^2)   (valid for |y| < 1/k)
 *
 * The sectional curvature is exactly +k^2, 0, -k^2, so the curvature bound B
 * is stored rather than estimated. The chart center y0 is always the origin.
 */
class TargetChart
{
public:
    TargetChart() = default;
    TargetChart(GeometryKind kind, int dim, double curvature_scale = 1.0);

    GeometryKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double curvature_scale() const { return k_; }
    /// Upper bound B on the sectional curvature (exact for these spaces).
    double curvature_bound() const;
    /// Chart radius |y| beyond which points are invalid (infinity when unbounded).
    double validity_radius() const;

    bool is_valid(const double* y) const;
    bool is_valid(const Vec& y) const { return is_valid(y.data()); }
    /// Throws ChartDomainError naming `where` if y is not a valid chart point.
    void require_valid(const double* y, const std::string& where = {}) const;
    void require_valid(const Vec& y, const std::string& where = {}) const { require_valid(y.data(), where); }

    // Closed-form conformal data as functions of q = |y|^2. Hot-path helpers.

    /// Omega, the square root of the conformal factor.
    double omega(double q) const
    {
        switch (kind_) {
        case GeometryKind::sphere_stereographic: return 2.0 / (1.0 + k2_ * q);
        case GeometryKind::hyperbolic_poincare: return 2.0 / (1.0 - k2_ * q);
        default: return 1.0;
        }
    }

    /// kappa with d(log Omega)/dy_a = kappa * y_a.
    double log_omega_slope(double q) const
    {
        switch (kind_) {
        case GeometryKind::sphere_stereographic: return -2.0 * k2_ / (1.0 + k2_ * q);
        case GeometryKind::hyperbolic_poincare: return 2.0 * k2_ / (1.0 - k2_ * q);
        default: return 0.0;
        }
    }

    /// d kappa / dq.
    double log_omega_slope_derivative(double q) const
    {
        switch (kind_) {
        case GeometryKind::sphere_stereographic: return 2.0 * k2_ * k2_ / ((1.0 + k2_ * q) * (1.0 + k2_ * q));
        case GeometryKind::hyperbolic_poincare: return 2.0 * k2_ * k2_ / ((1.0 - k2_ * q) * (1.0 - k2_ * q));
        default: return 0.0;
        }
    }

    /// Geodesic distance rho from the chart center to a point of chart radius s.
    double radial_distance(double s) const;
    /// rho(s) / s, finite at s = 0 (equals Omega(0)).
    double distance_over_radius(double s) const;
    /// Chart radius of the geodesic sphere of radius rho (inverse of radial_distance).
    double chart_radius_of_distance(double rho) const;
    /// rho * ct(rho) where Hess rho = ct(rho) (g - d rho^2); equals 1 at rho = 0.
    double rho_cot(double rho) const;

private:
    GeometryKind kind_ = GeometryKind::euclidean;
    int dim_ = 1;
    double k_ = 1.0;
    double k2_ = 1.0;
};

/// g(y) as an m x m matrix.
Mat metric_at(const TargetChart& chart, const Vec& y);

/// Christoffel symbols of g at y from the closed-form conformal-factor derivative.
Christoffel christoffel_at(const TargetChart& chart, const Vec& y);

/// rho(y0, y) with y0 the chart origin.
double distance_from_center(const TargetChart& chart, const Vec& y);

/// sqrt(d) cos(sqrt(d) rho(y)); throws OutOfCapError unless rho(y) < pi / (2 sqrt d).
double xi_function(const TargetChart& chart, const Vec& y, double d);

/// Largest radius R with R < pi / (2 sqrt d) (the cap on which xi stays positive).
inline double xi_cap_radius(double d) { return M_PI / (2.0 * std::sqrt(d)); }

namespace detail
{
// sin(x)/x, atan(x)/x, atanh(x)/x, x cot x, x coth x, all smooth at 0.
double sinc(double x);
double atanc(double x);
double atanhc(double x);
double xcot(double x);
double xcoth(double x);
} // namespace detail

} // namespace hmp
