#include "hmp/potentials.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace hmp
{

std::string to_string(PotentialKind kind)
{
    switch (kind) {
    case PotentialKind::zero: return "zero";
    case PotentialKind::quadratic_radial: return "quadratic_radial";
    case PotentialKind::double_well_radial: return "double_well_radial";
    case PotentialKind::cosine_of_distance: return "cosine_of_distance";
    }
    return "?";
}

PotentialKind parse_potential_kind(const std::string& name)
{
    if (name == "zero")
        return PotentialKind::zero;
    if (name == "quadratic_radial")
        return PotentialKind::quadratic_radial;
    if (name == "double_well_radial")
        return PotentialKind::double_well_radial;
    if (name == "cosine_of_distance")
        return PotentialKind::cosine_of_distance;
    throw ConfigError(fmt::format("unknown potential.kind '{}'", name));
}

std::string to_string(PotentialSign sign)
{
    switch (sign) {
    case PotentialSign::zero: return "zero";
    case PotentialSign::nonpositive: return "nonpositive";
    case PotentialSign::positive: return "positive";
    case PotentialSign::indefinite: return "indefinite";
    }
    return "?";
}

Potential::Potential(PotentialKind kind, std::vector<double> coefficients, const TargetChart& chart)
    : kind_(kind), coeffs_(std::move(coefficients))
{
    std::size_t expected = 0;
    switch (kind_) {
    case PotentialKind::zero: expected = 0; break;
    case PotentialKind::quadratic_radial: expected = 1; break;
    case PotentialKind::double_well_radial: expected = 0; break;
    case PotentialKind::cosine_of_distance: expected = 2; break;
    }
    if (coeffs_.size() != expected)
        throw ConfigError(fmt::format("potential {} takes {} coefficients, got {}", to_string(kind_), expected,
                                      coeffs_.size()));
    for (double c : coeffs_)
        if (!std::isfinite(c))
            throw ConfigError("potential coefficients must be finite");
    if (kind_ == PotentialKind::double_well_radial && chart.kind() != GeometryKind::euclidean)
        throw ConfigError("double_well_radial is defined on a euclidean target only");
}

Potential::Profile Potential::profile(double rho) const
{
    switch (kind_) {
    case PotentialKind::zero: return {0.0, 0.0, 0.0};
    case PotentialKind::quadratic_radial: {
        const double c = coeffs_[0];
        return {c * rho * rho, 2.0 * c, 2.0 * c};
    }
    case PotentialKind::double_well_radial: {
        const double w = 1.0 - rho * rho;
        return {-0.25 * w * w, w, 1.0 - 3.0 * rho * rho};
    }
    case PotentialKind::cosine_of_distance: {
        const double c = coeffs_[0];
        const double kv = coeffs_[1];
        return {c * std::cos(kv * rho), -c * kv * kv * detail::sinc(kv * rho), -c * kv * kv * std::cos(kv * rho)};
    }
    }
    return {0.0, 0.0, 0.0};
}

namespace
{

double norm_sq(const double* y, int m)
{
    double q = 0.0;
    for (int a = 0; a < m; ++a)
        q += y[a] * y[a];
    return q;
}

} // namespace

double Potential::value_at(const TargetChart& chart, const double* y) const
{
    if (kind_ == PotentialKind::zero)
        return 0.0;
    const double s = std::sqrt(norm_sq(y, chart.dim()));
    return profile(chart.radial_distance(s)).f;
}

void Potential::gradient_at(const TargetChart& chart, const double* y, double* out) const
{
    const int m = chart.dim();
    if (kind_ == PotentialKind::zero) {
        for (int a = 0; a < m; ++a)
            out[a] = 0.0;
        return;
    }
    const double q = norm_sq(y, m);
    const double s = std::sqrt(q);
    const double ratio = chart.distance_over_radius(s);
    const Profile p = profile(s * ratio);
    // dV = f'(rho) Omega y/s dy, raised with g^{-1} = Omega^{-2}
    const double coeff = p.h * ratio / chart.omega(q);
    for (int a = 0; a < m; ++a)
        out[a] = coeff * y[a];
}

double Potential::gradient_norm_at(const TargetChart& chart, const double* y) const
{
    if (kind_ == PotentialKind::zero)
        return 0.0;
    const double s = std::sqrt(norm_sq(y, chart.dim()));
    const double rho = chart.radial_distance(s);
    return std::abs(rho * profile(rho).h);
}

std::pair<double, double> Potential::hessian_eigenvalues_at(const TargetChart& chart, const double* y) const
{
    const double s = std::sqrt(norm_sq(y, chart.dim()));
    const double rho = chart.radial_distance(s);
    const Profile p = profile(rho);
    return {p.f2, p.h * chart.rho_cot(rho)};
}

double value(const Potential& p, const TargetChart& chart, const Vec& y)
{
    chart.require_valid(y, "potential value");
    return p.value_at(chart, y.data());
}

Vec metric_gradient(const Potential& p, const TargetChart& chart, const Vec& y)
{
    chart.require_valid(y, "potential gradient");
    Vec out(chart.dim());
    p.gradient_at(chart, y.data(), out.data());
    return out;
}

Mat covariant_hessian(const Potential& p, const TargetChart& chart, const Vec& y)
{
    chart.require_valid(y, "potential hessian");
    const int m = chart.dim();
    const double q = y.squaredNorm();
    const double s = std::sqrt(q);
    const double rho = chart.radial_distance(s);
    const auto prof = p.profile(rho);
    const double w2 = chart.omega(q) * chart.omega(q);
    // Hess f(rho) = f'' d rho^2 + f' Hess rho with Hess rho = ct(rho) (g - d rho^2)
    const double tangential = prof.h * chart.rho_cot(rho);
    Mat hess = tangential * Mat::Identity(m, m);
    if (s > 0.0) {
        Vec unit = y / s;
        hess += (prof.f2 - tangential) * (unit * unit.transpose());
    }
    return w2 * hess;
}

TheoremConstants theorem_constants_over(const Potential& p, const TargetChart& chart, std::span<const Vec> points)
{
    TheoremConstants out;
    out.probes = points.size();
    if (points.empty())
        return out;

    const double bound = chart.curvature_bound();
    bool all_zero = true;
    bool all_nonpositive = true;
    bool all_positive = true;
    bool energy2 = true;
    double max_eig = -std::numeric_limits<double>::infinity();
    double min_eig = std::numeric_limits<double>::infinity();
    double c3 = std::numeric_limits<double>::infinity();

    for (const Vec& y : points) {
        const double v = value(p, chart, y);
        all_zero = all_zero && v == 0.0;
        all_nonpositive = all_nonpositive && v <= 0.0;
        all_positive = all_positive && v > 0.0;

        // eigenvalues of Hess V relative to g
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> solver(covariant_hessian(p, chart, y), metric_at(chart, y),
                                                             Eigen::EigenvaluesOnly);
        const double hi = solver.eigenvalues().maxCoeff();
        const double lo = solver.eigenvalues().minCoeff();
        max_eig = std::max(max_eig, hi);
        min_eig = std::min(min_eig, lo);

        // -Hess V - B V g > 0  <=>  hi < -B V
        if (!(v > 0.0) || !(hi < -bound * v))
            energy2 = false;
        if (v > 0.0)
            c3 = std::min(c3, -2.0 * bound - 2.0 * hi / v);
    }

    out.max_hessian_eigenvalue = max_eig;
    out.a_v = std::max(0.0, max_eig);
    out.a_v_negated_reading = std::max(0.0, -min_eig);
    out.concave = max_eig <= 0.0;
    if (all_zero)
        out.sign = PotentialSign::zero;
    else if (all_positive)
        out.sign = PotentialSign::positive;
    else if (all_nonpositive)
        out.sign = PotentialSign::nonpositive;
    else
        out.sign = PotentialSign::indefinite;
    out.energy2_condition = energy2;
    out.c3 = energy2 ? c3 : 0.0;
    return out;
}

TheoremConstants theorem_constants(const Potential& p, const TargetChart& chart, double probe_radius)
{
    const int m = chart.dim();
    const double chart_radius = chart.chart_radius_of_distance(probe_radius);
    if (!(chart_radius < chart.validity_radius()))
        throw ConfigError("theorem_constants probe region leaves the chart");

    // Directions: +-1 in 1D, 24 angles in 2D, 64-point Fibonacci sphere in 3D.
    std::vector<Vec> dirs;
    if (m == 1) {
        dirs.push_back(Vec::Constant(1, 1.0));
        dirs.push_back(Vec::Constant(1, -1.0));
    } else if (m == 2) {
        for (int j = 0; j < 24; ++j) {
            Vec d(2);
            d << std::cos(2.0 * M_PI * j / 24.0), std::sin(2.0 * M_PI * j / 24.0);
            dirs.push_back(d);
        }
    } else {
        const int count = 64;
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < count; ++j) {
            const double z = 1.0 - 2.0 * (j + 0.5) / count;
            const double r = std::sqrt(1.0 - z * z);
            Vec d(3);
            d << r * std::cos(golden * j), r * std::sin(golden * j), z;
            dirs.push_back(d);
        }
    }

    const int shells = 16;
    std::vector<Vec> points;
    points.push_back(Vec::Zero(m));
    for (int j = 1; j <= shells; ++j) {
        const double s = chart.chart_radius_of_distance(probe_radius * j / shells);
        for (const Vec& d : dirs)
            points.push_back(s * d);
    }
    return theorem_constants_over(p, chart, points);
}

} // namespace hmp
