#pragma once

#include "hmp/geometry.hpp"

#include <span>
#include <string>
#include <vector>

namespace hmp
{

enum class PotentialKind
{
    zero,
    quadratic_radial,   // c * rho^2                        coefficients [c]
    double_well_radial, // -1/4 (1 - |y|^2)^2, flat only     coefficients []
    cosine_of_distance, // c * cos(kv * rho)                coefficients [c, kv]
};

std::string to_string(PotentialKind kind);
PotentialKind parse_potential_kind(const std::string& name);

enum class PotentialSign
{
    zero,
    nonpositive,
    positive,
    indefinite,
};

std::string to_string(PotentialSign sign);

/**
 * Radially symmetric potential V = f(rho) on a target chart.
 *
 * Every built-in profile has f'(rho) = rho * h(rho) with h smooth, which keeps
 * the chart gradient and Hessian finite at the chart center.
 */
class Potential
{
public:
    Potential() = default;
    /// Validates coefficient count and kind/chart compatibility.
    Potential(PotentialKind kind, std::vector<double> coefficients, const TargetChart& chart);

    static Potential zero(const TargetChart& chart) { return {PotentialKind::zero, {}, chart}; }

    PotentialKind kind() const { return kind_; }
    const std::vector<double>& coefficients() const { return coeffs_; }

    /// Profile values at distance rho: f, h = f'/rho, f''.
    struct Profile
    {
        double f;
        double h;
        double f2;
    };
    Profile profile(double rho) const;

    // Raw-pointer forms for the kernels; y has chart.dim() entries.
    double value_at(const TargetChart& chart, const double* y) const;
    /// Writes g^{ab} d_b V into out.
    void gradient_at(const TargetChart& chart, const double* y, double* out) const;
    /// |grad V|_g.
    double gradient_norm_at(const TargetChart& chart, const double* y) const;
    /// Eigenvalues of Hess V relative to g: radial f'' and tangential h * rho * ct(rho).
    std::pair<double, double> hessian_eigenvalues_at(const TargetChart& chart, const double* y) const;

private:
    PotentialKind kind_ = PotentialKind::zero;
    std::vector<double> coeffs_;
};

double value(const Potential& p, const TargetChart& chart, const Vec& y);

/// The index-raised differential g^{ab} d_b V.
Vec metric_gradient(const Potential& p, const TargetChart& chart, const Vec& y);

/// Covariant Hessian Hess V(X,Y) = X(Y V) - (nabla_X Y) V in chart components.
Mat covariant_hessian(const Potential& p, const TargetChart& chart, const Vec& y);

struct TheoremConstants
{
    /// max(0, largest eigenvalue of Hess V relative to g) over the probes. With a
    /// flat domain this is the A_V of "Ric - Hess V >= -A_V".
    double a_v = 0.0;
    /// Largest Hessian eigenvalue seen (may be negative).
    double max_hessian_eigenvalue = 0.0;
    /// A_V under the alternative reading "-Hess V >= -A_V": max(0, -smallest eigenvalue).
    double a_v_negated_reading = 0.0;
    bool concave = true;
    PotentialSign sign = PotentialSign::zero;
    /// V > 0 and -Hess V - B V g positive definite at every probe.
    bool energy2_condition = false;
    /// min over probes of -2B - 2 lambda_max(Hess V) / V; meaningful when energy2_condition.
    double c3 = 0.0;
    std::size_t probes = 0;
};

/// Probes a deterministic set of points in the geodesic ball of radius probe_radius around y0.
TheoremConstants theorem_constants(const Potential& p, const TargetChart& chart, double probe_radius);

/// Probes the given points (e.g. the realized image of a field).
TheoremConstants theorem_constants_over(const Potential& p, const TargetChart& chart, std::span<const Vec> points);

} // namespace hmp
