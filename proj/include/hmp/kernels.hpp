#pragma once

// Node-loop kernels. Each loop exists twice: serial:: is the plain reference,
// omp:: is the OpenMP version used by the library. Per-node arithmetic is shared
// (the inline helpers below), so the two agree bitwise on per-node outputs;
// reductions in omp:: use fixed-size blocks summed in order, which keeps
// results independent of the thread count.

#include "hmp/grid.hpp"
#include "hmp/potentials.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace hmp::kernels
{

inline constexpr std::size_t kReductionBlock = 1024;

/// Node-major buffer of n x m differentials, row i = d_i phi.
inline constexpr int kMaxJet = kMaxDim * kMaxDim;

/// d_i phi^a at a valued node. Central differences where both neighbors carry
/// values, one-sided second order otherwise. Returns false without a stencil.
inline bool differential_at(const DomainGrid& grid, int m, const double* values, std::size_t node, double* jet)
{
    const int n = grid.dim();
    const double inv2h = 0.5 / grid.h();
    const double* y0 = values + node * m;
    for (int d = 0; d < n; ++d) {
        const auto lo = grid.neighbor(node, d, -1);
        const auto hi = grid.neighbor(node, d, +1);
        const bool has_lo = lo >= 0 && grid.has_value(lo);
        const bool has_hi = hi >= 0 && grid.has_value(hi);
        double* row = jet + d * m;
        if (has_lo && has_hi) {
            const double* a = values + hi * m;
            const double* b = values + lo * m;
            for (int c = 0; c < m; ++c)
                row[c] = (a[c] - b[c]) * inv2h;
            continue;
        }
        const auto next = has_hi ? hi : lo;
        if (next < 0 || !(has_hi || has_lo))
            return false;
        const int sgn = has_hi ? 1 : -1;
        const auto far = grid.neighbor(static_cast<std::size_t>(next), d, sgn);
        if (far < 0 || !grid.has_value(far) || static_cast<std::size_t>(far) == node)
            return false;
        const double* y1 = values + next * m;
        const double* y2 = values + far * m;
        for (int c = 0; c < m; ++c)
            row[c] = sgn * (4.0 * (y1[c] - y0[c]) - (y2[c] - y0[c])) * inv2h;
    }
    return true;
}

/// 1/2 Omega^2 sum_{i,a} (d_i phi^a)^2.
inline double energy_density_of(const TargetChart& chart, int n, const double* y, const double* jet)
{
    const int m = chart.dim();
    double q = 0.0;
    for (int a = 0; a < m; ++a)
        q += y[a] * y[a];
    double sum = 0.0;
    for (int k = 0; k < n * m; ++k)
        sum += jet[k] * jet[k];
    const double w = chart.omega(q);
    return 0.5 * w * w * sum;
}

/// Gamma^a_bc sum_i X_i^b X_i^c for the conformal chart, X = jet rows.
inline void christoffel_contract(const TargetChart& chart, int n, const double* y, const double* jet, double* out)
{
    const int m = chart.dim();
    double q = 0.0;
    for (int a = 0; a < m; ++a)
        q += y[a] * y[a];
    const double kappa = chart.log_omega_slope(q);
    for (int a = 0; a < m; ++a)
        out[a] = 0.0;
    if (kappa == 0.0)
        return;
    // Gamma^a_bc X^b X^c = 2 X^a (df . X) - df_a |X|^2, df = kappa y
    for (int i = 0; i < n; ++i) {
        const double* x = jet + i * m;
        double dot = 0.0;
        double xx = 0.0;
        for (int a = 0; a < m; ++a) {
            dot += y[a] * x[a];
            xx += x[a] * x[a];
        }
        dot *= kappa;
        for (int a = 0; a < m; ++a)
            out[a] += 2.0 * x[a] * dot - kappa * y[a] * xx;
    }
}

/// Standard (2n+1)-point Laplacian; a missing neighbor is replaced by the ghost
/// 2 phi(node) - phi(opposite). Returns false when both sides are missing.
inline bool laplacian_at(const DomainGrid& grid, int m, const double* values, std::size_t node, double* out)
{
    const int n = grid.dim();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    const double* y0 = values + node * m;
    for (int a = 0; a < m; ++a)
        out[a] = 0.0;
    for (int d = 0; d < n; ++d) {
        const auto lo = grid.neighbor(node, d, -1);
        const auto hi = grid.neighbor(node, d, +1);
        const bool has_lo = lo >= 0 && grid.has_value(lo);
        const bool has_hi = hi >= 0 && grid.has_value(hi);
        if (has_lo && has_hi) {
            const double* a = values + hi * m;
            const double* b = values + lo * m;
            for (int c = 0; c < m; ++c)
                out[c] += (a[c] - 2.0 * y0[c] + b[c]) * inv_h2;
        } else if (!has_lo && !has_hi) {
            return false;
        }
        // ghost extrapolation makes this direction's second difference vanish
    }
    return true;
}

/// tau(phi) at an active node: Laplacian plus the Christoffel contraction of the jet.
inline bool tension_at(const DomainGrid& grid, const TargetChart& chart, const double* values, std::size_t node,
                       const double* jet, double* tau)
{
    const int m = chart.dim();
    double gam[kMaxDim];
    if (!laplacian_at(grid, m, values, node, tau))
        return false;
    christoffel_contract(chart, grid.dim(), values + node * m, jet, gam);
    for (int a = 0; a < m; ++a)
        tau[a] += gam[a];
    return true;
}

/// Reductions from one explicit Euler sweep, all taken on the incoming field.
struct SweepResult
{
    double residual_sup = 0.0;    // max_i |R_i|_g
    double residual_l2_sq = 0.0;  // sum_i w_i |R_i|_g^2 over active nodes
    double energy = 0.0;          // sum_i w_i (e_i - V_i) over quadrature nodes
    std::int64_t bad_node = -1;   // first node whose update left the chart
};

/// Per-node derived quantities of a field snapshot. Arrays are indexed by node;
/// has_jet / has_tension flag where the stencil allowed evaluation.
struct DerivedFields
{
    int n = 0;
    int m = 0;
    std::vector<double> jet;       // num_nodes * n * m
    std::vector<double> energy;    // 1/2 |d phi|^2_g
    std::vector<double> potential; // V(phi)
    std::vector<double> tension;   // num_nodes * m
    std::vector<double> residual;  // tau + grad V
    std::vector<std::uint8_t> has_jet;
    std::vector<std::uint8_t> has_tension;
};

/// Lipschitz bound of the update beyond the Laplacian part, see flow.hpp.
double stiffness_at(const DomainGrid& grid, const TargetChart& chart, const Potential& pot, const double* values,
                    std::size_t node, const double* jet);

/// Source node supplying the integrand at each valued or quadrature node (itself
/// when its jet is computable, else the nearest node that has one; -1 if none).
std::vector<std::int64_t> quadrature_sources(const DomainGrid& grid, int m);

namespace serial
{
SweepResult flow_sweep(const DomainGrid& grid, const TargetChart& chart, const Potential& pot,
                       const std::vector<std::int64_t>& sources, std::span<const double> in, std::span<double> out,
                       double dt);
void derived_fields(const DomainGrid& grid, const TargetChart& chart, const Potential& pot,
                    std::span<const double> values, DerivedFields& out);
double max_stiffness(const DomainGrid& grid, const TargetChart& chart, const Potential& pot,
                     std::span<const double> values);
} // namespace serial

namespace omp
{
SweepResult flow_sweep(const DomainGrid& grid, const TargetChart& chart, const Potential& pot,
                       const std::vector<std::int64_t>& sources, std::span<const double> in, std::span<double> out,
                       double dt);
void derived_fields(const DomainGrid& grid, const TargetChart& chart, const Potential& pot,
                    std::span<const double> values, DerivedFields& out);
double max_stiffness(const DomainGrid& grid, const TargetChart& chart, const Potential& pot,
                     std::span<const double> values);
} // namespace omp

} // namespace hmp::kernels
