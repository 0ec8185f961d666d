#include "hmp/diagnostics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hmp
{

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::not_applicable: return "NOT-APPLICABLE";
    case Verdict::unconverged: return "UNCONVERGED";
    }
    return "?";
}

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kKatoRounding = 1e-10;
constexpr double kIdentityScaleFloor = 1e-3;

double norm_sq(const double* v, int m)
{
    double s = 0.0;
    for (int a = 0; a < m; ++a)
        s += v[a] * v[a];
    return s;
}

double dot(const double* u, const double* v, int m)
{
    double s = 0.0;
    for (int a = 0; a < m; ++a)
        s += u[a] * v[a];
    return s;
}

// Gamma(X, Y)^a for the conformal chart: kappa [(y.X) Y + (y.Y) X - (X.Y) y].
void christoffel_pair(double kappa, const double* y, const double* x, const double* z, int m, double* out)
{
    const double yx = dot(y, x, m);
    const double yz = dot(y, z, m);
    const double xz = dot(x, z, m);
    for (int a = 0; a < m; ++a)
        out[a] = kappa * (yx * z[a] + yz * x[a] - xz * y[a]);
}

double distance(const Point& a, const Point& b, int n)
{
    double s = 0.0;
    for (int d = 0; d < n; ++d)
        s += (a[d] - b[d]) * (a[d] - b[d]);
    return std::sqrt(s);
}

// Node with every face neighbor active and carrying a jet and a tension.
bool two_ring(const DomainGrid& grid, const kernels::DerivedFields& der, std::size_t node)
{
    if (grid.state(node) != NodeState::active || !der.has_tension[node])
        return false;
    for (int d = 0; d < grid.dim(); ++d)
        for (int s : {-1, 1}) {
            const auto nb = grid.neighbor(node, d, s);
            if (nb < 0 || grid.state(static_cast<std::size_t>(nb)) != NodeState::active || !der.has_jet[nb] ||
                !der.has_tension[nb])
                return false;
        }
    return true;
}

// Every face neighbor carries a value in `q` (finite).
bool neighbors_defined(const DomainGrid& grid, std::span<const double> q, std::size_t node, int stride = 1)
{
    for (int d = 0; d < grid.dim(); ++d)
        for (int s : {-1, 1}) {
            const auto nb = grid.neighbor(node, d, s);
            if (nb < 0 || !std::isfinite(q[static_cast<std::size_t>(nb) * stride]))
                return false;
        }
    return true;
}

double central(const DomainGrid& grid, std::span<const double> q, std::size_t node, int d, int stride = 1,
               int offset = 0)
{
    const auto hi = static_cast<std::size_t>(grid.neighbor(node, d, +1));
    const auto lo = static_cast<std::size_t>(grid.neighbor(node, d, -1));
    return (q[hi * stride + offset] - q[lo * stride + offset]) / (2.0 * grid.h());
}

double laplacian(const DomainGrid& grid, std::span<const double> q, std::size_t node)
{
    double s = 0.0;
    for (int d = 0; d < grid.dim(); ++d) {
        const auto hi = static_cast<std::size_t>(grid.neighbor(node, d, +1));
        const auto lo = static_cast<std::size_t>(grid.neighbor(node, d, -1));
        s += q[hi] - 2.0 * q[node] + q[lo];
    }
    return s / (grid.h() * grid.h());
}

Norms reduce(const DomainGrid& grid, const std::vector<double>& per_node, const std::vector<std::uint8_t>& used,
             std::size_t skipped)
{
    Norms out;
    double l2 = 0.0;
    const auto& w = grid.region_weights();
    for (std::size_t node = 0; node < per_node.size(); ++node) {
        if (!used[node])
            continue;
        const double v = std::abs(per_node[node]);
        out.sup = std::max(out.sup, v);
        l2 += w[node] * v * v;
        ++out.evaluated;
    }
    out.l2 = std::sqrt(l2);
    out.skipped = skipped;
    return out;
}

// Derivative at xs[k] of the quadratic through three (or line through two) points.
double lagrange_slope(const double* xs, const double* fs, int count, int k)
{
    if (count == 2)
        return (fs[1] - fs[0]) / (xs[1] - xs[0]);
    const double x = xs[k];
    double slope = 0.0;
    for (int j = 0; j < 3; ++j) {
        double denom = 1.0;
        double num = 0.0;
        for (int i = 0; i < 3; ++i) {
            if (i == j)
                continue;
            denom *= xs[j] - xs[i];
        }
        // d/dx prod_{i != j} (x - xs[i])
        for (int i = 0; i < 3; ++i) {
            if (i == j)
                continue;
            double term = 1.0;
            for (int l = 0; l < 3; ++l)
                if (l != j && l != i)
                    term *= x - xs[l];
            num += term;
        }
        slope += fs[j] * num / denom;
    }
    return slope;
}

double ball_volume(int n, double r)
{
    switch (n) {
    case 1: return 2.0 * r;
    case 2: return M_PI * r * r;
    default: return 4.0 / 3.0 * M_PI * r * r * r;
    }
}

} // namespace

double sup_dphi(const MapField& field)
{
    const auto der = derive(field, Potential::zero(field.chart()));
    double best = 0.0;
    for (std::size_t node : field.grid().active_nodes())
        if (der.has_jet[node])
            best = std::max(best, std::sqrt(2.0 * der.energy[node]));
    return best;
}

std::vector<Vec> image_points(const MapField& field)
{
    std::vector<Vec> pts;
    pts.reserve(field.grid().valued_nodes().size());
    for (std::size_t node : field.grid().valued_nodes())
        pts.push_back(field.value(node));
    return pts;
}

double image_radius(const MapField& field)
{
    double best = 0.0;
    for (std::size_t node : field.grid().valued_nodes())
        best = std::max(best, distance_from_center(field.chart(), field.value(node)));
    return best;
}

PField p_function(const MapField& field, const Potential& potential)
{
    const auto der = derive(field, potential);
    PField out;
    out.scalar_target = field.m() == 1;
    out.values.assign(field.grid().num_nodes(), kNaN);
    out.min = std::numeric_limits<double>::infinity();
    out.max = -std::numeric_limits<double>::infinity();
    for (std::size_t node : field.grid().active_nodes()) {
        if (!der.has_jet[node])
            continue;
        const double p = der.energy[node] + der.potential[node];
        out.values[node] = p;
        out.min = std::min(out.min, p);
        if (p > out.max) {
            out.max = p;
            out.argmax = node;
        }
    }
    return out;
}

BochnerResidual bochner_residual(const MapField& field, const Potential& potential)
{
    const auto& grid = field.grid();
    const auto& chart = field.chart();
    const int n = grid.dim();
    const int m = field.m();
    const double B = chart.curvature_bound();
    const auto der = derive(field, potential);
    const std::size_t total = grid.num_nodes();

    // |d phi| and P as node fields for the Kato and P-lemma logs.
    std::vector<double> speed(total, kNaN), pfun(total, kNaN), vphi(total, kNaN);
    for (std::size_t node : grid.valued_nodes()) {
        vphi[node] = der.potential[node];
        if (der.has_jet[node]) {
            speed[node] = std::sqrt(2.0 * der.energy[node]);
            pfun[node] = der.energy[node] + der.potential[node];
        }
    }

    BochnerResidual out;
    out.values.assign(total, kNaN);
    std::vector<double> chain(total, kNaN), kato(total, kNaN), kato_size(total, 0.0), plemma(total, kNaN), plemma_sq(total, kNaN);
    std::vector<std::uint8_t> used(total, 0);
    const auto& active = grid.active_nodes();

#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < active.size(); ++k) {
        const std::size_t node = active[k];
        if (!two_ring(grid, der, node))
            continue;
        used[node] = 1;
        const double* y = field.at(node);
        const double q = norm_sq(y, m);
        const double w2 = chart.omega(q) * chart.omega(q);
        const double kappa = chart.log_omega_slope(q);
        const double* X = der.jet.data() + node * n * m;
        const double* tau = der.tension.data() + node * m;

        // |nabla d phi|^2 with nested central differences plus the connection term
        double hess2 = 0.0;
        double gam[kMaxDim];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                christoffel_pair(kappa, y, X + i * m, X + j * m, m, gam);
                for (int a = 0; a < m; ++a) {
                    const double dij = central(grid, der.jet, node, i, n * m, j * m + a);
                    const double h = dij + gam[a];
                    hess2 += h * h;
                }
            }
        hess2 *= w2;

        double gij[kMaxDim][kMaxDim];
        double dphi2 = 0.0;
        double cross = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                gij[i][j] = w2 * dot(X + i * m, X + j * m, m);
                cross += gij[i][j] * gij[i][j];
            }
        for (int i = 0; i < n; ++i)
            dphi2 += gij[i][i];
        const double curvature = B * (dphi2 * dphi2 - cross);

        double tau_term = 0.0;
        for (int i = 0; i < n; ++i) {
            christoffel_pair(kappa, y, X + i * m, tau, m, gam);
            for (int a = 0; a < m; ++a) {
                const double nabla_tau = central(grid, der.tension, node, i, m, a) + gam[a];
                tau_term += nabla_tau * X[i * m + a];
            }
        }
        tau_term *= w2;

        out.values[node] = laplacian(grid, der.energy, node) - (hess2 - curvature + tau_term);

        // Delta V(phi) = dV(tau) + Hess V(d phi, d phi)
        double grad[kMaxDim];
        potential.gradient_at(chart, y, grad);
        const Mat H = covariant_hessian(potential, chart, field.value(node));
        double hess_v = 0.0;
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    hess_v += X[i * m + a] * H(a, b) * X[i * m + b];
        chain[node] = laplacian(grid, vphi, node) - (w2 * dot(grad, tau, m) + hess_v);

        const double s = speed[node];
        if (s > 1e-12) {
            double dspeed2 = 0.0;
            double gp2 = 0.0, gv2 = 0.0, gpv = 0.0;
            for (int i = 0; i < n; ++i) {
                const double ds = central(grid, speed, node, i);
                const double dp = central(grid, pfun, node, i);
                const double dv = central(grid, vphi, node, i);
                dspeed2 += ds * ds;
                gp2 += dp * dp;
                gv2 += dv * dv;
                gpv += dp * dv;
            }
            kato[node] = hess2 - dspeed2;
            kato_size[node] = hess2 + dspeed2;
            const double grad_v2 = w2 * norm_sq(grad, m);
            const double lap_p = laplacian(grid, pfun, node);
            const double common = -curvature + gp2 / (s * s) + gv2 / (s * s) - grad_v2;
            plemma[node] = lap_p - (common - 2.0 * gpv / s);
            plemma_sq[node] = lap_p - (common - 2.0 * gpv / (s * s));
        }
    }

    std::size_t skipped = 0;
    for (std::size_t node : active)
        if (!used[node])
            ++skipped;
    out.norms = reduce(grid, out.values, used, skipped);
    out.chain_rule = reduce(grid, chain, used, skipped);

    out.kato_min_gap = std::numeric_limits<double>::infinity();
    out.p_lemma_min_gap_as_printed = std::numeric_limits<double>::infinity();
    out.p_lemma_min_gap_squared = std::numeric_limits<double>::infinity();
    for (std::size_t node : active) {
        if (!used[node])
            continue;
        if (!std::isfinite(kato[node])) {
            ++out.kato_excluded;
            continue;
        }
        out.kato_min_gap = std::min(out.kato_min_gap, kato[node]);
        // both sides agree to rounding on conformal maps; only resolved gaps count
        if (kato[node] < -(kKatoRounding * kato_size[node] + 1e-24))
            ++out.kato_negative;
        ++out.p_lemma_nodes;
        out.p_lemma_min_gap_as_printed = std::min(out.p_lemma_min_gap_as_printed, plemma[node]);
        out.p_lemma_min_gap_squared = std::min(out.p_lemma_min_gap_squared, plemma_sq[node]);
        if (plemma[node] < 0.0)
            ++out.p_lemma_violations_as_printed;
        if (plemma_sq[node] < 0.0)
            ++out.p_lemma_violations_squared;
    }
    if (out.p_lemma_nodes == 0) {
        out.kato_min_gap = 0.0;
        out.p_lemma_min_gap_as_printed = 0.0;
        out.p_lemma_min_gap_squared = 0.0;
    }
    return out;
}

StressEnergy stress_energy(const MapField& field, const Potential& potential)
{
    const auto& grid = field.grid();
    const int n = grid.dim();
    const int m = field.m();
    const auto der = derive(field, potential);
    const std::size_t total = grid.num_nodes();
    const int nn = n * n;

    StressEnergy out;
    out.tensor.assign(total * nn, kNaN);
    out.divergence.assign(total * n, kNaN);
    for (std::size_t node : grid.valued_nodes()) {
        if (!der.has_jet[node])
            continue;
        const double* X = der.jet.data() + node * n * m;
        const double w = field.chart().omega(norm_sq(field.at(node), m));
        const double ev = der.energy[node] - der.potential[node];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out.tensor[node * nn + i * n + j] = (i == j ? ev : 0.0) - w * w * dot(X + i * m, X + j * m, m);
    }

    std::vector<double> frob(total, 0.0), divn(total, 0.0);
    std::vector<std::uint8_t> used_t(total, 0), used_d(total, 0);
    std::size_t skipped_t = 0, skipped_d = 0;
    for (std::size_t node : grid.active_nodes()) {
        if (!der.has_jet[node]) {
            ++skipped_t;
            ++skipped_d;
            continue;
        }
        double f = 0.0;
        for (int k = 0; k < nn; ++k)
            f += out.tensor[node * nn + k] * out.tensor[node * nn + k];
        frob[node] = std::sqrt(f);
        used_t[node] = 1;
        if (!neighbors_defined(grid, out.tensor, node, nn)) {
            ++skipped_d;
            continue;
        }
        double dn = 0.0;
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s += central(grid, out.tensor, node, i, nn, i * n + j);
            out.divergence[node * n + j] = s;
            dn += s * s;
        }
        divn[node] = std::sqrt(dn);
        used_d[node] = 1;
    }
    out.tensor_norms = reduce(grid, frob, used_t, skipped_t);
    out.divergence_norms = reduce(grid, divn, used_d, skipped_d);
    return out;
}

MonotonicityTable monotonicity_table(const MapField& field, const Potential& potential,
                                     const MonotonicityOptions& options)
{
    const auto& grid = field.grid();
    const auto& chart = field.chart();
    const int n = grid.dim();
    const int m = field.m();
    const auto der = derive(field, potential);
    const std::size_t total = grid.num_nodes();
    const Quadrature quad(field.grid_ptr());
    const Point& c = options.center;

    std::vector<double> ev(total, kNaN), vv(total, kNaN), radial(total, kNaN), ones(total, 1.0);
    double sup_ev = 0.0;
    bool v_nonpositive = true;
    for (std::size_t node : grid.valued_nodes()) {
        if (der.potential[node] > 0.0)
            v_nonpositive = false;
        if (!der.has_jet[node])
            continue;
        ev[node] = der.energy[node] - der.potential[node];
        vv[node] = der.potential[node];
        sup_ev = std::max(sup_ev, std::abs(ev[node]));
        const Point x = grid.coordinate(node);
        const double r = distance(x, c, n);
        double dr[kMaxDim] = {0.0, 0.0, 0.0};
        if (r > 0.0) {
            const double* X = der.jet.data() + node * n * m;
            for (int i = 0; i < n; ++i)
                for (int a = 0; a < m; ++a)
                    dr[a] += (x[i] - c[i]) / r * X[i * m + a];
        }
        const double w = chart.omega(norm_sq(field.at(node), m));
        radial[node] = w * w * norm_sq(dr, m);
    }

    MonotonicityTable table;
    table.v_nonpositive = v_nonpositive;

    // Improved formula: hypotheses B < d and image inside B_R(y0) with R < pi / (2 sqrt d).
    std::vector<double> improved_integrand;
    double a_v = 0.0;
    if (options.d && options.cap_radius) {
        const double d = *options.d;
        const double R = *options.cap_radius;
        const double B = chart.curvature_bound();
        const double img = image_radius(field);
        if (!(B < d))
            table.improved_note = fmt::format("B = {} is not below d = {}", B, d);
        else if (!(R < xi_cap_radius(d)))
            table.improved_note = fmt::format("R = {} is not below pi/(2 sqrt d) = {}", R, xi_cap_radius(d));
        else if (!(img < R))
            table.improved_note = fmt::format("image radius {} is not inside B_R, R = {}", img, R);
        else {
            table.improved_applicable = true;
            const auto pts = image_points(field);
            a_v = theorem_constants_over(potential, chart, pts).a_v;
            const double c2 = d - B;
            table.improved_constant = 16.0 / c2;
            table.improved_note = fmt::format("C = 16/(d - B) = {}, A_V = {}", table.improved_constant, a_v);
            improved_integrand.assign(total, kNaN);
            const double sd = std::sqrt(d);
            for (std::size_t node : grid.valued_nodes()) {
                const double rho = distance_from_center(chart, field.value(node));
                improved_integrand[node] =
                    a_v + sd * potential.gradient_norm_at(chart, field.at(node)) / std::cos(sd * rho);
            }
        }
    } else {
        table.improved_note = "cap parameters d, R not given";
    }

    const double r_in = options.inner_radius;
    double flux_in_ev = 0.0, flux_in_radial = 0.0;
    if (r_in > 0.0) {
        flux_in_ev = r_in * quad.surface_integrate(ev, c, r_in);
        flux_in_radial = r_in * quad.surface_integrate(radial, c, r_in);
    }

    std::vector<double> calib_err;
    std::vector<double> n_values; // r^{-n} int e_V
    // Size of the individual identity terms; normalizes the gap when both sides vanish
    // (two-dimensional conformal maps with V = 0 make every term but two cancel).
    std::vector<double> term_scale;
    for (double r : options.radii) {
        MonotonicityRow row;
        row.r = r;
        try {
            const double int_ev = quad.integrate_ball(ev, c, r);
            const double int_v = quad.integrate_ball(vv, c, r);
            row.m = std::pow(r, 2.0 - n) * int_ev;
            const double flux_ev = r * quad.surface_integrate(ev, c, r);
            const double flux_radial = r * quad.surface_integrate(radial, c, r);
            row.identity_lhs = flux_ev - flux_radial - (flux_in_ev - flux_in_radial);
            row.identity_rhs = (n - 2.0) * int_ev - 2.0 * int_v;
            if (table.improved_applicable)
                row.improved_rhs =
                    -table.improved_constant * std::pow(r, -n - 1.0) * quad.integrate_ball(improved_integrand, c, r);

            double vol = ball_volume(n, r);
            const auto& spec = grid.spec();
            if (spec.region != RegionKind::box) {
                const double outer = std::min(r, spec.radius);
                vol = ball_volume(n, outer);
                if (spec.region == RegionKind::annulus)
                    vol -= ball_volume(n, std::min(r, spec.inner_radius));
            }
            calib_err.push_back(std::pow(r, 2.0 - n) * std::abs(quad.integrate_ball(ones, c, r) - vol) * sup_ev);
            n_values.push_back(std::pow(r, -static_cast<double>(n)) * int_ev);
            term_scale.push_back(std::abs(flux_ev) + std::abs(flux_radial) + std::abs(flux_in_ev) +
                                 std::abs(flux_in_radial) + std::abs(n - 2.0) * std::abs(int_ev) +
                                 2.0 * std::abs(int_v));
        } catch (const RangeError& e) {
            row.skipped = true;
            row.flag = e.what();
            calib_err.push_back(kNaN);
            n_values.push_back(kNaN);
            term_scale.push_back(kNaN);
        }
        table.rows.push_back(row);
    }

    // Centered differences over the kept rows; the two end rows use the adjacent
    // pair (a quadratic extrapolation there can turn negative on monotone data).
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        if (!table.rows[i].skipped)
            kept.push_back(i);
    for (std::size_t k = 0; k < kept.size() && kept.size() >= 2; ++k) {
        std::size_t lo, mid;
        int count = 2;
        if (k == 0) {
            lo = 0;
            mid = 0;
        } else if (k + 1 == kept.size()) {
            lo = k - 1;
            mid = 1;
        } else {
            lo = k - 1;
            mid = 1;
            count = 3;
        }
        double xs[3], ms[3], ns[3], es[3];
        for (int j = 0; j < count; ++j) {
            const auto& row = table.rows[kept[lo + j]];
            xs[j] = row.r;
            ms[j] = row.m;
            ns[j] = n_values[kept[lo + j]];
            es[j] = calib_err[kept[lo + j]];
        }
        auto& row = table.rows[kept[k]];
        row.dm_dr = lagrange_slope(xs, ms, count, static_cast<int>(mid));
        row.improved_lhs = lagrange_slope(xs, ns, count, static_cast<int>(mid));
        double spread = xs[count - 1] - xs[0];
        double err = 0.0;
        for (int j = 0; j < count; ++j)
            err += es[j];
        row.slack = err / spread;
    }
    for (const auto& row : table.rows)
        if (!row.skipped)
            table.eps_quad = std::max(table.eps_quad, 5.0 * row.slack);

    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        auto& row = table.rows[i];
        if (row.skipped)
            continue;
        if (kept.size() >= 2 && row.dm_dr < -table.eps_quad)
            table.monotone = false;
        if (table.improved_applicable && kept.size() >= 2 && row.improved_lhs < row.improved_rhs)
            table.improved_holds = false;
        const double scale = std::max({std::abs(row.identity_rhs), kIdentityScaleFloor * term_scale[i], 1e-300});
        table.identity_max_rel_gap =
            std::max(table.identity_max_rel_gap, std::abs(row.identity_lhs - row.identity_rhs) / scale);
    }
    return table;
}

void validate_ball_params(const TargetChart& chart, double d, double cap_radius)
{
    if (!(d > 0.0))
        throw ConfigError("gradient bound parameter d must be positive");
    if (!(chart.curvature_bound() < d))
        throw ConfigError(fmt::format("gradient bound needs B < d (B = {}, d = {})", chart.curvature_bound(), d));
    if (!(cap_radius > 0.0 && cap_radius < xi_cap_radius(d)))
        throw ConfigError(fmt::format("gradient bound needs 0 < R < pi/(2 sqrt d) = {}, got R = {}",
                                      xi_cap_radius(d), cap_radius));
}

namespace
{

void finish_verdict(BoundCheck& rec, double residual_sup, double tol)
{
    if (!rec.hypotheses_satisfied) {
        rec.verdict = Verdict::not_applicable;
        return;
    }
    if (residual_sup > tol) {
        rec.verdict = Verdict::unconverged;
        return;
    }
    rec.verdict = rec.margin >= 0.0 ? Verdict::pass : Verdict::fail;
}

} // namespace

BoundCheck gradient_bound_ball(const MapField& field, const Potential& potential, const BallBoundParams& params)
{
    const auto& grid = field.grid();
    const auto& chart = field.chart();
    const int n = grid.dim();
    validate_ball_params(chart, params.d, params.cap_radius);

    BoundCheck rec;
    rec.name = "gradient_bound_ball";
    const double B = chart.curvature_bound();
    const double d = params.d;
    const double sd = std::sqrt(d);
    const double c2 = d - B;
    const double cl = 2.0 * n;
    const double img = image_radius(field);
    const auto constants = theorem_constants_over(potential, chart, image_points(field));
    rec.constants = {{"d", d},       {"R", params.cap_radius}, {"B", B},   {"C2", c2},
                     {"C_L", cl},    {"A_V", constants.a_v},   {"a", params.a},
                     {"A_V_negated_reading", constants.a_v_negated_reading}};
    rec.extras["image_radius"] = img;
    if (!(img < params.cap_radius)) {
        rec.note = fmt::format("image radius {} not inside B_R(y0), R = {}", img, params.cap_radius);
        finish_verdict(rec, params.residual_sup, params.tol);
        return rec;
    }
    rec.hypotheses_satisfied = true;
    rec.note = "A_V read as max(0, largest eigenvalue of Hess V) since Ric = 0 on a flat domain";

    const auto der = derive(field, potential);
    auto bound = [&](double a, double r, double cosr, double gradv) {
        const double a2r2 = a * a - r * r;
        const double first = 16.0 * r * sd / (c2 * a2r2 * cosr);
        const double inner = 2.0 * constants.a_v + 2.0 * cl * (1.0 + r) / a2r2 + 16.0 * r * r / (a2r2 * a2r2) +
                             2.0 * sd * gradv / cosr;
        return std::max(first, 2.0 / std::sqrt(c2) * std::sqrt(inner));
    };

    rec.margin = std::numeric_limits<double>::infinity();
    bool monotone_in_a = true;
    double f_max = -1.0, f_max_r = 0.0;
    for (std::size_t node : grid.active_nodes()) {
        if (!der.has_jet[node])
            continue;
        const double r = distance(grid.coordinate(node), params.x0, n);
        if (!(r < params.a))
            continue;
        const Vec y = field.value(node);
        const double rho = distance_from_center(chart, y);
        const double cosr = std::cos(sd * rho);
        const double gradv = potential.gradient_norm_at(chart, y.data());
        const double lhs = std::sqrt(2.0 * der.energy[node]);
        const double rhs = bound(params.a, r, cosr, gradv);
        const double r2 = bound(2.0 * params.a, r, cosr, gradv);
        const double r4 = bound(4.0 * params.a, r, cosr, gradv);
        if (!(rhs >= r2 && r2 >= r4))
            monotone_in_a = false;
        ++rec.nodes;
        if (rhs - lhs < rec.margin) {
            rec.margin = rhs - lhs;
            rec.lhs = lhs;
            rec.rhs = rhs;
            rec.worst_node = node;
            rec.extras["rhs_a"] = rhs;
            rec.extras["rhs_2a"] = r2;
            rec.extras["rhs_4a"] = r4;
        }
        // report-only auxiliary function F = (a^2 - r^2)^2 |d phi|^2 / xi^2
        const double xi = sd * cosr;
        const double f = std::pow(params.a * params.a - r * r, 2) * lhs * lhs / (xi * xi);
        if (f > f_max) {
            f_max = f;
            f_max_r = r;
        }
    }
    if (rec.nodes == 0)
        rec.margin = 0.0;
    rec.extras["rhs_monotone_in_a"] = monotone_in_a ? 1.0 : 0.0;
    rec.extras["F_max"] = f_max;
    rec.extras["F_max_r"] = f_max_r;
    finish_verdict(rec, params.residual_sup, params.tol);
    return rec;
}

BoundCheck gradient_bound_energy2(const MapField& field, const Potential& potential, const Energy2Params& params)
{
    const auto& grid = field.grid();
    const auto& chart = field.chart();
    const int n = grid.dim();

    BoundCheck rec;
    rec.name = params.corollary ? "gradient_bound_energy2_corollary" : "gradient_bound_energy2";
    const auto constants = theorem_constants_over(potential, chart, image_points(field));
    const double c3 = constants.c3;
    const double cl = 2.0 * n;
    const double A = 0.0; // flat domain
    rec.constants = {{"B", chart.curvature_bound()}, {"C3", c3}, {"C_L", cl}, {"A", A}, {"a", params.a}};
    if (!constants.energy2_condition || !(c3 > 0.0)) {
        rec.note = "V > 0 and -Hess V > B V g fail on the image";
        finish_verdict(rec, params.residual_sup, params.tol);
        return rec;
    }
    if (params.corollary && grid.bc() != BoundaryCondition::periodic) {
        rec.note = "whole-space limit needs a periodic (entire) configuration";
        finish_verdict(rec, params.residual_sup, params.tol);
        return rec;
    }
    rec.hypotheses_satisfied = true;
    rec.note = "rhs as printed (no |grad V| in the first term); the proof-consistent rhs is in extras";

    const auto der = derive(field, potential);
    if (params.corollary) {
        const double sup = sup_dphi(field);
        const double threshold = 10.0 * params.tol;
        rec.lhs = sup;
        rec.rhs = threshold;
        rec.margin = threshold - sup;
        rec.nodes = grid.active_nodes().size();
        finish_verdict(rec, params.residual_sup, params.tol);
        return rec;
    }

    rec.margin = std::numeric_limits<double>::infinity();
    double proof_margin = std::numeric_limits<double>::infinity();
    for (std::size_t node : grid.active_nodes()) {
        if (!der.has_jet[node])
            continue;
        const double r = distance(grid.coordinate(node), params.x0, n);
        if (!(r < params.a))
            continue;
        const double v = der.potential[node];
        const double gradv = potential.gradient_norm_at(chart, field.at(node));
        const double a2r2 = params.a * params.a - r * r;
        const double second =
            2.0 / std::sqrt(c3) * std::sqrt(2.0 * A + 2.0 * cl * (1.0 + r) / a2r2 + 16.0 * r * r / (a2r2 * a2r2));
        const double rhs = std::max(16.0 * r / (c3 * a2r2 * v), second);
        const double rhs_proof = std::max(16.0 * r * gradv / (c3 * a2r2 * v), second);
        const double lhs = std::sqrt(2.0 * der.energy[node]);
        ++rec.nodes;
        proof_margin = std::min(proof_margin, rhs_proof - lhs);
        if (rhs - lhs < rec.margin) {
            rec.margin = rhs - lhs;
            rec.lhs = lhs;
            rec.rhs = rhs;
            rec.worst_node = node;
        }
    }
    if (rec.nodes == 0) {
        rec.margin = 0.0;
        proof_margin = 0.0;
    }
    rec.extras["proof_reading_margin"] = proof_margin;
    rec.extras["proof_reading_pass"] = proof_margin >= 0.0 ? 1.0 : 0.0;
    finish_verdict(rec, params.residual_sup, params.tol);
    return rec;
}

LiouvilleIntegrals liouville_integrals(const MapField& field, const Potential& potential, double slack)
{
    const auto& grid = field.grid();
    const int n = grid.dim();
    LiouvilleIntegrals out;
    out.slack = slack;
    if (n < 3) {
        out.note = "needs dim M >= 3";
        return out;
    }
    if (grid.bc() != BoundaryCondition::free) {
        out.note = "needs a finite-energy configuration on the whole space (free outer boundary)";
        return out;
    }
    out.applicable = true;
    const auto der = derive(field, potential);
    const std::size_t total = grid.num_nodes();
    std::vector<double> grad2(total, kNaN), vv(total, kNaN);
    for (std::size_t node : grid.valued_nodes()) {
        if (!der.has_jet[node])
            continue;
        grad2[node] = 2.0 * der.energy[node];
        vv[node] = der.potential[node];
    }
    const Quadrature quad(field.grid_ptr());
    out.dirichlet_integral = quad.integrate(grad2);
    out.potential_integral = n / (n - 2.0) * quad.integrate(vv);
    out.inequality_holds = out.dirichlet_integral <= out.potential_integral + slack;
    out.verdict = out.inequality_holds ? Verdict::pass : Verdict::fail;
    return out;
}

namespace
{

double probe_radius(const MapField& field)
{
    return std::max(image_radius(field), 1e-3);
}

} // namespace

std::string liouville_flow_gate(const MapField& initial, const Potential& potential)
{
    const auto& chart = initial.chart();
    if (chart.curvature_bound() > 0.0)
        return "needs a target with K <= 0";
    if (initial.grid().bc() != BoundaryCondition::periodic)
        return "needs a periodic (finite-energy) configuration";
    const double probe = probe_radius(initial);
    if (!theorem_constants(potential, chart, probe).concave)
        return fmt::format("V is not concave on the probe ball of radius {}", probe);
    return {};
}

LiouvilleFlowRecord liouville_flow_experiment(const MapField& initial, const Potential& potential,
                                              const FlowOptions& options, std::optional<FlowResult>* run)
{
    const auto& chart = initial.chart();
    LiouvilleFlowRecord out;
    out.threshold = 10.0 * options.tol;
    out.note = liouville_flow_gate(initial, potential);
    if (!out.note.empty())
        return out;
    out.applicable = true;
    out.note = fmt::format("concavity probed on the geodesic ball of radius {}", probe_radius(initial));

    auto result = run_to_convergence(initial, potential, options);
    out.converged = result.converged;
    out.steps = result.steps;
    out.sup_dphi = sup_dphi(result.field);

    const auto& grid = result.field.grid();
    Vec mean = Vec::Zero(initial.m());
    for (std::size_t node : grid.active_nodes())
        mean += result.field.value(node);
    mean /= static_cast<double>(grid.active_nodes().size());
    out.limit_point = mean;
    out.limit_distance = distance_from_center(chart, mean);
    out.limit_gradient = potential.gradient_norm_at(chart, mean.data());
    out.limit_is_critical = out.limit_gradient <= 10.0 * options.tol;
    if (!out.converged)
        out.verdict = Verdict::unconverged;
    else
        out.verdict = out.sup_dphi <= out.threshold ? Verdict::pass : Verdict::fail;
    if (run)
        run->emplace(std::move(result));
    return out;
}

} // namespace hmp
