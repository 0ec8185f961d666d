#include "hmp/initial.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>

namespace hmp
{

Vec initial_value(const InitialSpec& spec, const TargetChart& chart, int n, const Point& x)
{
    const int m = chart.dim();
    Vec y = Vec::Zero(m);
    if (!spec.center.empty())
        for (int a = 0; a < m; ++a)
            y[a] = spec.center[a];

    switch (spec.kind) {
    case InitialKind::constant:
    case InitialKind::random:
        break;
    case InitialKind::kink:
        y[0] += spec.amplitude * std::tanh(x[0] / std::sqrt(2.0));
        break;
    case InitialKind::instanton:
        for (int a = 0; a < std::min(n, m); ++a)
            y[a] += x[a] / spec.scale;
        break;
    case InitialKind::hedgehog: {
        double r = 0.0;
        for (int d = 0; d < n; ++d)
            r += x[d] * x[d];
        r = std::sqrt(r);
        if (r == 0.0)
            throw ChartDomainError("hedgehog is undefined at the origin; exclude it from the region");
        for (int d = 0; d < n; ++d)
            y[d] += spec.amplitude * x[d] / r;
        break;
    }
    case InitialKind::angular: {
        const double r = std::hypot(x[0], x[1]);
        const double theta = std::atan2(x[1], x[0]);
        const double s = spec.amplitude * std::pow(r / spec.radius, spec.power);
        y[0] += s * std::cos(spec.winding * theta);
        y[1] += s * std::sin(spec.winding * theta);
        break;
    }
    case InitialKind::affine:
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < m; ++a)
                y[a] += spec.matrix[i * m + a] * x[i];
        break;
    }
    return y;
}

namespace
{

// One pass of the (1/4, 1/2, 1/4) kernel along axis d on the whole lattice.
void smooth_axis(const DomainGrid& grid, int m, int d, std::vector<double>& noise)
{
    const std::vector<double> src = noise;
    for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
        const auto lo = grid.neighbor(node, d, -1);
        const auto hi = grid.neighbor(node, d, +1);
        const std::size_t l = lo >= 0 ? static_cast<std::size_t>(lo) : node;
        const std::size_t r = hi >= 0 ? static_cast<std::size_t>(hi) : node;
        for (int a = 0; a < m; ++a)
            noise[node * m + a] = 0.25 * src[l * m + a] + 0.5 * src[node * m + a] + 0.25 * src[r * m + a];
    }
}

} // namespace

MapField build_initial_field(const ExperimentConfig& cfg, std::shared_ptr<const DomainGrid> grid)
{
    const TargetChart chart = cfg.chart();
    const int n = grid->dim();
    const int m = chart.dim();
    MapField field(grid, chart);
    for (std::size_t node : grid->valued_nodes())
        field.set(node, initial_value(cfg.initial, chart, n, grid->coordinate(node)));
    field.require_chart_valid();

    const double amp = cfg.initial.noise_amplitude;
    if (amp <= 0.0)
        return field;

    std::mt19937_64 rng(*cfg.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> noise(grid->num_nodes() * m);
    for (double& v : noise)
        v = uni(rng);
    for (int d = 0; d < n; ++d)
        smooth_axis(*grid, m, d, noise);

    // Global shrink factor keeping |y| <= 0.9 R for charts with a finite radius.
    double factor = 1.0;
    const double limit = 0.9 * chart.validity_radius();
    if (std::isfinite(limit)) {
        for (std::size_t node : grid->active_nodes()) {
            const Vec base = field.value(node);
            Vec eta(m);
            for (int a = 0; a < m; ++a)
                eta[a] = amp * noise[node * m + a];
            const double room = limit - base.norm();
            if (!(room > 0.0))
                throw ConfigError(fmt::format("initial data at node {} already leave 90% of the chart", node));
            if (eta.norm() > room)
                factor = std::min(factor, room / eta.norm());
        }
    }
    for (std::size_t node : grid->active_nodes())
        for (int a = 0; a < m; ++a)
            field.at(node)[a] += factor * amp * noise[node * m + a];
    field.require_chart_valid();
    return field;
}

} // namespace hmp
