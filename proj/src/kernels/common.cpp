#include "hmp/kernels.hpp"

#include <deque>
#include <unordered_set>

namespace hmp::kernels
{

double stiffness_at(const DomainGrid& grid, const TargetChart& chart, const Potential& pot, const double* values,
                    std::size_t node, const double* jet)
{
    const int n = grid.dim();
    const int m = chart.dim();
    const double* y = values + node * m;
    double q = 0.0;
    for (int a = 0; a < m; ++a)
        q += y[a] * y[a];
    const double s = std::sqrt(q);

    double lpot = 0.0;
    if (pot.kind() != PotentialKind::zero) {
        const auto [radial, tangential] = pot.hessian_eigenvalues_at(chart, y);
        double grad[kMaxDim];
        pot.gradient_at(chart, y, grad);
        double gnorm = 0.0;
        for (int a = 0; a < m; ++a)
            gnorm += grad[a] * grad[a];
        lpot = std::max(std::abs(radial), std::abs(tangential)) +
               2.0 * std::abs(chart.log_omega_slope(q)) * s * std::sqrt(gnorm);
    }

    const double kappa = std::abs(chart.log_omega_slope(q));
    if (kappa == 0.0)
        return lpot;
    double row_sum = 0.0;
    double frob = 0.0;
    for (int i = 0; i < n; ++i) {
        double xx = 0.0;
        for (int a = 0; a < m; ++a)
            xx += jet[i * m + a] * jet[i * m + a];
        // weights (3 + 4 + 1) / 2h of a one-sided difference against 2 / 2h centered
        const auto lo = grid.neighbor(node, i, -1);
        const auto hi = grid.neighbor(node, i, +1);
        const bool centered = lo >= 0 && hi >= 0 && grid.has_value(lo) && grid.has_value(hi);
        row_sum += (centered ? 1.0 : 4.0) * std::sqrt(xx);
        frob += xx;
    }
    const double dkappa = std::abs(chart.log_omega_slope_derivative(q));
    return lpot + 6.0 * kappa * s * row_sum / grid.h() + 3.0 * (kappa + 2.0 * dkappa * q) * frob;
}

std::vector<std::int64_t> quadrature_sources(const DomainGrid& grid, int m)
{
    const std::size_t total = grid.num_nodes();
    std::vector<double> zeros(total * static_cast<std::size_t>(m), 0.0);
    double jet[kMaxJet];
    auto jet_ok = [&](std::size_t node) {
        return grid.has_value(node) && differential_at(grid, m, zeros.data(), node, jet);
    };

    std::vector<std::int64_t> sources(total, -1);
    for (std::size_t node = 0; node < total; ++node) {
        if (!(grid.has_value(node) || grid.region_weights()[node] > 0.0))
            continue;
        if (jet_ok(node)) {
            sources[node] = static_cast<std::int64_t>(node);
            continue;
        }
        // nearest usable node by face-graph distance, ties broken by visiting order
        std::deque<std::pair<std::size_t, int>> queue{{node, 0}};
        std::unordered_set<std::size_t> seen{node};
        while (!queue.empty() && sources[node] < 0) {
            auto [cur, depth] = queue.front();
            queue.pop_front();
            if (depth >= 4)
                break;
            for (int d = 0; d < grid.dim() && sources[node] < 0; ++d)
                for (int s : {-1, 1}) {
                    const auto other = grid.neighbor(cur, d, s);
                    if (other < 0 || !seen.insert(static_cast<std::size_t>(other)).second)
                        continue;
                    if (jet_ok(static_cast<std::size_t>(other))) {
                        sources[node] = other;
                        break;
                    }
                    queue.emplace_back(static_cast<std::size_t>(other), depth + 1);
                }
        }
    }
    return sources;
}

} // namespace hmp::kernels
