#include "node_ops.hpp"

namespace hmp::kernels::serial
{

SweepResult flow_sweep(const DomainGrid& grid, const TargetChart& chart, const Potential& pot,
                       const std::vector<std::int64_t>& sources, std::span<const double> in, std::span<double> out,
                       double dt)
{
    // Sums run in kReductionBlock chunks, the same association as the OpenMP
    // kernel, so both backends produce identical bits.
    SweepResult res;
    const auto& weights = grid.region_weights();
    const auto& active = grid.active_nodes();
    double l2_block = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k) {
        const std::size_t node = active[k];
        const auto u = detail::update_node(grid, chart, pot, in.data(), out.data(), node, dt);
        if (u.left_chart && res.bad_node < 0)
            res.bad_node = static_cast<std::int64_t>(node);
        res.residual_sup = std::max(res.residual_sup, u.residual_g);
        l2_block += weights[node] * u.residual_g * u.residual_g;
        if ((k + 1) % kReductionBlock == 0 || k + 1 == active.size()) {
            res.residual_l2_sq += l2_block;
            l2_block = 0.0;
        }
    }
    const auto& quad = grid.quadrature_nodes();
    double e_block = 0.0;
    for (std::size_t k = 0; k < quad.size(); ++k) {
        e_block += detail::energy_node(grid, chart, pot, in.data(), sources, quad[k]);
        if ((k + 1) % kReductionBlock == 0 || k + 1 == quad.size()) {
            res.energy += e_block;
            e_block = 0.0;
        }
    }
    return res;
}

void derived_fields(const DomainGrid& grid, const TargetChart& chart, const Potential& pot,
                    std::span<const double> values, DerivedFields& out)
{
    detail::reset_derived(grid, chart.dim(), out);
    for (std::size_t node : grid.valued_nodes())
        detail::derive_node(grid, chart, pot, values.data(), node, out);
}

double max_stiffness(const DomainGrid& grid, const TargetChart& chart, const Potential& pot,
                     std::span<const double> values)
{
    double best = 0.0;
    double jet[kMaxJet];
    for (std::size_t node : grid.active_nodes()) {
        if (!differential_at(grid, chart.dim(), values.data(), node, jet))
            continue;
        best = std::max(best, stiffness_at(grid, chart, pot, values.data(), node, jet));
    }
    return best;
}

} // namespace hmp::kernels::serial
