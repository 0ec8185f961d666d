#include "node_ops.hpp"

#include <exception>

namespace hmp::kernels::omp
{

namespace
{

std::size_t block_count(std::size_t items)
{
    return (items + kReductionBlock - 1) / kReductionBlock;
}

// Exceptions may not cross an OpenMP region; capture the first and rethrow.
class ExceptionSlot
{
public:
    template <class F>
    void run(F&& f)
    {
        try {
            f();
        } catch (...) {
#pragma omp critical(hmp_exception_slot)
            if (!error_)
                error_ = std::current_exception();
        }
    }
    void rethrow() const
    {
        if (error_)
            std::rethrow_exception(error_);
    }

private:
    std::exception_ptr error_;
};

} // namespace

SweepResult flow_sweep(const DomainGrid& grid, const TargetChart& chart, const Potential& pot,
                       const std::vector<std::int64_t>& sources, std::span<const double> in, std::span<double> out,
                       double dt)
{
    const auto& active = grid.active_nodes();
    const auto& quad = grid.quadrature_nodes();
    const auto& weights = grid.region_weights();
    const std::size_t nb_active = block_count(active.size());
    const std::size_t nb_quad = block_count(quad.size());

    std::vector<double> sup(nb_active, 0.0), l2(nb_active, 0.0), energy(nb_quad, 0.0);
    std::vector<std::int64_t> bad(nb_active, -1);
    ExceptionSlot slot;

#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < nb_active; ++b) {
        slot.run([&] {
            const std::size_t end = std::min(active.size(), (b + 1) * kReductionBlock);
            for (std::size_t k = b * kReductionBlock; k < end; ++k) {
                const std::size_t node = active[k];
                const auto u = detail::update_node(grid, chart, pot, in.data(), out.data(), node, dt);
                if (u.left_chart && bad[b] < 0)
                    bad[b] = static_cast<std::int64_t>(node);
                sup[b] = std::max(sup[b], u.residual_g);
                l2[b] += weights[node] * u.residual_g * u.residual_g;
            }
        });
    }
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < nb_quad; ++b) {
        slot.run([&] {
            const std::size_t end = std::min(quad.size(), (b + 1) * kReductionBlock);
            for (std::size_t k = b * kReductionBlock; k < end; ++k)
                energy[b] += detail::energy_node(grid, chart, pot, in.data(), sources, quad[k]);
        });
    }
    slot.rethrow();

    SweepResult res;
    for (std::size_t b = 0; b < nb_active; ++b) {
        res.residual_sup = std::max(res.residual_sup, sup[b]);
        res.residual_l2_sq += l2[b];
        if (res.bad_node < 0)
            res.bad_node = bad[b];
    }
    for (double e : energy)
        res.energy += e;
    return res;
}

void derived_fields(const DomainGrid& grid, const TargetChart& chart, const Potential& pot,
                    std::span<const double> values, DerivedFields& out)
{
    detail::reset_derived(grid, chart.dim(), out);
    const auto& nodes = grid.valued_nodes();
    ExceptionSlot slot;
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < nodes.size(); ++k)
        slot.run([&] { detail::derive_node(grid, chart, pot, values.data(), nodes[k], out); });
    slot.rethrow();
}

double max_stiffness(const DomainGrid& grid, const TargetChart& chart, const Potential& pot,
                     std::span<const double> values)
{
    const auto& active = grid.active_nodes();
    double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
    for (std::size_t k = 0; k < active.size(); ++k) {
        double jet[kMaxJet];
        if (!differential_at(grid, chart.dim(), values.data(), active[k], jet))
            continue;
        best = std::max(best, stiffness_at(grid, chart, pot, values.data(), active[k], jet));
    }
    return best;
}

} // namespace hmp::kernels::omp
