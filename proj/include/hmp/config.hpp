#pragma once

#include "hmp/diagnostics.hpp"
#include "hmp/flow.hpp"
#include "hmp/grid.hpp"
#include "hmp/potentials.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hmp
{

enum class InitialKind
{
    constant, // value = center
    kink,     // tanh(x_1 / sqrt 2) * amplitude, scalar target
    instanton, // y = x / scale (first min(n, m) components)
    hedgehog,  // y = x / |x|, n = m
    angular,   // amplitude (r / radius)^power (cos w theta, sin w theta); n, m >= 2
    affine,    // center + A x
    random,    // center plus smoothed noise (noise_amplitude > 0)
};

std::string to_string(InitialKind kind);
InitialKind parse_initial_kind(const std::string& name);

struct InitialSpec
{
    InitialKind kind = InitialKind::constant;
    std::vector<double> center;      // chart point; zero when empty
    double amplitude = 1.0;
    double scale = 1.0;
    double radius = 1.0;
    int winding = 1;
    double power = 1.0;
    std::vector<double> matrix;      // affine: n x m, row-major (row i is d_i phi)
    /// Smoothed noise added on active nodes only; Dirichlet data stay exact.
    double noise_amplitude = 0.0;
};

/// Names understood in `[diagnostics] list`.
inline const std::set<std::string>& known_diagnostics()
{
    static const std::set<std::string> names{
        "residual",    "p_function",   "bochner",        "stress_energy",      "monotonicity",
        "ball_bound",  "energy2",      "liouville_integrals", "liouville_flow", "dissipation",
    };
    return names;
}

struct MonotonicitySettings
{
    std::vector<double> radii;
    Point center{0.0, 0.0, 0.0};
    double inner_radius = 0.0;
    std::optional<double> d;
    std::optional<double> cap_radius;
};

struct BallSettings
{
    double a = 1.0;
    Point x0{0.0, 0.0, 0.0};
    double d = 1.0;
    double cap_radius = 0.5;
};

struct Energy2Settings
{
    double a = 1.0;
    Point x0{0.0, 0.0, 0.0};
    bool corollary = false;
};

/// Thresholds asserted in summary.txt; unset entries are reported without a verdict.
struct AssertionSettings
{
    std::optional<double> residual_sup;       // defaults to flow.tol
    std::optional<double> p_max;              // Modica regime, scalar targets
    std::optional<double> bochner_sup;
    std::optional<double> stress_tensor_sup;
    std::optional<double> stress_div_sup;
    std::optional<double> identity_rel_gap;
    std::optional<double> solution_error;     // vs the noise-free initializer
    std::optional<double> liouville_integrals_max;
    std::optional<double> limit_distance;
    bool require_convergence = true;
    bool require_dissipation = true;
    /// refine: metrics whose empirical order must lie in [order_min, order_max].
    std::vector<std::string> refine_metrics;
    double order_min = 1.8;
    double order_max = std::numeric_limits<double>::infinity();
};

struct ExperimentConfig
{
    std::string name = "experiment";
    std::optional<std::uint64_t> seed;

    GridSpec grid;
    /// Ball/annulus lattice extents derived from radius, h and boundary_layers.
    bool auto_extent = false;
    std::size_t node_cap = 4'000'000;

    GeometryKind geometry = GeometryKind::euclidean;
    int target_dim = 1;
    double curvature_scale = 1.0;

    PotentialKind potential = PotentialKind::zero;
    std::vector<double> coefficients;

    InitialSpec initial;

    bool run_flow = true;
    FlowOptions flow;

    std::vector<std::string> diagnostics;
    MonotonicitySettings monotonicity;
    BallSettings ball;
    Energy2Settings energy2;
    AssertionSettings assertions;

    /// Verbatim config text, echoed into the artifact directory.
    std::string source_text;

    TargetChart chart() const { return TargetChart(geometry, target_dim, curvature_scale); }
    Potential make_potential() const { return Potential(potential, coefficients, chart()); }
    bool wants(const std::string& diagnostic) const;
};

/// Parses and validates; ParseError on malformed text, ConfigError on bad values.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Lattice bounds covering a ball/annulus region plus its Dirichlet band.
void fit_extent(GridSpec& spec);

/// Number of lattice nodes the grid spec would allocate.
std::size_t estimated_nodes(const GridSpec& spec);

} // namespace hmp
