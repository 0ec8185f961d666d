#pragma once

#include "hmp/fields.hpp"
#include "hmp/flow.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hmp
{

enum class Verdict
{
    pass,
    fail,
    not_applicable,
    unconverged,
};

std::string to_string(Verdict v);

struct Norms
{
    double sup = 0.0;
    double l2 = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

// ---------------------------------------------------------------- P-function

struct PField
{
    std::vector<double> values; // per node, NaN where undefined
    double min = 0.0;
    double max = 0.0;
    std::size_t argmax = 0;
    /// Scalar target: the Modica regime where max P <= slack is asserted.
    bool scalar_target = false;
};

/// P = 1/2 |d phi|^2 + V(phi) on the active nodes.
PField p_function(const MapField& field, const Potential& potential);

// ------------------------------------------------------- Bochner and friends

struct BochnerResidual
{
    /// Delta 1/2|d phi|^2 - (|nabla d phi|^2 - curvature term + <nabla tau, d phi>), per node.
    std::vector<double> values;
    Norms norms;
    /// Delta V(phi) - dV(tau) - Hess V(d phi, d phi).
    Norms chain_rule;

    /// Kato: |nabla d phi|^2 - |d|d phi||^2 over nodes with |d phi| > 0 (logged only).
    double kato_min_gap = 0.0;
    std::size_t kato_negative = 0;
    std::size_t kato_excluded = 0;

    /// Lemma on Delta P, logged only. The mixed term is evaluated as printed
    /// (divided by |d phi|) and, separately, divided by |d phi|^2.
    std::size_t p_lemma_nodes = 0;
    std::size_t p_lemma_violations_as_printed = 0;
    std::size_t p_lemma_violations_squared = 0;
    double p_lemma_min_gap_as_printed = 0.0;
    double p_lemma_min_gap_squared = 0.0;
};

/// Nodes need a two-ring stencil (every face neighbor active with a full jet);
/// others are skipped and counted.
BochnerResidual bochner_residual(const MapField& field, const Potential& potential);

// ------------------------------------------------------------- stress-energy

struct StressEnergy
{
    std::vector<double> tensor;     // n*n per node (row-major), NaN where undefined
    std::vector<double> divergence; // n per node, NaN where undefined
    Norms tensor_norms;             // Frobenius norm over active nodes
    Norms divergence_norms;
};

/// S_ij = (1/2|d phi|^2 - V) delta_ij - g(d_i phi, d_j phi); div S by central differences.
StressEnergy stress_energy(const MapField& field, const Potential& potential);

// ---------------------------------------------------------- monotonicity

struct MonotonicityOptions
{
    Point center{0.0, 0.0, 0.0};
    std::vector<double> radii;
    /// Annulus adaptation: the flux through |x - center| = inner_radius is
    /// subtracted from the left side of the balance law (0 disables it).
    double inner_radius = 0.0;
    /// Cap parameters for the improved formula; unset disables it.
    std::optional<double> d;
    std::optional<double> cap_radius;
};

struct MonotonicityRow
{
    double r = 0.0;
    double m = 0.0;     // r^{2-n} int_{B_r} e_V
    double dm_dr = 0.0; // centered differences over the table
    double identity_lhs = 0.0;
    double identity_rhs = 0.0;
    double improved_lhs = 0.0; // d/dr r^{-n} int_{B_r} e_V
    double improved_rhs = 0.0; // -C r^{-n-1} int (A_V + sqrt d |grad V| / cos(sqrt d rho))
    double slack = 0.0;        // quadrature slack of dm_dr from the calibration run
    bool skipped = false;
    std::string flag;
};

struct MonotonicityTable
{
    std::vector<MonotonicityRow> rows;
    double eps_quad = 0.0;
    bool v_nonpositive = false;
    /// dM/dr >= -eps_quad on every row (asserted only when v_nonpositive).
    bool monotone = true;
    bool improved_applicable = false;
    std::string improved_note;
    double improved_constant = 0.0;
    bool improved_holds = true; // warning only
    /// max over rows of |lhs - rhs| / max(|rhs|, tiny).
    double identity_max_rel_gap = 0.0;
};

MonotonicityTable monotonicity_table(const MapField& field, const Potential& potential,
                                     const MonotonicityOptions& options);

// ------------------------------------------------------------ bound checks

struct BoundCheck
{
    std::string name;
    bool hypotheses_satisfied = false;
    std::string note;
    double lhs = 0.0;    // |d phi| at the tightest node
    double rhs = 0.0;    // bound at the tightest node
    double margin = 0.0; // min over nodes of rhs - lhs
    std::size_t worst_node = 0;
    std::size_t nodes = 0;
    Verdict verdict = Verdict::not_applicable;
    std::map<std::string, double> constants;
    std::map<std::string, double> extras;
};

struct BallBoundParams
{
    double a = 1.0;
    Point x0{0.0, 0.0, 0.0};
    double d = 1.0;
    double cap_radius = 0.5;
    /// Residual of the field and the flow tolerance: residual > tol -> UNCONVERGED.
    double residual_sup = 0.0;
    double tol = std::numeric_limits<double>::infinity();
};

/// Throws ConfigError unless B < d and R < pi / (2 sqrt d).
void validate_ball_params(const TargetChart& chart, double d, double cap_radius);

BoundCheck gradient_bound_ball(const MapField& field, const Potential& potential, const BallBoundParams& params);

struct Energy2Params
{
    double a = 1.0;
    Point x0{0.0, 0.0, 0.0};
    /// Whole-space limit a -> infinity: asserts sup |d phi| <= 10 tol.
    bool corollary = false;
    double residual_sup = 0.0;
    double tol = std::numeric_limits<double>::infinity();
};

BoundCheck gradient_bound_energy2(const MapField& field, const Potential& potential, const Energy2Params& params);

// ---------------------------------------------------------------- Liouville

struct LiouvilleIntegrals
{
    bool applicable = false;
    std::string note;
    double dirichlet_integral = 0.0;  // int |d phi|^2
    double potential_integral = 0.0;  // n/(n-2) int V
    bool inequality_holds = false;
    double slack = 0.0;
    Verdict verdict = Verdict::not_applicable;
};

/// Verdict PASS when int |d phi|^2 <= n/(n-2) int V + slack on a finite-energy
/// (free boundary) configuration with n >= 3.
LiouvilleIntegrals liouville_integrals(const MapField& field, const Potential& potential, double slack = 1e-10);

struct LiouvilleFlowRecord
{
    bool applicable = false;
    std::string note;
    bool converged = false;
    long steps = 0;
    double sup_dphi = 0.0;
    double threshold = 0.0;
    Vec limit_point;
    double limit_distance = 0.0; // rho of the limit from y0
    double limit_gradient = 0.0; // |grad V|_g at the limit
    bool limit_is_critical = false;
    Verdict verdict = Verdict::not_applicable;
};

/// Hypothesis gate of the flow experiment: empty when it applies, else the reason.
std::string liouville_flow_gate(const MapField& initial, const Potential& potential);

/// Runs the flow from `initial` (periodic box, target with B <= 0, concave V)
/// and checks that the limit is constant: sup |d phi| <= 10 tol.
LiouvilleFlowRecord liouville_flow_experiment(const MapField& initial, const Potential& potential,
                                              const FlowOptions& options, std::optional<FlowResult>* run = nullptr);

// ---------------------------------------------------------------- helpers

/// max over active nodes of |d phi|_g.
double sup_dphi(const MapField& field);

/// Image points (values of all valued nodes) and the largest distance from y0 among them.
std::vector<Vec> image_points(const MapField& field);
double image_radius(const MapField& field);

} // namespace hmp
