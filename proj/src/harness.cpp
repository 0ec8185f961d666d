#include "hmp/harness.hpp"

#include "hmp/initial.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace hmp
{

void VerdictCounts::add(Verdict v)
{
    switch (v) {
    case Verdict::pass: ++pass; break;
    case Verdict::fail: ++fail; break;
    case Verdict::not_applicable: ++not_applicable; break;
    case Verdict::unconverged: ++unconverged; break;
    }
}

void VerdictCounts::add(const VerdictCounts& o)
{
    pass += o.pass;
    fail += o.fail;
    not_applicable += o.not_applicable;
    unconverged += o.unconverged;
}

VerdictCounts ExperimentOutcome::counts() const
{
    VerdictCounts c;
    for (const auto& a : assertions)
        c.add(a.verdict);
    return c;
}

VerdictCounts RefinementStudy::counts() const
{
    VerdictCounts c;
    for (const auto& a : assertions)
        c.add(a.verdict);
    return c;
}

std::string format_summary(const std::string& title, const std::vector<Assertion>& assertions,
                           const std::vector<std::string>& warnings)
{
    std::string out = fmt::format("# {}\n", title);
    for (const auto& a : assertions)
        out += fmt::format("{:<15} {:<22} {:<26} {}\n", to_string(a.verdict), a.anchor, a.name, a.detail);
    for (const auto& w : warnings)
        out += fmt::format("{:<15} {}\n", "WARN", w);
    return out;
}

namespace
{

using io::Json;
using io::format_double;

std::string fmt_num(double x)
{
    return fmt::format("{:.6g}", x);
}

// Threshold assertion that degrades to UNCONVERGED when the field is not a solution.
Assertion threshold(std::string anchor, std::string name, double value, double limit, bool converged,
                    const std::string& what)
{
    Assertion a{Verdict::pass, std::move(anchor), std::move(name), ""};
    a.detail = fmt::format("{} = {} <= {}", what, fmt_num(value), fmt_num(limit));
    if (!std::isfinite(value) || value > limit)
        a.verdict = converged ? Verdict::fail : Verdict::unconverged;
    return a;
}

Json norms_json(const Norms& n)
{
    return Json{{"sup", n.sup}, {"l2", n.l2}, {"evaluated", n.evaluated}, {"skipped", n.skipped}};
}

Json vec_json(const Vec& v)
{
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i)
        a.push_back(v[i]);
    return a;
}

Json point_json(const Point& p, int n)
{
    Json a = Json::array();
    for (int i = 0; i < n; ++i)
        a.push_back(p[i]);
    return a;
}

Json bound_json(const BoundCheck& b)
{
    Json j{{"name", b.name},
           {"hypotheses_satisfied", b.hypotheses_satisfied},
           {"note", b.note},
           {"lhs", b.lhs},
           {"rhs", b.rhs},
           {"margin", b.margin},
           {"worst_node", b.worst_node},
           {"nodes", b.nodes},
           {"verdict", to_string(b.verdict)}};
    Json c = Json::object();
    for (const auto& [k, v] : b.constants)
        c[k] = v;
    Json e = Json::object();
    for (const auto& [k, v] : b.extras)
        e[k] = v;
    j["constants"] = c;
    j["extras"] = e;
    return j;
}

double solution_error(const MapField& field, const ExperimentConfig& cfg)
{
    double err = 0.0;
    for (std::size_t node : field.grid().valued_nodes()) {
        const Vec exact = initial_value(cfg.initial, field.chart(), field.grid().dim(), field.grid().coordinate(node));
        err = std::max(err, (field.value(node) - exact).norm());
    }
    return err;
}

std::vector<std::string> coordinate_header(int n)
{
    std::vector<std::string> h;
    for (int d = 0; d < n; ++d)
        h.push_back(fmt::format("x{}", d + 1));
    return h;
}

struct Artifacts
{
    std::vector<std::pair<std::string, std::string>> files; // name, content
};

} // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& options)
{
    ExperimentOutcome out;
    out.name = cfg.name;
    Artifacts art;

    auto grid = std::make_shared<const DomainGrid>(cfg.grid);
    const TargetChart chart = cfg.chart();
    const Potential pot = cfg.make_potential();
    const int n = grid->dim();
    const MapField initial = build_initial_field(cfg, grid);

    const auto initial_res = residual(initial, pot);
    out.metrics["initial_residual_sup"] = initial_res.sup;
    out.metrics["initial_residual_l2"] = initial_res.l2;

    // ---------------------------------------------------------------- flow
    std::optional<FlowResult> run;
    if (cfg.run_flow && cfg.wants("liouville_flow")) {
        out.liouville_flow = liouville_flow_experiment(initial, pot, cfg.flow, &run);
        if (!run)
            run = run_to_convergence(initial, pot, cfg.flow);
    } else if (cfg.run_flow) {
        run = run_to_convergence(initial, pot, cfg.flow);
    } else {
        FlowResult idle(initial);
        idle.residual_sup = initial_res.sup;
        idle.residual_l2 = initial_res.l2;
        idle.energy = energy(initial, pot);
        idle.converged = initial_res.sup <= cfg.flow.tol;
        run = std::move(idle);
    }
    const MapField& field = run->field;
    const bool converged = run->converged;
    const double tol = cfg.flow.tol;

    const auto res = residual(field, pot);
    const double e_total = energy(field, pot);
    const double dphi = sup_dphi(field);
    out.metrics["residual_sup"] = res.sup;
    out.metrics["residual_l2"] = res.l2;
    out.metrics["energy"] = e_total;
    out.metrics["sup_dphi"] = dphi;
    out.metrics["solution_error"] = solution_error(field, cfg);

    Json report;
    report["schema_version"] = kReportSchemaVersion;
    report["experiment"] = cfg.name;
    report["seed"] = cfg.seed ? Json(*cfg.seed) : Json(nullptr);
    report["domain"] = Json{{"dim", n},
                            {"region", to_string(cfg.grid.region)},
                            {"h", cfg.grid.h},
                            {"bc", to_string(cfg.grid.bc)},
                            {"lower", point_json(cfg.grid.lower, n)},
                            {"upper", point_json(cfg.grid.upper, n)},
                            {"nodes", grid->num_nodes()},
                            {"active_nodes", grid->active_nodes().size()}};
    report["target"] = Json{{"geometry", to_string(cfg.geometry)},
                            {"dim", cfg.target_dim},
                            {"curvature_scale", cfg.curvature_scale},
                            {"curvature_bound", chart.curvature_bound()}};
    Json coeffs = Json::array();
    for (double c : cfg.coefficients)
        coeffs.push_back(c);
    report["potential"] = Json{{"kind", to_string(cfg.potential)}, {"coefficients", coeffs}};
    report["initial"] = Json{{"kind", to_string(cfg.initial.kind)},
                             {"noise_amplitude", cfg.initial.noise_amplitude},
                             {"residual_sup", initial_res.sup}};
    report["flow"] = Json{{"ran", cfg.run_flow},
                          {"converged", converged},
                          {"steps", run->steps},
                          {"dt", run->dt},
                          {"tol", tol},
                          {"dt_safety", cfg.flow.dt_safety},
                          {"residual_sup", run->residual_sup},
                          {"residual_l2", run->residual_l2},
                          {"energy", run->energy},
                          {"dissipation_violations", run->dissipation_violations},
                          {"worst_dissipation_excess", run->worst_dissipation_excess},
                          {"max_energy_rise", run->max_energy_rise}};
    report["energy"] = e_total;
    report["sup_dphi"] = dphi;
    report["image_radius"] = image_radius(field);
    report["residual"] = Json{{"sup", res.sup}, {"l2", res.l2}};

    {
        std::vector<std::vector<double>> rows;
        for (const auto& h : run->history)
            rows.push_back({static_cast<double>(h.step), h.energy, h.residual_sup, h.residual_l2});
        art.files.emplace_back("flow_history.csv", io::csv({"step", "energy", "residual_sup", "residual_l2"}, rows));
    }

    // ----------------------------------------------------------- assertions
    auto& A = out.assertions;
    if (cfg.run_flow && cfg.assertions.require_convergence) {
        A.push_back({converged ? Verdict::pass : Verdict::unconverged, "harmonic-potential", "flow_converged",
                     fmt::format("steps = {}, sup|R| = {}, tol = {}", run->steps, fmt_num(run->residual_sup),
                                 fmt_num(tol))});
    }
    if (cfg.wants("residual")) {
        const double limit = cfg.assertions.residual_sup.value_or(tol);
        A.push_back(threshold("harmonic-potential", "residual_sup", res.sup, limit, true, "sup|tau + grad V|_g"));
    }
    if (cfg.assertions.solution_error) {
        A.push_back(threshold("harmonic-potential", "solution_error", out.metrics["solution_error"],
                              *cfg.assertions.solution_error, converged, "max|phi - phi_exact|"));
    }
    if (cfg.wants("dissipation") && cfg.run_flow && cfg.assertions.require_dissipation) {
        Assertion a{Verdict::pass, "energy-functional", "energy_dissipation",
                    fmt::format("E(k+1) <= E(k) + delta_E on {} steps; violations = {}, worst excess = {}",
                                run->steps, run->dissipation_violations, fmt_num(run->worst_dissipation_excess))};
        if (run->dissipation_violations > 0)
            a.verdict = Verdict::fail;
        A.push_back(a);
    }

    if (cfg.wants("p_function")) {
        const auto p = p_function(field, pot);
        out.metrics["p_max"] = p.max;
        out.metrics["p_min"] = p.min;
        out.metrics["p_max_abs"] = std::max(std::abs(p.max), std::abs(p.min));
        report["p_field"] = Json{{"min", p.min}, {"max", p.max}, {"argmax", p.argmax}, {"scalar_target", p.scalar_target}};
        if (cfg.assertions.p_max) {
            if (p.scalar_target && n == 1)
                A.push_back(threshold("modica-estimate", "p_max", p.max, *cfg.assertions.p_max, converged, "max P"));
            else
                A.push_back({Verdict::not_applicable, "modica-estimate", "p_max",
                             fmt::format("max P = {} recorded only (vector target or n > 1)", fmt_num(p.max))});
        }
        std::vector<std::vector<double>> rows;
        for (std::size_t node : grid->active_nodes()) {
            if (!std::isfinite(p.values[node]))
                continue;
            const auto x = grid->coordinate(node);
            std::vector<double> row(x.begin(), x.begin() + n);
            row.push_back(p.values[node]);
            rows.push_back(std::move(row));
        }
        auto header = coordinate_header(n);
        header.push_back("P");
        art.files.emplace_back("p_field.csv", io::csv(header, rows));
    }

    if (cfg.wants("bochner")) {
        const auto b = bochner_residual(field, pot);
        out.metrics["bochner_sup"] = b.norms.sup;
        out.metrics["chain_rule_sup"] = b.chain_rule.sup;
        report["bochner"] = Json{{"residual", norms_json(b.norms)},
                                 {"chain_rule", norms_json(b.chain_rule)},
                                 {"kato_min_gap", b.kato_min_gap},
                                 {"kato_negative", b.kato_negative},
                                 {"kato_excluded", b.kato_excluded},
                                 {"p_lemma_nodes", b.p_lemma_nodes},
                                 {"p_lemma_violations_as_printed", b.p_lemma_violations_as_printed},
                                 {"p_lemma_violations_squared", b.p_lemma_violations_squared},
                                 {"p_lemma_min_gap_as_printed", b.p_lemma_min_gap_as_printed},
                                 {"p_lemma_min_gap_squared", b.p_lemma_min_gap_squared},
                                 {"p_lemma_reading",
                                  "mixed term evaluated as printed (over |d phi|) and over |d phi|^2; logged only"}};
        if (cfg.assertions.bochner_sup)
            A.push_back(threshold("bocher-formula", "bochner_residual", b.norms.sup, *cfg.assertions.bochner_sup,
                                  converged, "sup residual"));
        if (b.kato_negative > 0)
            out.warnings.push_back(fmt::format("Kato gap negative at {} nodes (min {}); expected O(h^2) slack",
                                               b.kato_negative, fmt_num(b.kato_min_gap)));
    }

    if (cfg.wants("stress_energy")) {
        const auto s = stress_energy(field, pot);
        out.metrics["stress_tensor_sup"] = s.tensor_norms.sup;
        out.metrics["stress_div_sup"] = s.divergence_norms.sup;
        report["stress_energy"] = Json{{"tensor", norms_json(s.tensor_norms)}, {"divergence", norms_json(s.divergence_norms)}};
        if (cfg.assertions.stress_tensor_sup)
            A.push_back(threshold("stress-energy", "stress_tensor_sup", s.tensor_norms.sup,
                                  *cfg.assertions.stress_tensor_sup, converged, "sup |S|_F"));
        if (cfg.assertions.stress_div_sup)
            A.push_back(threshold("stress-energy", "stress_divergence_sup", s.divergence_norms.sup,
                                  *cfg.assertions.stress_div_sup, converged, "sup |div S|"));
        std::vector<std::vector<double>> rows;
        for (std::size_t node : grid->active_nodes()) {
            if (!std::isfinite(s.divergence[node * n]))
                continue;
            const auto x = grid->coordinate(node);
            std::vector<double> row(x.begin(), x.begin() + n);
            for (int d = 0; d < n; ++d)
                row.push_back(s.divergence[node * n + d]);
            double f = 0.0;
            for (int k = 0; k < n * n; ++k)
                f += s.tensor[node * n * n + k] * s.tensor[node * n * n + k];
            row.push_back(std::sqrt(f));
            rows.push_back(std::move(row));
        }
        auto header = coordinate_header(n);
        for (int d = 0; d < n; ++d)
            header.push_back(fmt::format("div_{}", d + 1));
        header.push_back("S_frobenius");
        art.files.emplace_back("stress_energy_div.csv", io::csv(header, rows));
    }

    if (cfg.wants("monotonicity")) {
        MonotonicityOptions mo;
        mo.center = cfg.monotonicity.center;
        mo.radii = cfg.monotonicity.radii;
        mo.inner_radius = cfg.monotonicity.inner_radius;
        mo.d = cfg.monotonicity.d;
        mo.cap_radius = cfg.monotonicity.cap_radius;
        auto table = monotonicity_table(field, pot, mo);
        out.metrics["identity_rel_gap"] = table.identity_max_rel_gap;
        out.metrics["eps_quad"] = table.eps_quad;
        Json rows_json = Json::array();
        std::vector<std::vector<double>> rows;
        double min_slope = std::numeric_limits<double>::infinity();
        for (const auto& r : table.rows) {
            rows_json.push_back(Json{{"r", r.r},
                                     {"M", r.m},
                                     {"dM_dr", r.dm_dr},
                                     {"identity_lhs", r.identity_lhs},
                                     {"identity_rhs", r.identity_rhs},
                                     {"improved_lhs", r.improved_lhs},
                                     {"improved_rhs", r.improved_rhs},
                                     {"slack", r.slack},
                                     {"skipped", r.skipped},
                                     {"flag", r.flag}});
            rows.push_back({r.r, r.m, r.dm_dr, r.identity_lhs, r.identity_rhs, r.improved_lhs, r.improved_rhs, r.slack,
                            r.skipped ? 1.0 : 0.0});
            if (!r.skipped)
                min_slope = std::min(min_slope, r.dm_dr);
        }
        report["monotonicity"] = Json{{"rows", rows_json},
                                      {"eps_quad", table.eps_quad},
                                      {"v_nonpositive", table.v_nonpositive},
                                      {"monotone", table.monotone},
                                      {"identity_max_rel_gap", table.identity_max_rel_gap},
                                      {"improved_applicable", table.improved_applicable},
                                      {"improved_note", table.improved_note},
                                      {"improved_constant", table.improved_constant},
                                      {"improved_holds", table.improved_holds}};
        art.files.emplace_back("monotonicity.csv",
                               io::csv({"r", "M", "dM_dr", "identity_lhs", "identity_rhs", "improved_lhs",
                                        "improved_rhs", "slack", "skipped"},
                                       rows));
        if (table.v_nonpositive) {
            Assertion a{table.monotone ? Verdict::pass : Verdict::fail, "pre-mono-rn", "monotonicity_dM_dr",
                        fmt::format("min dM/dr = {} >= -eps_quad = {}", fmt_num(min_slope), fmt_num(-table.eps_quad))};
            if (!table.monotone && !converged)
                a.verdict = Verdict::unconverged;
            A.push_back(a);
        } else {
            A.push_back({Verdict::not_applicable, "pre-mono-rn", "monotonicity_dM_dr", "V is not <= 0 on the image"});
        }
        if (cfg.assertions.identity_rel_gap)
            A.push_back(threshold("pre-mono-rn", "balance_identity", table.identity_max_rel_gap,
                                  *cfg.assertions.identity_rel_gap, true, "max |lhs - rhs| / max(|rhs|, 1e-3 term size)"));
        if (table.improved_applicable) {
            A.push_back({table.improved_holds ? Verdict::pass : Verdict::not_applicable, "theorem-mono-improved",
                         "improved_monotonicity",
                         fmt::format("C = {}; {}", fmt_num(table.improved_constant),
                                     table.improved_holds ? "lhs >= rhs on every row" : "see warning")});
            if (!table.improved_holds)
                out.warnings.push_back(fmt::format(
                    "improved monotonicity lhs < rhs on some row with C = {} (warning only: the constant is a choice)",
                    fmt_num(table.improved_constant)));
        } else if (cfg.monotonicity.d) {
            A.push_back({Verdict::not_applicable, "theorem-mono-improved", "improved_monotonicity", table.improved_note});
        }
        out.monotonicity = std::move(table);
    }

    Json bounds = Json::array();
    if (cfg.wants("ball_bound")) {
        BallBoundParams bp;
        bp.a = cfg.ball.a;
        bp.x0 = cfg.ball.x0;
        bp.d = cfg.ball.d;
        bp.cap_radius = cfg.ball.cap_radius;
        bp.residual_sup = res.sup;
        bp.tol = tol;
        auto rec = gradient_bound_ball(field, pot, bp);
        bounds.push_back(bound_json(rec));
        A.push_back({rec.verdict, "theorem-ball", "gradient_bound",
                     rec.hypotheses_satisfied
                         ? fmt::format("|d phi| <= rhs on {} nodes, min margin {}", rec.nodes, fmt_num(rec.margin))
                         : rec.note});
        if (rec.hypotheses_satisfied) {
            const bool mono = rec.extras.count("rhs_monotone_in_a") && rec.extras.at("rhs_monotone_in_a") == 1.0;
            A.push_back({mono ? Verdict::pass : Verdict::fail, "theorem-ball", "rhs_decreasing_in_a",
                         fmt::format("rhs at worst node for a, 2a, 4a = {}, {}, {}", fmt_num(rec.extras["rhs_a"]),
                                     fmt_num(rec.extras["rhs_2a"]), fmt_num(rec.extras["rhs_4a"]))});
        }
        out.ball = std::move(rec);
    }
    if (cfg.wants("energy2")) {
        Energy2Params ep;
        ep.a = cfg.energy2.a;
        ep.x0 = cfg.energy2.x0;
        ep.corollary = cfg.energy2.corollary;
        ep.residual_sup = res.sup;
        ep.tol = tol;
        auto rec = gradient_bound_energy2(field, pot, ep);
        bounds.push_back(bound_json(rec));
        A.push_back({rec.verdict, "theorem-energy2", ep.corollary ? "corollary_trivial" : "gradient_bound",
                     rec.hypotheses_satisfied
                         ? fmt::format("|d phi| <= rhs on {} nodes, min margin {}", rec.nodes, fmt_num(rec.margin))
                         : rec.note});
        out.energy2 = std::move(rec);
    }
    report["bound_checks"] = bounds;

    if (cfg.wants("liouville_integrals")) {
        auto li = liouville_integrals(field, pot);
        if (li.applicable && !converged && li.verdict != Verdict::pass)
            li.verdict = Verdict::unconverged;
        out.metrics["dirichlet_integral"] = li.dirichlet_integral;
        out.metrics["potential_integral"] = li.potential_integral;
        report["liouville_integrals"] = Json{{"applicable", li.applicable},
                                             {"note", li.note},
                                             {"dirichlet_integral", li.dirichlet_integral},
                                             {"potential_integral_scaled", li.potential_integral},
                                             {"inequality_holds", li.inequality_holds},
                                             {"slack", li.slack},
                                             {"verdict", to_string(li.verdict)}};
        A.push_back({li.verdict, "stationary-liouville", "integral_inequality",
                     li.applicable ? fmt::format("int|d phi|^2 = {} <= n/(n-2) int V = {}",
                                                 fmt_num(li.dirichlet_integral), fmt_num(li.potential_integral))
                                   : li.note});
        if (cfg.assertions.liouville_integrals_max) {
            const double worst = std::max(std::abs(li.dirichlet_integral), std::abs(li.potential_integral));
            if (li.applicable)
                A.push_back(threshold("stationary-liouville", "integrals_vanish", worst,
                                      *cfg.assertions.liouville_integrals_max, converged, "max |integral|"));
            else
                A.push_back({Verdict::not_applicable, "stationary-liouville", "integrals_vanish", li.note});
        }
        out.liouville_integrals = std::move(li);
    }

    if (out.liouville_flow) {
        const auto& lf = *out.liouville_flow;
        report["liouville_flow"] = Json{{"applicable", lf.applicable},
                                        {"note", lf.note},
                                        {"converged", lf.converged},
                                        {"steps", lf.steps},
                                        {"sup_dphi", lf.sup_dphi},
                                        {"threshold", lf.threshold},
                                        {"limit_point", vec_json(lf.limit_point)},
                                        {"limit_distance", lf.limit_distance},
                                        {"limit_gradient", lf.limit_gradient},
                                        {"limit_is_critical", lf.limit_is_critical},
                                        {"verdict", to_string(lf.verdict)}};
        A.push_back({lf.verdict, "theorem-liouville", "constant_limit",
                     lf.applicable ? fmt::format("sup|d phi| = {} <= 10 tol = {}", fmt_num(lf.sup_dphi),
                                                 fmt_num(lf.threshold))
                                   : lf.note});
        if (cfg.assertions.limit_distance) {
            if (lf.applicable) {
                auto a = threshold("theorem-liouville", "limit_at_critical_point", lf.limit_distance,
                                   *cfg.assertions.limit_distance, lf.converged, "rho(limit, y0)");
                a.detail += fmt::format(", |grad V| = {}", fmt_num(lf.limit_gradient));
                A.push_back(a);
            } else {
                A.push_back({Verdict::not_applicable, "theorem-liouville", "limit_at_critical_point", lf.note});
            }
        }
        out.metrics["limit_distance"] = lf.limit_distance;
    } else if (cfg.wants("liouville_flow")) {
        auto note = liouville_flow_gate(initial, pot);
        A.push_back({Verdict::not_applicable, "theorem-liouville", "constant_limit",
                     note.empty() ? std::string("flow disabled") : note});
    }

    Json metrics = Json::object();
    for (const auto& [k, v] : out.metrics)
        metrics[k] = v;
    report["metrics"] = metrics;
    Json lines = Json::array();
    for (const auto& a : A)
        lines.push_back(Json{{"verdict", to_string(a.verdict)}, {"anchor", a.anchor}, {"name", a.name}, {"detail", a.detail}});
    report["assertions"] = lines;
    Json warn = Json::array();
    for (const auto& w : out.warnings)
        warn.push_back(w);
    report["warnings"] = warn;
    out.report = report;
    out.flow = std::move(run);

    if (options.directory) {
        const auto& dir = *options.directory;
        std::filesystem::create_directories(dir);
        std::string echo = cfg.source_text;
        if (!echo.empty() && echo.back() != '\n')
            echo += '\n';
        io::write_atomic(dir / "config.cfg", echo);
        for (const auto& [name, content] : art.files)
            io::write_atomic(dir / name, content);
        io::write_atomic(dir / "report.json", io::dump_json(report));
        io::write_atomic(dir / "summary.txt", format_summary(cfg.name, A, out.warnings));
        out.directory = dir;
    }
    return out;
}

RefinementStudy refinement_study(const ExperimentConfig& cfg, int levels, const RunOptions& options)
{
    if (levels < 2)
        throw ConfigError("a refinement study needs levels >= 2");
    std::vector<ExperimentConfig> configs;
    for (int l = 0; l < levels; ++l) {
        ExperimentConfig c = cfg;
        c.grid.h = cfg.grid.h / std::pow(2.0, l);
        if (c.auto_extent)
            fit_extent(c.grid);
        const std::size_t nodes = estimated_nodes(c.grid);
        if (nodes > c.node_cap)
            throw ConfigError(fmt::format("refinement level {} (h = {}) needs {} nodes, above domain.node_cap = {}", l,
                                          c.grid.h, nodes, c.node_cap));
        configs.push_back(std::move(c));
    }

    RefinementStudy study;
    study.name = cfg.name;
    for (int l = 0; l < levels; ++l) {
        RunOptions lo;
        if (options.directory)
            lo.directory = *options.directory / fmt::format("level_{}", l);
        study.levels.push_back({configs[l].grid.h, run_experiment(configs[l], lo)});
    }

    for (const auto& [metric, _] : study.levels.front().outcome.metrics) {
        std::vector<double> orders;
        for (int l = 0; l + 1 < levels; ++l) {
            const double e0 = std::abs(study.levels[l].outcome.metrics.at(metric));
            const double e1 = std::abs(study.levels[l + 1].outcome.metrics.at(metric));
            if (e0 <= kRoundingFloor && e1 <= kRoundingFloor)
                orders.push_back(std::numeric_limits<double>::quiet_NaN());
            else
                orders.push_back(std::log2(e0 / e1));
        }
        study.orders[metric] = orders;
    }

    for (const auto& metric : cfg.assertions.refine_metrics) {
        auto it = study.orders.find(metric);
        if (it == study.orders.end()) {
            study.assertions.push_back({Verdict::not_applicable, "refinement", metric, "metric not produced by this config"});
            continue;
        }
        bool all_exact = true;
        bool ok = true;
        std::string detail = "orders:";
        for (double o : it->second) {
            detail += " " + (std::isnan(o) ? std::string("exact") : fmt_num(o));
            if (std::isnan(o))
                continue;
            all_exact = false;
            ok = ok && o >= cfg.assertions.order_min && o <= cfg.assertions.order_max;
        }
        detail += fmt::format(" in [{}, {}]", fmt_num(cfg.assertions.order_min), fmt_num(cfg.assertions.order_max));
        if (all_exact)
            detail += fmt::format("; every level below the rounding floor {} (discretization exact on these data)",
                                  fmt_num(kRoundingFloor));
        study.assertions.push_back({ok ? Verdict::pass : Verdict::fail, "refinement", metric + "_order", detail});
    }

    if (options.directory) {
        const auto& dir = *options.directory;
        std::vector<std::string> header{"h"};
        for (const auto& [metric, _] : study.orders)
            header.push_back(metric);
        std::vector<std::vector<double>> rows;
        for (const auto& lvl : study.levels) {
            std::vector<double> row{lvl.h};
            for (const auto& [metric, _] : study.orders)
                row.push_back(lvl.outcome.metrics.at(metric));
            rows.push_back(std::move(row));
        }
        io::write_atomic(dir / "refinement.csv", io::csv(header, rows));
        Json j;
        j["schema_version"] = kReportSchemaVersion;
        j["experiment"] = cfg.name;
        Json hs = Json::array();
        for (const auto& lvl : study.levels)
            hs.push_back(lvl.h);
        j["h"] = hs;
        Json ord = Json::object();
        for (const auto& [metric, values] : study.orders) {
            Json arr = Json::array();
            for (double o : values)
                arr.push_back(o);
            ord[metric] = arr;
        }
        j["orders"] = ord;
        io::write_atomic(dir / "refinement.json", io::dump_json(j));
        std::vector<Assertion> all = study.assertions;
        for (std::size_t l = 0; l < study.levels.size(); ++l)
            for (auto a : study.levels[l].outcome.assertions) {
                a.name = fmt::format("L{}:{}", l, a.name);
                all.push_back(a);
            }
        io::write_atomic(dir / "summary.txt", format_summary(cfg.name + " (refinement)", all));
    }
    return study;
}

SuiteResult run_suite(const std::filesystem::path& manifest, const std::filesystem::path& artifact_root)
{
    std::ifstream in(manifest);
    if (!in)
        throw IoError(fmt::format("cannot read manifest {}", manifest.string()));
    const auto base = manifest.parent_path();

    SuiteResult result;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream words(line);
        std::vector<std::string> w;
        for (std::string s; words >> s;)
            w.push_back(s);
        if (w.empty())
            continue;
        SuiteEntry e;
        if (w[0] == "refine") {
            if (w.size() != 3)
                throw ParseError(fmt::format("manifest line {}: expected 'refine <config> <levels>'", lineno));
            e.config = base / w[1];
            try {
                e.refine_levels = std::stoi(w[2]);
            } catch (const std::exception&) {
                throw ParseError(fmt::format("manifest line {}: bad level count '{}'", lineno, w[2]));
            }
        } else if (w[0] == "run" && w.size() == 2) {
            e.config = base / w[1];
        } else if (w.size() == 1) {
            e.config = base / w[0];
        } else {
            throw ParseError(fmt::format("manifest line {}: cannot parse '{}'", lineno, line));
        }
        e.label = e.config.stem().string() + (e.refine_levels ? "_refine" : "");
        result.entries.push_back(std::move(e));
    }

    const long count = static_cast<long>(result.entries.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) {
        auto& e = result.entries[static_cast<std::size_t>(i)];
        try {
            const auto cfg = load_config(e.config);
            RunOptions opt;
            if (e.refine_levels) {
                opt.directory = artifact_root / (cfg.name + "_refine");
                e.counts = refinement_study(cfg, e.refine_levels, opt).counts();
            } else {
                opt.directory = artifact_root / cfg.name;
                e.counts = run_experiment(cfg, opt).counts();
            }
        } catch (const Error& err) {
            e.error = err.what();
            e.error_code = err.code();
        } catch (const std::exception& err) {
            e.error = err.what();
            e.error_code = 1;
        }
    }
    for (const auto& e : result.entries) {
        result.counts.add(e.counts);
        if (!e.error.empty())
            ++result.errors;
    }
    return result;
}

} // namespace hmp
