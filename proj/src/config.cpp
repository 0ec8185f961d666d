#include "hmp/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hmp
{

namespace pt = boost::property_tree;

std::string to_string(InitialKind kind)
{
    switch (kind) {
    case InitialKind::constant: return "constant";
    case InitialKind::kink: return "kink";
    case InitialKind::instanton: return "instanton";
    case InitialKind::hedgehog: return "hedgehog";
    case InitialKind::angular: return "angular";
    case InitialKind::affine: return "affine";
    case InitialKind::random: return "random";
    }
    return "unknown";
}

InitialKind parse_initial_kind(const std::string& name)
{
    for (auto k : {InitialKind::constant, InitialKind::kink, InitialKind::instanton, InitialKind::hedgehog,
                   InitialKind::angular, InitialKind::affine, InitialKind::random})
        if (to_string(k) == name)
            return k;
    throw ConfigError(fmt::format("unknown initial.kind '{}'", name));
}

bool ExperimentConfig::wants(const std::string& diagnostic) const
{
    return std::find(diagnostics.begin(), diagnostics.end(), diagnostic) != diagnostics.end();
}

namespace
{

// Typed access to one section. Every key read is remembered so that leftovers
// (typos) can be rejected once the whole file has been consumed.
class Section
{
public:
    Section(const pt::ptree& root, std::string name) : name_(std::move(name))
    {
        if (auto child = root.get_child_optional(name_))
            tree_ = &*child;
    }

    bool present() const { return tree_ != nullptr; }

    std::optional<std::string> raw(const std::string& key)
    {
        used_.insert(key);
        if (!tree_)
            return std::nullopt;
        auto v = tree_->get_optional<std::string>(key);
        if (!v)
            return std::nullopt;
        std::string s = boost::algorithm::trim_copy(*v);
        return s;
    }

    std::string string(const std::string& key, const std::string& fallback)
    {
        auto v = raw(key);
        return v ? *v : fallback;
    }

    double number(const std::string& key, double fallback) { return opt_number(key).value_or(fallback); }

    std::optional<double> opt_number(const std::string& key)
    {
        auto v = raw(key);
        if (!v || v->empty())
            return std::nullopt;
        return parse_number(key, *v);
    }

    long integer(const std::string& key, long fallback)
    {
        auto v = raw(key);
        if (!v || v->empty())
            return fallback;
        const double x = parse_number(key, *v);
        if (x != std::floor(x) || std::abs(x) > 9e15)
            throw ConfigError(fmt::format("{}.{} must be an integer, got '{}'", name_, key, *v));
        return static_cast<long>(x);
    }

    bool boolean(const std::string& key, bool fallback)
    {
        auto v = raw(key);
        if (!v || v->empty())
            return fallback;
        const std::string s = boost::algorithm::to_lower_copy(*v);
        if (s == "true" || s == "yes" || s == "1" || s == "on")
            return true;
        if (s == "false" || s == "no" || s == "0" || s == "off")
            return false;
        throw ConfigError(fmt::format("{}.{} must be a boolean, got '{}'", name_, key, *v));
    }

    std::vector<double> numbers(const std::string& key)
    {
        std::vector<double> out;
        for (const auto& item : words(key))
            out.push_back(parse_number(key, item));
        return out;
    }

    std::vector<std::string> words(const std::string& key)
    {
        std::vector<std::string> out;
        auto v = raw(key);
        if (!v)
            return out;
        std::vector<std::string> parts;
        boost::algorithm::split(parts, *v, boost::is_any_of(", \t"), boost::token_compress_on);
        for (auto& p : parts)
            if (!p.empty())
                out.push_back(p);
        return out;
    }

    void reject_unknown() const
    {
        if (!tree_)
            return;
        for (const auto& [key, _] : *tree_)
            if (!used_.count(key))
                throw ConfigError(fmt::format("unknown key '{}.{}'", name_, key));
    }

private:
    double parse_number(const std::string& key, const std::string& text) const
    {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != text.size())
            throw ParseError(fmt::format("{}.{}: '{}' is not a number", name_, key, text));
        return x;
    }

    std::string name_;
    const pt::ptree* tree_ = nullptr;
    std::set<std::string> used_;
};

Point to_point(const std::vector<double>& v, int n, const std::string& what, double fill = 0.0)
{
    Point p{fill, fill, fill};
    if (v.empty())
        return p;
    if (v.size() == 1) {
        for (int d = 0; d < n; ++d)
            p[d] = v[0];
        return p;
    }
    if (static_cast<int>(v.size()) != n)
        throw ConfigError(fmt::format("{} needs 1 or {} components, got {}", what, n, v.size()));
    for (int d = 0; d < n; ++d)
        p[d] = v[d];
    return p;
}

KernelBackend parse_backend(const std::string& s)
{
    if (s == "openmp")
        return KernelBackend::openmp;
    if (s == "serial")
        return KernelBackend::serial;
    throw ConfigError(fmt::format("unknown flow.backend '{}'", s));
}

void validate(ExperimentConfig& cfg)
{
    const int n = cfg.grid.dim;
    if (n < 1 || n > kMaxDim)
        throw ConfigError(fmt::format("domain.dim must be 1..{}", kMaxDim));
    if (cfg.target_dim < 1 || cfg.target_dim > kMaxDim)
        throw ConfigError(fmt::format("target.dim must be 1..{}", kMaxDim));
    if (!(cfg.curvature_scale > 0.0))
        throw ConfigError("target.curvature_scale must be positive");
    const std::size_t nodes = estimated_nodes(cfg.grid);
    if (nodes > cfg.node_cap)
        throw ConfigError(fmt::format("grid needs {} nodes, above domain.node_cap = {}", nodes, cfg.node_cap));

    const auto& init = cfg.initial;
    if (!init.center.empty() && static_cast<int>(init.center.size()) != cfg.target_dim)
        throw ConfigError("initial.center must have target.dim components");
    if (init.noise_amplitude < 0.0)
        throw ConfigError("initial.noise_amplitude must be non-negative");
    if ((init.noise_amplitude > 0.0 || init.kind == InitialKind::random) && !cfg.seed)
        throw ConfigError("random initial data need experiment.seed");
    if (init.kind == InitialKind::random && !(init.noise_amplitude > 0.0))
        throw ConfigError("initial.kind = random needs noise_amplitude > 0");
    if (init.kind == InitialKind::kink && cfg.target_dim != 1)
        throw ConfigError("initial.kind = kink needs a scalar target");
    if (init.kind == InitialKind::hedgehog && cfg.target_dim < n)
        throw ConfigError("initial.kind = hedgehog needs target.dim >= domain.dim");
    if (init.kind == InitialKind::angular && (n < 2 || cfg.target_dim < 2))
        throw ConfigError("initial.kind = angular needs domain.dim and target.dim >= 2");
    if (init.kind == InitialKind::affine && static_cast<int>(init.matrix.size()) != n * cfg.target_dim)
        throw ConfigError(fmt::format("initial.matrix needs {} entries", n * cfg.target_dim));

    for (const auto& d : cfg.diagnostics)
        if (!known_diagnostics().count(d))
            throw ConfigError(fmt::format("unknown diagnostic '{}'", d));
    if (cfg.wants("monotonicity") && cfg.monotonicity.radii.empty())
        throw ConfigError("monotonicity needs diagnostics.radii");
    if (cfg.wants("ball_bound"))
        validate_ball_params(cfg.chart(), cfg.ball.d, cfg.ball.cap_radius);
    if (cfg.monotonicity.d || cfg.monotonicity.cap_radius) {
        if (!(cfg.monotonicity.d && cfg.monotonicity.cap_radius))
            throw ConfigError("improved monotonicity needs both diagnostics.d and diagnostics.cap_radius");
        validate_ball_params(cfg.chart(), *cfg.monotonicity.d, *cfg.monotonicity.cap_radius);
    }
    if (!(cfg.flow.tol > 0.0))
        throw ConfigError("flow.tol must be positive");
    if (!(cfg.flow.dt_safety > 0.0 && cfg.flow.dt_safety <= 1.0))
        throw ConfigError("flow.dt_safety must lie in (0, 1]");
    if (cfg.flow.max_steps < 0 || cfg.flow.log_every < 1 || cfg.flow.stiffness_every < 1)
        throw ConfigError("flow.max_steps >= 0, flow.log_every >= 1 and flow.stiffness_every >= 1 are required");
    // Constructing the potential checks coefficient counts and target restrictions.
    (void)cfg.make_potential();
}

} // namespace

void fit_extent(GridSpec& spec)
{
    // Aligned on the center so refinements keep the center on a node. Free
    // boundaries carry no Dirichlet band.
    const int layers = spec.bc == BoundaryCondition::free ? 0 : spec.boundary_layers;
    const double half = std::ceil(spec.radius / spec.h - 1e-9 + layers) * spec.h;
    for (int d = 0; d < spec.dim; ++d) {
        spec.lower[d] = spec.center[d] - half;
        spec.upper[d] = spec.center[d] + half;
    }
}

std::size_t estimated_nodes(const GridSpec& spec)
{
    std::size_t total = 1;
    for (int d = 0; d < spec.dim; ++d) {
        const double cells = (spec.upper[d] - spec.lower[d]) / spec.h;
        if (!(cells > 0.0) || !std::isfinite(cells))
            return 0;
        total *= static_cast<std::size_t>(std::llround(cells)) + 1;
    }
    return total;
}

namespace
{

// The INI reader only knows whole-line comments; drop `# ...` / `; ...` tails
// that follow whitespace so values can be annotated in place.
std::string strip_inline_comments(const std::string& text)
{
    std::istringstream in(text);
    std::string out, line;
    while (std::getline(in, line)) {
        for (std::size_t i = 1; i < line.size(); ++i) {
            if ((line[i] == '#' || line[i] == ';') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
                line.erase(i);
                break;
            }
        }
        out += line;
        out += '\n';
    }
    return out;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text)
{
    pt::ptree root;
    try {
        std::istringstream in(strip_inline_comments(text));
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(fmt::format("config line {}: {}", e.line(), e.message()));
    }

    static const std::set<std::string> sections{"experiment", "domain",      "target",     "potential", "initial",
                                                "boundary",   "flow",        "diagnostics", "assertions"};
    for (const auto& [name, child] : root) {
        if (!sections.count(name))
            throw ConfigError(fmt::format("unknown section [{}]", name));
        if (child.empty() && !child.data().empty())
            throw ParseError(fmt::format("key '{}' outside any section", name));
    }

    ExperimentConfig cfg;
    cfg.source_text = text;

    Section experiment(root, "experiment");
    cfg.name = experiment.string("name", cfg.name);
    if (cfg.name.empty() || cfg.name.find_first_of("/\\ ") != std::string::npos)
        throw ConfigError("experiment.name must be a non-empty word without slashes");
    if (auto s = experiment.opt_number("seed")) {
        if (*s < 0 || *s != std::floor(*s))
            throw ConfigError("experiment.seed must be a non-negative integer");
        cfg.seed = static_cast<std::uint64_t>(*s);
    }

    Section domain(root, "domain");
    if (!domain.present())
        throw ConfigError("missing [domain] section");
    auto& g = cfg.grid;
    g.dim = static_cast<int>(domain.integer("dim", 1));
    if (g.dim < 1 || g.dim > kMaxDim)
        throw ConfigError(fmt::format("domain.dim must be 1..{}", kMaxDim));
    g.region = parse_region_kind(domain.string("region", "box"));
    g.h = domain.number("h", g.h);
    g.bc = parse_boundary_condition(domain.string("bc", "dirichlet"));
    g.center = to_point(domain.numbers("center"), g.dim, "domain.center");
    g.radius = domain.number("radius", g.radius);
    g.inner_radius = domain.number("inner_radius", 0.0);
    g.boundary_layers = static_cast<int>(domain.integer("boundary_layers", g.boundary_layers));
    cfg.node_cap = static_cast<std::size_t>(domain.integer("node_cap", static_cast<long>(cfg.node_cap)));
    const auto lower = domain.numbers("lower");
    const auto upper = domain.numbers("upper");
    if (g.region == RegionKind::box) {
        if (lower.empty() || upper.empty())
            throw ConfigError("box regions need domain.lower and domain.upper");
        g.lower = to_point(lower, g.dim, "domain.lower");
        g.upper = to_point(upper, g.dim, "domain.upper");
    } else if (!lower.empty() || !upper.empty()) {
        g.lower = to_point(lower, g.dim, "domain.lower");
        g.upper = to_point(upper, g.dim, "domain.upper");
    } else if (g.h > 0.0) {
        cfg.auto_extent = true;
        fit_extent(g);
    }
    domain.reject_unknown();

    Section target(root, "target");
    cfg.geometry = parse_geometry_kind(target.string("geometry", "euclidean"));
    cfg.target_dim = static_cast<int>(target.integer("dim", 1));
    cfg.curvature_scale = target.number("curvature_scale", 1.0);
    target.reject_unknown();

    Section potential(root, "potential");
    cfg.potential = parse_potential_kind(potential.string("kind", "zero"));
    cfg.coefficients = potential.numbers("coefficients");
    potential.reject_unknown();

    Section initial(root, "initial");
    auto& init = cfg.initial;
    init.kind = parse_initial_kind(initial.string("kind", "constant"));
    init.center = initial.numbers("center");
    init.amplitude = initial.number("amplitude", init.amplitude);
    init.scale = initial.number("scale", init.scale);
    init.radius = initial.number("radius", init.radius);
    init.winding = static_cast<int>(initial.integer("winding", init.winding));
    init.power = initial.number("power", init.power);
    init.matrix = initial.numbers("matrix");
    init.noise_amplitude = initial.number("noise_amplitude", 0.0);
    initial.reject_unknown();

    // Dirichlet data always come from the noise-free initializer; the section
    // exists so configs can say so explicitly.
    Section boundary(root, "boundary");
    const std::string data = boundary.string("data", "initial");
    if (data != "initial")
        throw ConfigError("boundary.data supports only 'initial'");
    boundary.reject_unknown();

    Section flow(root, "flow");
    cfg.run_flow = flow.boolean("enabled", true);
    cfg.flow.tol = flow.number("tol", cfg.flow.tol);
    cfg.flow.max_steps = flow.integer("max_steps", cfg.flow.max_steps);
    cfg.flow.dt_safety = flow.number("dt_safety", cfg.flow.dt_safety);
    cfg.flow.log_every = flow.integer("log_every", cfg.flow.log_every);
    cfg.flow.stiffness_every = flow.integer("stiffness_every", cfg.flow.stiffness_every);
    cfg.flow.backend = parse_backend(flow.string("backend", "openmp"));
    flow.reject_unknown();

    Section diag(root, "diagnostics");
    cfg.diagnostics = diag.words("list");
    auto& mono = cfg.monotonicity;
    mono.radii = diag.numbers("radii");
    mono.center = to_point(diag.numbers("center"), g.dim, "diagnostics.center");
    mono.inner_radius = diag.number("inner_radius", 0.0);
    mono.d = diag.opt_number("d");
    mono.cap_radius = diag.opt_number("cap_radius");
    cfg.ball.a = diag.number("ball_a", cfg.ball.a);
    cfg.ball.x0 = to_point(diag.numbers("ball_x0"), g.dim, "diagnostics.ball_x0");
    cfg.ball.d = diag.number("ball_d", cfg.ball.d);
    cfg.ball.cap_radius = diag.number("ball_cap_radius", cfg.ball.cap_radius);
    cfg.energy2.a = diag.number("energy2_a", cfg.energy2.a);
    cfg.energy2.x0 = to_point(diag.numbers("energy2_x0"), g.dim, "diagnostics.energy2_x0");
    cfg.energy2.corollary = diag.boolean("energy2_corollary", false);
    diag.reject_unknown();

    Section assertions(root, "assertions");
    auto& a = cfg.assertions;
    a.residual_sup = assertions.opt_number("residual_sup");
    a.p_max = assertions.opt_number("p_max");
    a.bochner_sup = assertions.opt_number("bochner_sup");
    a.stress_tensor_sup = assertions.opt_number("stress_tensor_sup");
    a.stress_div_sup = assertions.opt_number("stress_div_sup");
    a.identity_rel_gap = assertions.opt_number("identity_rel_gap");
    a.solution_error = assertions.opt_number("solution_error");
    a.liouville_integrals_max = assertions.opt_number("liouville_integrals_max");
    a.limit_distance = assertions.opt_number("limit_distance");
    a.require_convergence = assertions.boolean("converged", true);
    a.require_dissipation = assertions.boolean("dissipation", true);
    a.refine_metrics = assertions.words("refine_metrics");
    a.order_min = assertions.number("order_min", a.order_min);
    a.order_max = assertions.number("order_max", a.order_max);
    assertions.reject_unknown();
    experiment.reject_unknown();

    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError(fmt::format("cannot read config {}", path.string()));
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

} // namespace hmp
