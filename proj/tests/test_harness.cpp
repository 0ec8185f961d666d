#include "support.hpp"

#include "hmp/config.hpp"
#include "hmp/harness.hpp"
#include "hmp/initial.hpp"
#include "hmp/io.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace hmp;
using support::vec;

namespace
{

// Small periodic sphere problem with seeded noise; converges in well under a second.
const std::string kTorus = R"(
[experiment]
name = torus
seed = 5

[domain]
dim = 2
region = box
lower = 0
upper = 1.6
h = 0.1
bc = periodic

[target]
geometry = sphere
dim = 2

[potential]
kind = zero

[initial]
kind = random
center = 0.3, 0
noise_amplitude = 0.05

[flow]
tol = 1e-7
)";

std::string with_diagnostics(const std::string& list)
{
    return kTorus + "\n[diagnostics]\nlist = " + list + "\n";
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "hmp_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p, std::ios::binary) << text;
}

} // namespace

TEST_CASE("config parsing")
{
    const auto cfg = parse_config_text(with_diagnostics("residual, p_function"));
    CHECK(cfg.name == "torus");
    CHECK(cfg.seed == 5u);
    CHECK(cfg.grid.dim == 2);
    CHECK(cfg.geometry == GeometryKind::sphere_stereographic);
    CHECK(cfg.wants("residual"));
    CHECK_FALSE(cfg.wants("bochner"));
    CHECK(cfg.flow.tol == 1e-7);

    CHECK_THROWS_AS(parse_config_text(kTorus + "[flow]\ntol = fast\n"), ParseError);
    CHECK_THROWS_AS(parse_config_text(kTorus + "[domain2]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(with_diagnostics("residual, nonsense")), ConfigError);

    const auto annotated = parse_config_text(kTorus + "[diagnostics]\nlist = residual   # only this\nradii = 1 ; two\n");
    CHECK(annotated.diagnostics == std::vector<std::string>{"residual"});
    CHECK(annotated.monotonicity.radii == std::vector<double>{1.0});

    std::string unseeded = kTorus;
    unseeded.replace(unseeded.find("seed = 5"), 8, "");
    CHECK_THROWS_AS(parse_config_text(unseeded), ConfigError);
}

TEST_CASE("cap radius at or beyond pi/(2 sqrt d) is rejected before compute")
{
    // pi / (2 sqrt 2) = 1.1107
    const auto text = with_diagnostics("ball_bound") + "ball_d = 2\nball_cap_radius = 1.2\n";
    CHECK_THROWS_AS(parse_config_text(text), ConfigError);
    const auto ok = with_diagnostics("ball_bound") + "ball_d = 2\nball_cap_radius = 1.1\n";
    CHECK_NOTHROW(parse_config_text(ok));
}

TEST_CASE("initial field")
{
    const auto cfg = parse_config_text(kTorus);
    auto grid = std::make_shared<const DomainGrid>(cfg.grid);
    const auto a = build_initial_field(cfg, grid);
    const auto b = build_initial_field(cfg, grid);
    CHECK(a.values().size() == b.values().size());
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));

    auto other = cfg;
    other.seed = 6;
    const auto c = build_initial_field(other, grid);
    CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));

    const auto chart = cfg.chart();
    double spread = 0.0;
    for (std::size_t node : grid->active_nodes()) {
        CHECK(chart.is_valid(a.value(node)));
        spread = std::max(spread, (a.value(node) - vec({0.3, 0.0})).norm());
    }
    CHECK(spread > 0.0);
    CHECK(spread <= 0.05 * std::sqrt(2.0) + 1e-15);
}

TEST_CASE("Dirichlet data stay noise-free")
{
    auto cfg = parse_config_text(kTorus);
    cfg.grid.bc = BoundaryCondition::dirichlet;
    auto grid = std::make_shared<const DomainGrid>(cfg.grid);
    const auto field = build_initial_field(cfg, grid);
    std::size_t boundary = 0;
    for (std::size_t node : grid->valued_nodes()) {
        if (grid->state(node) != NodeState::boundary)
            continue;
        ++boundary;
        CHECK(field.value(node)[0] == 0.3);
        CHECK(field.value(node)[1] == 0.0);
    }
    CHECK(boundary > 0);
}

TEST_CASE("io")
{
    CHECK(io::format_double(0.1) == "0.10000000000000001");
    CHECK(io::format_double(2.0) == "2");
    io::Json j{{"x", 0.1}, {"bad", std::nan("")}, {"n", 3}, {"list", {1.5, "a"}}};
    const auto text = io::dump_json(j, -1);
    CHECK(text == "{\"x\":0.10000000000000001,\"bad\":null,\"n\":3,\"list\":[1.5,\"a\"]}\n");

    const auto dir = scratch("io");
    io::write_atomic(dir / "a.txt", "one");
    io::write_atomic(dir / "a.txt", "two");
    CHECK(slurp(dir / "a.txt") == "two");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir))
        ++files;
    CHECK(files == 1);

    CHECK(io::csv({"a", "b"}, {{1.0, 0.5}}) == "a,b\n1,0.5\n");
}

TEST_CASE("empty diagnostics list writes the flow history only")
{
    const auto dir = scratch("flow_only");
    const auto out = run_experiment(parse_config_text(with_diagnostics("")), RunOptions{dir});
    CHECK_FALSE(out.failed());
    std::set<std::string> files;
    for (const auto& e : fs::directory_iterator(dir))
        files.insert(e.path().filename().string());
    CHECK(files == std::set<std::string>{"config.cfg", "flow_history.csv", "report.json", "summary.txt"});
    CHECK(slurp(dir / "config.cfg") == with_diagnostics(""));
    for (const auto& a : out.assertions)
        CHECK(a.name == "flow_converged");
}

TEST_CASE("summary lines name an anchor")
{
    const auto out = run_experiment(parse_config_text(with_diagnostics("residual, dissipation, stress_energy")));
    REQUIRE(out.assertions.size() >= 3);
    for (const auto& a : out.assertions)
        CHECK_FALSE(a.anchor.empty());
    const auto text = format_summary("torus", out.assertions);
    CHECK(text.find("PASS            harmonic-potential     residual_sup") != std::string::npos);
}

TEST_CASE("report is deterministic")
{
    const auto cfg = parse_config_text(with_diagnostics("residual, dissipation"));
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    run_experiment(cfg, RunOptions{a});
    run_experiment(cfg, RunOptions{b});
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(slurp(a / "report.json").find("\"schema_version\": 1") != std::string::npos);
}

TEST_CASE("refinement study guards")
{
    const auto cfg = parse_config_text(with_diagnostics("residual"));
    CHECK_THROWS_AS(refinement_study(cfg, 1), ConfigError);
    auto capped = cfg;
    capped.node_cap = 1000; // 17^2 fits, 33^2 does not
    CHECK_THROWS_AS(refinement_study(capped, 2), ConfigError);
}

TEST_CASE("suite")
{
    const auto dir = scratch("suite");
    write(dir / "empty.manifest", "# nothing to run\n\n");
    const auto empty = run_suite(dir / "empty.manifest", dir / "out_empty");
    CHECK(empty.entries.empty());
    CHECK(empty.exit_code() == 0);

    std::string na = kTorus;
    na += "\n[diagnostics]\nlist = liouville_flow\n";
    na.replace(na.find("tol = 1e-7"), 10, "enabled = false");
    write(dir / "na.cfg", na);
    write(dir / "broken.cfg", "[domain]\ndim = four\n");
    write(dir / "na.manifest", "run na.cfg\n");
    const auto only_na = run_suite(dir / "na.manifest", dir / "out_na");
    REQUIRE(only_na.entries.size() == 1);
    CHECK(only_na.counts.not_applicable == 1);
    CHECK(only_na.counts.pass == 0);
    CHECK(only_na.exit_code() == 0);

    write(dir / "mixed.manifest", "na.cfg\nrun broken.cfg\n");
    const auto mixed = run_suite(dir / "mixed.manifest", dir / "out_mixed");
    REQUIRE(mixed.entries.size() == 2);
    CHECK(mixed.errors == 1);
    CHECK(mixed.entries[1].error_code == exit_code::parse);
    CHECK(mixed.counts.not_applicable == 1);
    CHECK(mixed.exit_code() == 1);

    write(dir / "bad.manifest", "refine na.cfg\n");
    CHECK_THROWS_AS(run_suite(dir / "bad.manifest", dir / "out_bad"), ParseError);
}
