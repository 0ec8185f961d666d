// lab: command-line front end for the harmonic-map laboratory.
//
//   lab run <config> [--out DIR]
//   lab refine <config> --levels K [--out DIR]
//   lab suite <manifest> [--out-root DIR]
//   lab geodesic --geometry sphere --dim 2 --position 0,0 --velocity 0.5,0 ...
//
// Artifacts go to $LAB_ARTIFACT_ROOT/<experiment name> unless --out is given.

#include "hmp/geodesics.hpp"
#include "hmp/harness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

using namespace hmp;

namespace
{

Vec to_vec(const std::vector<double>& v)
{
    Vec out(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out[static_cast<int>(i)] = v[i];
    return out;
}

int verdict_exit(const VerdictCounts& c)
{
    return c.fail > 0 ? exit_code::assertion_failed : exit_code::ok;
}

void print_counts(const VerdictCounts& c)
{
    fmt::print("pass {}  fail {}  not-applicable {}  unconverged {}\n", c.pass, c.fail, c.not_applicable,
               c.unconverged);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Harmonic maps with potential: flow solver and diagnostics"};
    app.require_subcommand(1);

    std::string config_path, out_dir, manifest_path;
    int levels = 2;

    auto* run = app.add_subcommand("run", "run one experiment");
    run->add_option("config", config_path, "experiment config")->required();
    run->add_option("--out", out_dir, "artifact directory (default $LAB_ARTIFACT_ROOT/<name>)");

    auto* refine = app.add_subcommand("refine", "refinement study at h, h/2, ...");
    refine->add_option("config", config_path, "experiment config")->required();
    refine->add_option("--levels", levels, "number of levels (>= 2)")->required();
    refine->add_option("--out", out_dir, "artifact directory (default $LAB_ARTIFACT_ROOT/<name>_refine)");

    auto* suite = app.add_subcommand("suite", "run every entry of a manifest");
    suite->add_option("manifest", manifest_path, "manifest file")->required();
    suite->add_option("--out-root", out_dir, "artifact root (default $LAB_ARTIFACT_ROOT)");

    std::string geometry = "euclidean", potential = "zero", traj_out = "trajectory.csv";
    int dim = 1;
    double k = 1.0, dt = 1e-3, t_end = 1.0;
    std::vector<double> coeffs, position, velocity;
    auto* geo = app.add_subcommand("geodesic", "integrate a geodesic with potential and audit its energy");
    geo->add_option("--geometry", geometry, "euclidean | sphere | hyperbolic");
    geo->add_option("--dim", dim, "target dimension");
    geo->add_option("--curvature-scale", k, "k, with curvature +-k^2");
    geo->add_option("--potential", potential, "zero | quadratic_radial | double_well_radial | cosine_of_distance");
    geo->add_option("--coefficients", coeffs, "potential coefficients")->delimiter(',');
    geo->add_option("--position", position, "initial chart point")->delimiter(',')->required();
    geo->add_option("--velocity", velocity, "initial chart velocity")->delimiter(',')->required();
    geo->add_option("--dt", dt, "step size");
    geo->add_option("--t-end", t_end, "integration time");
    geo->add_option("--out", traj_out, "trajectory CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto cfg = load_config(config_path);
            RunOptions opt;
            opt.directory = out_dir.empty() ? io::artifact_root() / cfg.name : std::filesystem::path(out_dir);
            const auto outcome = run_experiment(cfg, opt);
            std::cout << format_summary(cfg.name, outcome.assertions, outcome.warnings);
            fmt::print("artifacts: {}\n", outcome.directory.string());
            print_counts(outcome.counts());
            return verdict_exit(outcome.counts());
        }
        if (*refine) {
            const auto cfg = load_config(config_path);
            RunOptions opt;
            opt.directory =
                out_dir.empty() ? io::artifact_root() / (cfg.name + "_refine") : std::filesystem::path(out_dir);
            const auto study = refinement_study(cfg, levels, opt);
            for (const auto& lvl : study.levels)
                fmt::print("h = {:<10g} residual_sup = {:.6g}\n", lvl.h, lvl.outcome.metrics.at("residual_sup"));
            fmt::print("{:<24} orders\n", "metric");
            for (const auto& [metric, orders] : study.orders) {
                std::string line;
                for (double o : orders)
                    line += std::isnan(o) ? " exact" : fmt::format(" {:.3f}", o);
                fmt::print("{:<24}{}\n", metric, line);
            }
            std::cout << format_summary(cfg.name + " (refinement)", study.assertions);
            print_counts(study.counts());
            return verdict_exit(study.counts());
        }
        if (*suite) {
            const auto root = out_dir.empty() ? io::artifact_root() : std::filesystem::path(out_dir);
            const auto result = run_suite(manifest_path, root);
            for (const auto& e : result.entries) {
                if (!e.error.empty())
                    fmt::print("{:<28} ERROR (exit {}): {}\n", e.label, e.error_code, e.error);
                else
                    fmt::print("{:<28} pass {} fail {} na {} unconverged {}\n", e.label, e.counts.pass,
                               e.counts.fail, e.counts.not_applicable, e.counts.unconverged);
            }
            print_counts(result.counts);
            return result.exit_code();
        }
        if (*geo) {
            const TargetChart chart(parse_geometry_kind(geometry), dim, k);
            const Potential pot(parse_potential_kind(potential), coeffs, chart);
            GeodesicState s0;
            s0.position = to_vec(position);
            s0.velocity = to_vec(velocity);
            const auto traj = integrate_trajectory(chart, pot, s0, dt, t_end);
            const auto audit = conservation_audit(traj);
            std::vector<std::string> header{"t"};
            for (int a = 0; a < dim; ++a)
                header.push_back(fmt::format("y{}", a + 1));
            for (int a = 0; a < dim; ++a)
                header.push_back(fmt::format("v{}", a + 1));
            header.push_back("H");
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < traj.states.size(); ++i) {
                const auto& s = traj.states[i];
                std::vector<double> row{s.time};
                for (int a = 0; a < dim; ++a)
                    row.push_back(s.position[a]);
                for (int a = 0; a < dim; ++a)
                    row.push_back(s.velocity[a]);
                row.push_back(traj.energy[i]);
                rows.push_back(std::move(row));
            }
            io::write_atomic(traj_out, io::csv(header, rows));
            fmt::print("steps {}  t_final {}  max |H - H0| = {:.3e}{}\n", traj.states.size() - 1,
                       traj.states.back().time, audit.max_drift, traj.truncated ? "  (truncated: left the chart)" : "");
            return exit_code::ok;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code::internal;
    }
    return exit_code::ok;
}
