#pragma once

#include "hmp/config.hpp"
#include "hmp/diagnostics.hpp"
#include "hmp/io.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hmp
{

inline constexpr int kReportSchemaVersion = 1;

/// One line of summary.txt: verdict, the anchor it tests, a short name and the numbers behind it.
struct Assertion
{
    Verdict verdict = Verdict::not_applicable;
    std::string anchor;
    std::string name;
    std::string detail;
};

struct VerdictCounts
{
    int pass = 0;
    int fail = 0;
    int not_applicable = 0;
    int unconverged = 0;

    void add(Verdict v);
    void add(const VerdictCounts& other);
};

struct ExperimentOutcome
{
    std::string name;
    std::filesystem::path directory; // empty when nothing was written
    std::vector<Assertion> assertions;
    std::vector<std::string> warnings;
    /// Scalar metrics tracked by refinement studies (see README for the list).
    std::map<std::string, double> metrics;
    io::Json report;

    std::optional<FlowResult> flow;
    std::optional<MonotonicityTable> monotonicity;
    std::optional<BoundCheck> ball;
    std::optional<BoundCheck> energy2;
    std::optional<LiouvilleIntegrals> liouville_integrals;
    std::optional<LiouvilleFlowRecord> liouville_flow;

    VerdictCounts counts() const;
    bool failed() const { return counts().fail > 0; }
};

struct RunOptions
{
    /// Artifact directory; nothing is written when unset.
    std::optional<std::filesystem::path> directory;
};

/// Builds grid, target, potential and initial data, runs the flow, evaluates the
/// requested diagnostics and writes the artifacts. Errors propagate as hmp::Error.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

struct RefinementLevel
{
    double h = 0.0;
    ExperimentOutcome outcome;
};

struct RefinementStudy
{
    std::string name;
    std::vector<RefinementLevel> levels;
    /// metric -> empirical orders log2(e_h / e_{h/2}) between consecutive levels;
    /// NaN where both errors sit below the rounding floor.
    std::map<std::string, std::vector<double>> orders;
    std::vector<Assertion> assertions;

    VerdictCounts counts() const;
};

/// Errors below this are indistinguishable from rounding; orders are not formed from them.
inline constexpr double kRoundingFloor = 1e-11;

/// Reruns the experiment at h, h/2, ..., h/2^(levels-1). ConfigError when
/// levels < 2 or a level would exceed the config's node cap (checked up front).
RefinementStudy refinement_study(const ExperimentConfig& cfg, int levels, const RunOptions& options = {});

struct SuiteEntry
{
    std::string label;
    std::filesystem::path config;
    int refine_levels = 0; // 0: plain run
    VerdictCounts counts;
    std::string error;     // non-empty when the experiment aborted
    int error_code = 0;
};

struct SuiteResult
{
    std::vector<SuiteEntry> entries;
    VerdictCounts counts;
    int errors = 0;
    int exit_code() const { return counts.fail > 0 || errors > 0 ? 1 : 0; }
};

/**
 * Manifest: one entry per line, `#` comments. `run <config>` (or just the
 * path) runs an experiment; `refine <config> <levels>` runs a refinement
 * study. Paths are relative to the manifest. Entries run in parallel; an
 * aborted entry is recorded and does not stop the batch.
 */
SuiteResult run_suite(const std::filesystem::path& manifest, const std::filesystem::path& artifact_root);

/// summary.txt body for a list of assertions.
std::string format_summary(const std::string& title, const std::vector<Assertion>& assertions,
                           const std::vector<std::string>& warnings = {});

} // namespace hmp
