#pragma once

// End-to-end calibration experiment: fixed-budget OU hierarchies evolved
// alongside an observed trajectory, a combined forecast at every observation
// time, and multilevel / finest-only PIT histograms per scenario.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlpit/io.hpp"
#include "mlpit/ou.hpp"
#include "mlpit/verification.hpp"

namespace mlpit {

struct ScenarioSpec {
    Calibration name = Calibration::calibrated;
    OuParams forecast;
};

/// Contents of the JSON config document. See docs/config.md for the schema.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    double horizon = 4000.0;
    double observation_stride = 1.0;
    double burn_in = 0.0;
    int levels = 4;
    double base_step = 0.5;
    int refinement = 2;
    /// Defaults to 384 * horizon, i.e. N_0 = 128 for base_step 1/2.
    std::optional<double> cost_budget;
    int alpha = 8;
    std::size_t bins = 20;
    /// Defaults to N_L + 1.
    std::optional<std::size_t> finest_bins;
    double observation_step = 0.03125;
    double initial_state = 0.0;
    DiffusionConvention convention = DiffusionConvention::stationary;
    bool write_hierarchy = false;
    CalibrationThresholds thresholds;
    OuParams target{0.1, 0.0, 0.1};
    std::vector<ScenarioSpec> scenarios;

    double resolved_cost_budget() const { return cost_budget.value_or(384.0 * horizon); }

    /// The four reference scenarios at desk scale.
    static ExperimentConfig defaults();
    /// Restores the long horizon (T = 40000) and, unless set explicitly, scales
    /// the budget with it.
    void use_full_scale();
};

/// Parses a config document. Errors use ErrorCode::config and name the field;
/// syntax errors report the line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Everything needed to run one scenario.
struct ScenarioConfig {
    Calibration name = Calibration::calibrated;
    OuParams forecast;
    OuParams target;
    double horizon = 4000.0;
    double observation_stride = 1.0;
    double burn_in = 0.0;
    int levels = 4;
    double base_step = 0.5;
    int refinement = 2;
    double cost_budget = 1.536e6;
    int alpha = 8;
    std::size_t bins = 20;
    std::optional<std::size_t> finest_bins;
    double observation_step = 0.03125;
    double initial_state = 0.0;
    DiffusionConvention convention = DiffusionConvention::stationary;
    std::uint64_t seed = 1;
    bool write_hierarchy = false;
    CalibrationThresholds thresholds;

    void validate() const;
};

ScenarioConfig scenario_config(const ExperimentConfig& cfg, const ScenarioSpec& spec);

struct ManifestEntry {
    std::string path;  // relative to the run directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct HierarchySummary {
    std::vector<std::size_t> sizes;
    std::vector<double> steps;
    /// Mean over observation times of each level's mean (level 0) or mean
    /// correction (levels >= 1).
    std::vector<double> mean_level_term;
    /// Mean count of quantile-order inversions per combined forecast.
    double mean_inversions = 0.0;
};

struct RunArtifacts {
    std::string scenario;
    PitHistogram mlpit;
    PitHistogram pit_finest;
    CalibrationDiagnostics mlpit_diagnostics;
    CalibrationDiagnostics finest_diagnostics;
    /// L1 distance of the MLPIT histogram to the stationary-law reference; only
    /// set when the scenario's stationary laws are known.
    std::optional<double> reference_l1;
    HierarchySummary summary;
    std::vector<ManifestEntry> files;
};

/// Runs one scenario. When `out_dir` is non-empty, artifacts are written to it
/// (mlpit.csv, pit_finest.csv, diagnostics.json, reference_density.csv,
/// observations.csv and optionally hierarchy.csv); on failure a FAILED marker is
/// written and the error rethrown.
RunArtifacts run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir = {});

/// Runs every scenario of the config (they share the observation trajectory),
/// each into out_dir/<name>/, and writes out_dir/report.json and
/// out_dir/manifest.json.
std::vector<RunArtifacts> run_all(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct VerifyOptions {
    std::uint64_t seed = 1;
    int alpha = 8;
    std::size_t bins = 20;
    std::optional<std::size_t> finest_bins;
    double burn_in = 0.0;
    CalibrationThresholds thresholds;
};

/// Recomputes forecasts and histograms from serialised hierarchies and
/// observations. Observation k (1-based row) is matched to the hierarchy
/// snapshot with the same time and uses the same uniform stream as
/// run_scenario, so a round trip reproduces the in-memory histograms exactly.
RunArtifacts verify_files(const std::filesystem::path& hierarchy_csv,
                          const std::filesystem::path& observations_csv,
                          const VerifyOptions& options,
                          const std::filesystem::path& out_dir = {});

nlohmann::json diagnostics_json(const CalibrationDiagnostics& d, const PitHistogram& hist);
nlohmann::json to_json(const RunArtifacts& artifacts);

/// Writes manifest.json listing every regular file under `dir` (except the
/// manifest itself) with its SHA-256, sorted by path.
std::vector<ManifestEntry> write_manifest(const std::filesystem::path& dir);

/// Re-diagnoses stored histograms. `dir` is either a scenario directory (holding
/// mlpit.csv) or a run directory whose subdirectories are scenario directories.
nlohmann::json report_directory(const std::filesystem::path& dir,
                                const CalibrationThresholds& thresholds = {});

}  // namespace mlpit
