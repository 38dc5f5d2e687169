// mlpit: run the multilevel calibration experiment, verify stored hierarchies,
// and regenerate diagnostics from stored histograms.
//
// Exit codes: 0 success, 2 config/input error, 3 numerical failure,
// 4 classification check failed under --check.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "mlpit/error.hpp"
#include "mlpit/experiment.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheck = 4;

int exit_code_for(mlpit::ErrorCode code) {
    switch (code) {
        case mlpit::ErrorCode::config:
        case mlpit::ErrorCode::parse:
        case mlpit::ErrorCode::io:
        case mlpit::ErrorCode::empty_input:
        case mlpit::ErrorCode::structure:
            return kExitConfig;
        default:
            return kExitNumerical;
    }
}

void print_summary(const mlpit::RunArtifacts& a) {
    std::cout << a.scenario << ": mlpit=" << to_string(a.mlpit_diagnostics.classification)
              << " (maxdev " << a.mlpit_diagnostics.max_relative_deviation << ", endpoint "
              << a.mlpit_diagnostics.endpoint_ratio << ", skew " << a.mlpit_diagnostics.skew
              << ") finest=" << to_string(a.finest_diagnostics.classification);
    if (a.reference_l1) std::cout << " reference_l1=" << *a.reference_l1;
    std::cout << '\n';
}

struct RunOptions {
    std::string config;
    std::string scenario = "all";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> bins;
    std::optional<int> alpha;
    std::optional<double> burn_in;
    std::optional<double> horizon;
    std::string out_dir = "mlpit-out";
    bool full = false;
    bool check = false;
    bool write_hierarchy = false;
};

int run_command(const RunOptions& o) {
    auto cfg = o.config.empty() ? mlpit::ExperimentConfig::defaults() : mlpit::load_config(o.config);
    if (o.full) cfg.use_full_scale();
    if (o.horizon) cfg.horizon = *o.horizon;
    if (o.seed) cfg.seed = *o.seed;
    if (o.bins) cfg.bins = *o.bins;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.burn_in) cfg.burn_in = *o.burn_in;
    if (o.write_hierarchy) cfg.write_hierarchy = true;

    if (o.scenario != "all") {
        mlpit::Calibration wanted;
        try {
            wanted = mlpit::calibration_from_string(o.scenario);
        } catch (const mlpit::Error& e) {
            throw mlpit::Error(mlpit::ErrorCode::config, e.what(), std::nullopt, "scenario");
        }
        std::erase_if(cfg.scenarios, [&](const auto& s) { return s.name != wanted; });
        if (cfg.scenarios.empty()) {
            throw mlpit::Error(mlpit::ErrorCode::config,
                               "scenario '" + o.scenario + "' is not in the config", std::nullopt,
                               "scenarios");
        }
    }

    const auto results = mlpit::run_all(cfg, o.out_dir);
    bool ok = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        print_summary(results[i]);
        if (results[i].mlpit_diagnostics.classification != cfg.scenarios[i].name) ok = false;
    }
    std::cout << "artifacts written to " << o.out_dir << '\n';
    if (o.check && !ok) {
        std::cerr << "check failed: MLPIT classification differs from the scenario name\n";
        return kExitCheck;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multilevel Monte Carlo ensemble forecasts and PIT calibration"};
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Simulate scenarios and write histograms");
    run_cmd->add_option("--config", run.config, "JSON experiment config")->check(CLI::ExistingFile);
    run_cmd->add_option("--scenario", run.scenario,
                        "calibrated, underdispersed, overdispersed, biased or all");
    run_cmd->add_option("--seed", run.seed, "Experiment seed");
    run_cmd->add_option("--bins", run.bins, "MLPIT histogram bins")->check(CLI::PositiveNumber);
    run_cmd->add_option("--alpha", run.alpha, "Forecast size multiplier N = alpha N_0")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--burn-in", run.burn_in, "Exclude observation times <= this");
    run_cmd->add_option("--horizon", run.horizon, "Simulated time horizon T");
    run_cmd->add_option("--out-dir", run.out_dir, "Output directory");
    run_cmd->add_flag("--full", run.full, "Long horizon T = 40000");
    run_cmd->add_flag("--check", run.check, "Exit 4 if a scenario is misclassified");
    run_cmd->add_flag("--write-hierarchy", run.write_hierarchy,
                      "Also write hierarchy.csv (large)");

    std::string hierarchy_csv, observations_csv, verify_out;
    mlpit::VerifyOptions verify;
    std::optional<std::size_t> verify_finest_bins;
    auto* verify_cmd = app.add_subcommand("verify", "Recompute histograms from stored files");
    verify_cmd->add_option("--hierarchy", hierarchy_csv, "hierarchy.csv")->required();
    verify_cmd->add_option("--observations", observations_csv, "observations.csv")->required();
    verify_cmd->add_option("--seed", verify.seed, "Seed of the forecast uniforms");
    verify_cmd->add_option("--alpha", verify.alpha)->check(CLI::PositiveNumber);
    verify_cmd->add_option("--bins", verify.bins)->check(CLI::PositiveNumber);
    verify_cmd->add_option("--finest-bins", verify_finest_bins)->check(CLI::PositiveNumber);
    verify_cmd->add_option("--burn-in", verify.burn_in);
    verify_cmd->add_option("--out-dir", verify_out, "Write histograms and diagnostics here");

    std::string report_input, report_config;
    auto* report_cmd = app.add_subcommand("report", "Re-diagnose stored histograms");
    report_cmd->add_option("--input", report_input, "Run or scenario directory")->required();
    report_cmd->add_option("--config", report_config, "Config supplying thresholds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return run_command(run);
        if (*verify_cmd) {
            verify.finest_bins = verify_finest_bins;
            const auto a = mlpit::verify_files(hierarchy_csv, observations_csv, verify,
                                               verify_out.empty() ? fs::path{} : fs::path(verify_out));
            print_summary(a);
            return 0;
        }
        if (*report_cmd) {
            mlpit::CalibrationThresholds thresholds;
            if (!report_config.empty()) thresholds = mlpit::load_config(report_config).thresholds;
            const auto report = mlpit::report_directory(report_input, thresholds);
            std::cout << report.dump(2) << '\n';
            return 0;
        }
    } catch (const mlpit::Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
