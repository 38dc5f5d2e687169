#include "mlpit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "mlpit/error.hpp"
#include "mlpit/forecast.hpp"
#include "mlpit/mlmc.hpp"

namespace mlpit {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig cfg;
    cfg.scenarios = {
        {Calibration::calibrated, {0.1, 0.0, 0.1}},
        {Calibration::underdispersed, {0.1, 0.0, 0.02}},
        {Calibration::overdispersed, {0.1, 0.0, 0.5}},
        {Calibration::biased, {0.4, 0.2, 0.1}},
    };
    return cfg;
}

void ExperimentConfig::use_full_scale() { horizon = 40000.0; }

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::config, "config field '" + field + "': " + what, std::nullopt, field);
}

class Fields {
public:
    Fields(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
        if (!obj_.is_object()) config_error(prefix_.empty() ? "<root>" : prefix_, "must be an object");
    }

    std::string path(const std::string& key) const {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key) {
        const json* v = find(key);
        if (!v) {
            throw Error(ErrorCode::config, "missing required field '" + path(key) + "'",
                        std::nullopt, path(key));
        }
        return *v;
    }

    double number(const json& v, const std::string& key) const {
        if (!v.is_number()) config_error(path(key), "must be a number");
        return v.get<double>();
    }

    std::int64_t integer(const json& v, const std::string& key) const {
        if (!v.is_number_integer()) config_error(path(key), "must be an integer");
        return v.get<std::int64_t>();
    }

    void read(const std::string& key, double& out) {
        if (const json* v = find(key)) out = number(*v, key);
    }
    void read(const std::string& key, int& out) {
        if (const json* v = find(key)) out = static_cast<int>(integer(*v, key));
    }
    void read(const std::string& key, std::size_t& out) {
        if (const json* v = find(key)) {
            const auto n = integer(*v, key);
            if (n < 0) config_error(path(key), "must be >= 0");
            out = static_cast<std::size_t>(n);
        }
    }
    void read(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) config_error(path(key), "must be true or false");
            out = v->get<bool>();
        }
    }

    /// Rejects keys that were never looked up, which catches misspellings.
    void reject_unknown() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) config_error(path(it.key()), "unknown field");
        }
    }

private:
    const json& obj_;
    std::string prefix_;
    std::set<std::string> seen_;
};

OuParams parse_params(const json& v, const std::string& where) {
    Fields f(v, where);
    OuParams p;
    p.alpha = f.number(f.require("alpha"), "alpha");
    p.mu = f.number(f.require("mu"), "mu");
    p.sigma2 = f.number(f.require("sigma2"), "sigma2");
    f.reject_unknown();
    if (!(p.alpha > 0.0)) config_error(where + ".alpha", "must be > 0");
    if (!(p.sigma2 >= 0.0)) config_error(where + ".sigma2", "must be >= 0");
    return p;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

json params_json(const OuParams& p) {
    return {{"alpha", p.alpha}, {"mu", p.mu}, {"sigma2", p.sigma2}};
}

const char* to_string(DiffusionConvention c) {
    return c == DiffusionConvention::stationary ? "stationary" : "literal";
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
        throw Error(ErrorCode::config, "config line " + std::to_string(line) + ": " + e.what(),
                    line);
    }

    ExperimentConfig cfg;
    Fields f(root, "");

    const auto seed = f.integer(f.require("seed"), "seed");
    if (seed < 0) config_error("seed", "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.horizon = f.number(f.require("horizon"), "horizon");
    f.read("observation_stride", cfg.observation_stride);
    f.read("burn_in", cfg.burn_in);
    f.read("levels", cfg.levels);
    f.read("base_step", cfg.base_step);
    f.read("refinement", cfg.refinement);
    if (const json* v = f.find("cost_budget")) cfg.cost_budget = f.number(*v, "cost_budget");
    f.read("alpha", cfg.alpha);
    f.read("bins", cfg.bins);
    if (f.find("finest_bins")) {
        std::size_t b = 0;
        f.read("finest_bins", b);
        cfg.finest_bins = b;
    }
    f.read("observation_step", cfg.observation_step);
    f.read("initial_state", cfg.initial_state);
    f.read("write_hierarchy", cfg.write_hierarchy);
    if (const json* v = f.find("diffusion_convention")) {
        const std::string s = v->is_string() ? v->get<std::string>() : "";
        if (s == "stationary") {
            cfg.convention = DiffusionConvention::stationary;
        } else if (s == "literal") {
            cfg.convention = DiffusionConvention::literal;
        } else {
            config_error("diffusion_convention", "must be \"stationary\" or \"literal\"");
        }
    }
    if (const json* v = f.find("thresholds")) {
        Fields t(*v, "thresholds");
        t.read("max_relative_deviation", cfg.thresholds.max_relative_deviation);
        t.read("skew", cfg.thresholds.skew);
        t.read("underdispersed_ratio", cfg.thresholds.underdispersed_ratio);
        t.read("overdispersed_ratio", cfg.thresholds.overdispersed_ratio);
        t.reject_unknown();
    }
    if (const json* v = f.find("target")) cfg.target = parse_params(*v, "target");

    const json& scenarios = f.require("scenarios");
    if (!scenarios.is_array() || scenarios.empty()) {
        config_error("scenarios", "must be a non-empty array");
    }
    std::set<Calibration> names;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const std::string where = "scenarios[" + std::to_string(i) + "]";
        Fields s(scenarios[i], where);
        const json& name = s.require("name");
        ScenarioSpec spec;
        try {
            spec.name = calibration_from_string(name.is_string() ? name.get<std::string>() : "");
        } catch (const Error&) {
            config_error(where + ".name",
                         "must be one of calibrated, underdispersed, overdispersed, biased");
        }
        if (spec.name == Calibration::indeterminate) {
            config_error(where + ".name", "is not a scenario name");
        }
        if (!names.insert(spec.name).second) config_error(where + ".name", "duplicate scenario");
        spec.forecast = parse_params(s.require("forecast"), where + ".forecast");
        s.reject_unknown();
        cfg.scenarios.push_back(spec);
    }
    f.reject_unknown();

    if (!(cfg.horizon > 0.0)) config_error("horizon", "must be > 0");
    if (!(cfg.observation_stride > 0.0)) config_error("observation_stride", "must be > 0");
    if (!(cfg.burn_in >= 0.0)) config_error("burn_in", "must be >= 0");
    if (cfg.levels < 0) config_error("levels", "must be >= 0");
    if (!(cfg.base_step > 0.0)) config_error("base_step", "must be > 0");
    if (cfg.refinement < 2) config_error("refinement", "must be > 1");
    if (cfg.cost_budget && !(*cfg.cost_budget > 0.0)) config_error("cost_budget", "must be > 0");
    if (cfg.alpha < 1) config_error("alpha", "must be >= 1");
    if (cfg.bins < 1) config_error("bins", "must be >= 1");
    if (cfg.finest_bins && *cfg.finest_bins < 1) config_error("finest_bins", "must be >= 1");
    if (!(cfg.observation_step > 0.0)) config_error("observation_step", "must be > 0");
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::config, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json to_json(const ExperimentConfig& cfg) {
    json j = {
        {"seed", cfg.seed},
        {"horizon", cfg.horizon},
        {"observation_stride", cfg.observation_stride},
        {"burn_in", cfg.burn_in},
        {"levels", cfg.levels},
        {"base_step", cfg.base_step},
        {"refinement", cfg.refinement},
        {"cost_budget", cfg.resolved_cost_budget()},
        {"alpha", cfg.alpha},
        {"bins", cfg.bins},
        {"observation_step", cfg.observation_step},
        {"initial_state", cfg.initial_state},
        {"diffusion_convention", to_string(cfg.convention)},
        {"write_hierarchy", cfg.write_hierarchy},
        {"thresholds",
         {{"max_relative_deviation", cfg.thresholds.max_relative_deviation},
          {"skew", cfg.thresholds.skew},
          {"underdispersed_ratio", cfg.thresholds.underdispersed_ratio},
          {"overdispersed_ratio", cfg.thresholds.overdispersed_ratio}}},
        {"target", params_json(cfg.target)},
    };
    if (cfg.finest_bins) j["finest_bins"] = *cfg.finest_bins;
    json scenarios = json::array();
    for (const auto& s : cfg.scenarios) {
        scenarios.push_back({{"name", to_string(s.name)}, {"forecast", params_json(s.forecast)}});
    }
    j["scenarios"] = scenarios;
    return j;
}

ScenarioConfig scenario_config(const ExperimentConfig& cfg, const ScenarioSpec& spec) {
    ScenarioConfig s;
    s.name = spec.name;
    s.forecast = spec.forecast;
    s.target = cfg.target;
    s.horizon = cfg.horizon;
    s.observation_stride = cfg.observation_stride;
    s.burn_in = cfg.burn_in;
    s.levels = cfg.levels;
    s.base_step = cfg.base_step;
    s.refinement = cfg.refinement;
    s.cost_budget = cfg.resolved_cost_budget();
    s.alpha = cfg.alpha;
    s.bins = cfg.bins;
    s.finest_bins = cfg.finest_bins;
    s.observation_step = cfg.observation_step;
    s.initial_state = cfg.initial_state;
    s.convention = cfg.convention;
    s.seed = cfg.seed;
    s.write_hierarchy = cfg.write_hierarchy;
    s.thresholds = cfg.thresholds;
    return s;
}

void ScenarioConfig::validate() const {
    forecast.validate();
    target.validate();
    if (!(horizon > 0.0)) throw Error(ErrorCode::config, "horizon must be > 0");
    if (!(observation_stride > 0.0)) throw Error(ErrorCode::config, "observation stride must be > 0");
    if (levels < 0) throw Error(ErrorCode::config, "levels must be >= 0");
    if (alpha < 1) throw Error(ErrorCode::config, "alpha must be >= 1");
    if (bins < 1) throw Error(ErrorCode::config, "bins must be >= 1");
    if (finest_bins && *finest_bins < 1) throw Error(ErrorCode::config, "finest bins must be >= 1");
}

// ---------------------------------------------------------------------------
// PIT accumulation shared by simulation and file verification
// ---------------------------------------------------------------------------

namespace {

class PitAccumulator {
public:
    PitAccumulator(std::uint64_t seed, int alpha, double burn_in)
        : seed_(seed), alpha_(alpha), burn_in_(burn_in) {}

    /// Observation k (1-based) at time t against the hierarchy snapshot h.
    void add(std::size_t k, double t, const Hierarchy& h, double y) {
        if (!(t > burn_in_)) return;
        const auto fe = generate_forecast(
            h, alpha_, {seed_, 0, static_cast<std::uint64_t>(k), StreamPurpose::quantile_uniform});
        mlpit_.push_back(pit_sample(fe, y));
        const Ensemble& finest = h.pairs.empty() ? h.level0 : h.pairs.back().fine;
        finest_.push_back(pit_sample(finest, y));
        inversions_ += static_cast<double>(count_quantile_inversions(fe));

        if (level_terms_.empty()) {
            level_terms_.assign(h.pairs.size() + 1, 0.0);
            sizes_ = h.sizes();
        }
        level_terms_[0] += mc_mean(h.level0);
        for (std::size_t l = 0; l < h.pairs.size(); ++l) {
            level_terms_[l + 1] += level_difference_mean(h.pairs[l]);
        }
    }

    RunArtifacts finish(std::string scenario, std::size_t bins,
                        std::optional<std::size_t> finest_bins,
                        const CalibrationThresholds& thresholds) const {
        if (mlpit_.empty()) {
            throw Error(ErrorCode::empty_input, "no observations after burn-in");
        }
        RunArtifacts a;
        a.scenario = std::move(scenario);
        a.mlpit = build_histogram(mlpit_, bins);
        a.pit_finest = build_histogram(finest_, finest_bins.value_or(sizes_.back() + 1));
        a.mlpit_diagnostics = diagnose(a.mlpit, thresholds);
        a.finest_diagnostics = diagnose(a.pit_finest, thresholds);
        const auto n = static_cast<double>(mlpit_.size());
        a.summary.sizes = sizes_;
        for (double term : level_terms_) a.summary.mean_level_term.push_back(term / n);
        a.summary.mean_inversions = inversions_ / n;
        return a;
    }

private:
    std::uint64_t seed_;
    int alpha_;
    double burn_in_;
    std::vector<double> mlpit_;
    std::vector<double> finest_;
    std::vector<double> level_terms_;
    std::vector<std::size_t> sizes_;
    double inversions_ = 0.0;
};

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_histogram_outputs(const fs::path& dir, const RunArtifacts& a) {
    write_histogram_csv(dir / "mlpit.csv", a.mlpit);
    write_histogram_csv(dir / "pit_finest.csv", a.pit_finest);
}

void write_failure_marker(const fs::path& dir, const std::string& what) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(dir / "FAILED", std::ios::binary | std::ios::trunc);
    out << what << '\n';
}

RunArtifacts simulate(const ScenarioConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    std::vector<LevelGrid> grids;
    for (int l = 0; l <= cfg.levels; ++l) {
        grids.push_back(LevelGrid::make(l, cfg.base_step, cfg.refinement));
    }
    const auto sizes = fixed_budget_sizes(cfg.cost_budget, cfg.horizon, grids);
    const std::size_t n_obs = aligned_step_count({0.0, cfg.horizon}, cfg.observation_stride);
    const TimeSpan stride{0.0, cfg.observation_stride};

    std::vector<OuStepper> level0;
    level0.reserve(sizes[0]);
    for (std::size_t i = 0; i < sizes[0]; ++i) {
        level0.emplace_back(cfg.initial_state, cfg.forecast, grids[0].step,
                            StreamKey{cfg.seed, 0, i, StreamPurpose::path_noise}, cfg.convention);
    }
    std::vector<std::vector<CoupledOuStepper>> pairs(cfg.levels);
    std::vector<std::size_t> coarse_steps(cfg.levels);
    for (int l = 1; l <= cfg.levels; ++l) {
        auto& members = pairs[l - 1];
        members.reserve(sizes[l]);
        for (std::size_t i = 0; i < sizes[l]; ++i) {
            members.emplace_back(cfg.initial_state, cfg.forecast, grids[l],
                                 StreamKey{cfg.seed, static_cast<std::uint32_t>(l), i,
                                           StreamPurpose::path_noise},
                                 cfg.convention);
        }
        coarse_steps[l - 1] = aligned_step_count(stride, grids[l].coarse_step());
    }
    const std::size_t level0_steps = aligned_step_count(stride, grids[0].step);
    OuStepper observed(cfg.initial_state, cfg.target, cfg.observation_step,
                       {cfg.seed, 0, 0, StreamPurpose::observation_noise}, cfg.convention);
    const std::size_t observed_steps = aligned_step_count(stride, cfg.observation_step);

    std::ofstream hierarchy_out;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        fs::remove(out_dir / "FAILED");
        if (cfg.write_hierarchy) {
            hierarchy_out.open(out_dir / "hierarchy.csv", std::ios::binary | std::ios::trunc);
            if (!hierarchy_out) throw Error(ErrorCode::io, "cannot write hierarchy.csv");
            write_hierarchy_header(hierarchy_out);
        }
    }

    PitAccumulator acc(cfg.seed, cfg.alpha, cfg.burn_in);
    ObservationSeries obs;
    obs.times.reserve(n_obs);
    obs.values.reserve(n_obs);
    Hierarchy h;
    h.grids = grids;
    h.level0.resize(sizes[0]);
    h.pairs.resize(cfg.levels);
    for (int l = 1; l <= cfg.levels; ++l) {
        h.pairs[l - 1].fine.resize(sizes[l]);
        h.pairs[l - 1].coarse.resize(sizes[l]);
    }

    for (std::size_t k = 1; k <= n_obs; ++k) {
        const double t = static_cast<double>(k) * cfg.observation_stride;
        for (std::size_t i = 0; i < level0.size(); ++i) {
            level0[i].advance(level0_steps);
            h.level0[i] = level0[i].state();
        }
        for (std::size_t l = 0; l < pairs.size(); ++l) {
            for (std::size_t i = 0; i < pairs[l].size(); ++i) {
                pairs[l][i].advance_coarse_steps(coarse_steps[l]);
                h.pairs[l].fine[i] = pairs[l][i].fine_state();
                h.pairs[l].coarse[i] = pairs[l][i].coarse_state();
            }
        }
        observed.advance(observed_steps);
        const double y = observed.state();
        obs.times.push_back(t);
        obs.values.push_back(y);
        if (hierarchy_out.is_open()) write_hierarchy_rows(hierarchy_out, t, h);
        acc.add(k, t, h, y);
    }

    RunArtifacts a = acc.finish(to_string(cfg.name), cfg.bins, cfg.finest_bins, cfg.thresholds);
    for (const auto& g : grids) a.summary.steps.push_back(g.step);

    const Gaussian forecast_law{stationary_mean(cfg.forecast),
                                stationary_variance(cfg.forecast, cfg.convention)};
    const Gaussian target_law{stationary_mean(cfg.target),
                              stationary_variance(cfg.target, cfg.convention)};
    if (forecast_law.variance > 0.0 && target_law.variance > 0.0) {
        a.reference_l1 = histogram_l1_distance(
            a.mlpit, reference_bin_probabilities(forecast_law, target_law, cfg.bins));
    }

    if (!out_dir.empty()) {
        if (hierarchy_out.is_open()) {
            hierarchy_out.close();
            if (!hierarchy_out) throw Error(ErrorCode::io, "failed writing hierarchy.csv");
        }
        write_histogram_outputs(out_dir, a);
        write_observations_csv(out_dir / "observations.csv", obs);
        if (forecast_law.variance > 0.0 && target_law.variance > 0.0) {
            write_reference_csv(out_dir / "reference_density.csv",
                                analytic_pit_reference(forecast_law, target_law, 200));
        }
        json d = to_json(a);
        d["forecast_params"] = params_json(cfg.forecast);
        d["target_params"] = params_json(cfg.target);
        d["diffusion_convention"] = to_string(cfg.convention);
        d["seed"] = cfg.seed;
        d["horizon"] = cfg.horizon;
        write_json(out_dir / "diagnostics.json", d);
    }
    return a;
}

}  // namespace

RunArtifacts run_scenario(const ScenarioConfig& cfg, const fs::path& out_dir) {
    try {
        return simulate(cfg, out_dir);
    } catch (const std::exception& e) {
        if (!out_dir.empty()) write_failure_marker(out_dir, e.what());
        throw;
    }
}

std::vector<RunArtifacts> run_all(const ExperimentConfig& cfg, const fs::path& out_dir) {
    std::vector<std::future<RunArtifacts>> jobs;
    for (const auto& spec : cfg.scenarios) {
        const ScenarioConfig sc = scenario_config(cfg, spec);
        const fs::path dir = out_dir.empty() ? fs::path{} : out_dir / to_string(spec.name);
        jobs.push_back(std::async(std::launch::async, [sc, dir] { return run_scenario(sc, dir); }));
    }
    std::vector<RunArtifacts> results;
    std::exception_ptr first_error;
    for (auto& job : jobs) {
        try {
            results.push_back(job.get());
        } catch (...) {
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);

    if (!out_dir.empty()) {
        json report = {{"config", to_json(cfg)}, {"scenarios", json::array()}};
        for (const auto& a : results) report["scenarios"].push_back(to_json(a));
        write_json(out_dir / "report.json", report);
        write_manifest(out_dir);
    }
    return results;
}

RunArtifacts verify_files(const fs::path& hierarchy_csv, const fs::path& observations_csv,
                          const VerifyOptions& options, const fs::path& out_dir) {
    if (options.alpha < 1) throw Error(ErrorCode::config, "alpha must be >= 1");
    const auto obs = read_observations_csv(observations_csv);
    const auto snapshots = read_hierarchy_csv(hierarchy_csv);
    std::map<double, const Hierarchy*> by_time;
    for (const auto& s : snapshots) by_time.emplace(s.time, &s.hierarchy);

    PitAccumulator acc(options.seed, options.alpha, options.burn_in);
    for (std::size_t k = 1; k <= obs.size(); ++k) {
        const double t = obs.times[k - 1];
        const auto it = by_time.find(t);
        if (it == by_time.end()) {
            throw Error(ErrorCode::structure,
                        "observation row " + std::to_string(k + 1) + " at time " +
                            format_number(t) + " has no hierarchy snapshot",
                        k + 1);
        }
        acc.add(k, t, *it->second, obs.values[k - 1]);
    }
    RunArtifacts a = acc.finish("verify", options.bins, options.finest_bins, options.thresholds);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_histogram_outputs(out_dir, a);
        write_json(out_dir / "diagnostics.json", to_json(a));
    }
    return a;
}

json diagnostics_json(const CalibrationDiagnostics& d, const PitHistogram& hist) {
    return {
        {"bins", hist.bins()},
        {"total", hist.total()},
        {"counts", hist.counts},
        {"max_relative_deviation", d.max_relative_deviation},
        {"endpoint_ratio", finite_or_null(d.endpoint_ratio)},
        {"skew", d.skew},
        {"classification", to_string(d.classification)},
    };
}

json to_json(const RunArtifacts& a) {
    json j = {
        {"scenario", a.scenario},
        {"observations", a.mlpit.total()},
        {"mlpit", diagnostics_json(a.mlpit_diagnostics, a.mlpit)},
        {"pit_finest", diagnostics_json(a.finest_diagnostics, a.pit_finest)},
        {"hierarchy",
         {{"sizes", a.summary.sizes},
          {"steps", a.summary.steps},
          {"mean_level_term", a.summary.mean_level_term},
          {"mean_inversions", a.summary.mean_inversions}}},
    };
    j["reference_l1"] = a.reference_l1 ? json(*a.reference_l1) : json(nullptr);
    return j;
}

std::vector<ManifestEntry> write_manifest(const fs::path& dir) {
    std::vector<ManifestEntry> entries;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), dir).generic_string();
        if (rel == "manifest.json") continue;
        entries.push_back({rel, sha256_file(e.path()), e.file_size()});
    }
    std::sort(entries.begin(), entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    json files = json::array();
    for (const auto& m : entries) {
        files.push_back({{"path", m.path}, {"sha256", m.sha256}, {"bytes", m.bytes}});
    }
    write_json(dir / "manifest.json", {{"files", files}});
    return entries;
}

json report_directory(const fs::path& dir, const CalibrationThresholds& thresholds) {
    auto one = [&](const fs::path& d) {
        json j = {{"scenario", d.filename().string()}};
        for (const char* name : {"mlpit", "pit_finest"}) {
            const fs::path csv = d / (std::string(name) + ".csv");
            if (!fs::exists(csv)) continue;
            PitHistogram hist;
            hist.counts = read_histogram_csv(csv);
            j[name] = diagnostics_json(diagnose(hist, thresholds), hist);
        }
        return j;
    };
    if (fs::exists(dir / "mlpit.csv")) return {{"scenarios", json::array({one(dir)})}};

    std::vector<fs::path> subdirs;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_directory() && fs::exists(e.path() / "mlpit.csv")) subdirs.push_back(e.path());
    }
    if (subdirs.empty()) {
        throw Error(ErrorCode::empty_input, "no mlpit.csv found under " + dir.string());
    }
    std::sort(subdirs.begin(), subdirs.end());
    json out = {{"scenarios", json::array()}};
    for (const auto& d : subdirs) out["scenarios"].push_back(one(d));
    return out;
}

}  // namespace mlpit
