#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mlpit/error.hpp"
#include "mlpit/experiment.hpp"
#include "mlpit/forecast.hpp"
#include "mlpit/mlmc.hpp"
#include "mlpit/ou.hpp"
#include "mlpit/verification.hpp"

namespace py = pybind11;
using namespace mlpit;

namespace {

Hierarchy make_hierarchy(std::vector<double> level0,
                         std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs) {
    Hierarchy h;
    h.level0 = std::move(level0);
    for (auto& [fine, coarse] : pairs) h.pairs.push_back({std::move(fine), std::move(coarse)});
    h.validate();
    return h;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multilevel Monte Carlo ensemble forecasts and PIT calibration diagnostics";
    m.attr("__version__") = "0.1.0";

    static py::exception<Error> error_type(m, "MlpitError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(error_type.ptr())(e.what());
            exc.attr("code") = to_string(e.code());
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    py::enum_<DiffusionConvention>(m, "DiffusionConvention")
        .value("stationary", DiffusionConvention::stationary)
        .value("literal", DiffusionConvention::literal);

    py::enum_<StreamPurpose>(m, "StreamPurpose")
        .value("path_noise", StreamPurpose::path_noise)
        .value("quantile_uniform", StreamPurpose::quantile_uniform)
        .value("observation_noise", StreamPurpose::observation_noise);

    py::class_<StreamKey>(m, "StreamKey")
        .def(py::init<std::uint64_t, std::uint32_t, std::uint64_t, StreamPurpose>(),
             py::arg("seed"), py::arg("level") = 0, py::arg("sample_index") = 0,
             py::arg("purpose") = StreamPurpose::path_noise)
        .def_readwrite("seed", &StreamKey::experiment_seed)
        .def_readwrite("level", &StreamKey::level)
        .def_readwrite("sample_index", &StreamKey::sample_index)
        .def_readwrite("purpose", &StreamKey::purpose);

    m.def("uniform", &uniform, py::arg("key"), py::arg("count"));
    m.def("gaussian_increments", &gaussian_increments, py::arg("key"), py::arg("count"),
          py::arg("step"));

    py::class_<OuParams>(m, "OuParams")
        .def(py::init([](double alpha, double mu, double sigma2) {
                 OuParams p{alpha, mu, sigma2};
                 p.validate();
                 return p;
             }),
             py::arg("alpha") = 0.1, py::arg("mu") = 0.0, py::arg("sigma2") = 0.1)
        .def_readwrite("alpha", &OuParams::alpha)
        .def_readwrite("mu", &OuParams::mu)
        .def_readwrite("sigma2", &OuParams::sigma2)
        .def("__repr__", [](const OuParams& p) {
            return "OuParams(alpha=" + std::to_string(p.alpha) + ", mu=" + std::to_string(p.mu) +
                   ", sigma2=" + std::to_string(p.sigma2) + ")";
        });

    m.def("stationary_variance", &stationary_variance, py::arg("params"),
          py::arg("convention") = DiffusionConvention::stationary);

    py::class_<LevelGrid>(m, "LevelGrid")
        .def_static("make", &LevelGrid::make, py::arg("level"), py::arg("base_step") = 0.5,
                    py::arg("refinement") = 2)
        .def_readonly("level", &LevelGrid::level)
        .def_readonly("step", &LevelGrid::step)
        .def_readonly("refinement", &LevelGrid::refinement)
        .def_property_readonly("coarse_step", &LevelGrid::coarse_step);

    m.def(
        "propagate_single",
        [](double x0, const OuParams& p, const LevelGrid& grid, double t0, double t1,
           const StreamKey& key, DiffusionConvention conv) {
            return propagate_single(x0, p, grid, {t0, t1}, key, conv).values;
        },
        py::arg("x0"), py::arg("params"), py::arg("grid"), py::arg("t0"), py::arg("t1"),
        py::arg("key"), py::arg("convention") = DiffusionConvention::stationary,
        "Path values on the grid from t0 to t1, starting value included.");

    m.def(
        "propagate_coupled_pair",
        [](double x0, const OuParams& p, const LevelGrid& grid, double t0, double t1,
           const StreamKey& key, DiffusionConvention conv) {
            auto path = propagate_coupled_pair(x0, p, grid, {t0, t1}, key, conv);
            return py::make_tuple(path.fine.values, path.coarse.values);
        },
        py::arg("x0"), py::arg("params"), py::arg("grid"), py::arg("t0"), py::arg("t1"),
        py::arg("key"), py::arg("convention") = DiffusionConvention::stationary,
        "(fine, coarse) paths driven by the same Brownian increments.");

    py::class_<Hierarchy>(m, "Hierarchy")
        .def(py::init(&make_hierarchy), py::arg("level0"), py::arg("pairs") = py::list())
        .def_property_readonly("level0", [](const Hierarchy& h) { return h.level0; })
        .def_property_readonly("pairs",
                               [](const Hierarchy& h) {
                                   py::list out;
                                   for (const auto& p : h.pairs) out.append(py::make_tuple(p.fine, p.coarse));
                                   return out;
                               })
        .def_property_readonly("finest_level", &Hierarchy::finest_level)
        .def("sizes", &Hierarchy::sizes);

    m.def("mlmc_mean", [](const Hierarchy& h) { return mlmc_mean(h); }, py::arg("hierarchy"));
    m.def(
        "mlmc_quantile",
        [](const Hierarchy& h, double u) { return mlmc_quantile(SortedHierarchy::from(h), u); },
        py::arg("hierarchy"), py::arg("u"));

    py::enum_<SampleSizeRule>(m, "SampleSizeRule")
        .value("standard_sqrt", SampleSizeRule::standard_sqrt)
        .value("linear_weight", SampleSizeRule::linear_weight);

    m.def(
        "optimal_sample_sizes",
        [](const std::vector<double>& v, const std::vector<double>& h, double eps, SampleSizeRule r) {
            return optimal_sample_sizes(v, h, eps, r);
        },
        py::arg("variances"), py::arg("steps"), py::arg("tolerance"),
        py::arg("rule") = SampleSizeRule::standard_sqrt);

    m.def(
        "fixed_budget_sizes",
        [](double budget, double horizon, const std::vector<double>& steps) {
            return fixed_budget_sizes(budget, horizon, steps);
        },
        py::arg("cost_budget"), py::arg("horizon"), py::arg("steps"));

    py::enum_<UniformMode>(m, "UniformMode")
        .value("random", UniformMode::random)
        .value("stratified", UniformMode::stratified);

    py::class_<ForecastEnsemble>(m, "ForecastEnsemble")
        .def_readonly("values", &ForecastEnsemble::values)
        .def_readonly("u", &ForecastEnsemble::u)
        .def_readonly("alpha", &ForecastEnsemble::alpha)
        .def("__len__", [](const ForecastEnsemble& fe) { return fe.values.size(); });

    m.def("generate_forecast", &generate_forecast, py::arg("hierarchy"), py::arg("alpha"),
          py::arg("key"), py::arg("mode") = UniformMode::random);
    m.def("forecast_mean", &forecast_mean, py::arg("forecast"));

    m.def(
        "empirical_cdf",
        [](const std::vector<double>& members, double x) { return empirical_cdf(members, x); },
        py::arg("members"), py::arg("x"));

    py::class_<PitHistogram>(m, "PitHistogram")
        .def_readonly("counts", &PitHistogram::counts)
        .def_readonly("pit_values", &PitHistogram::pit_values)
        .def("total", &PitHistogram::total);

    m.def(
        "build_histogram",
        [](const std::vector<double>& pit, std::size_t bins) { return build_histogram(pit, bins); },
        py::arg("pit_values"), py::arg("bins"));

    py::enum_<Calibration>(m, "Calibration")
        .value("calibrated", Calibration::calibrated)
        .value("underdispersed", Calibration::underdispersed)
        .value("overdispersed", Calibration::overdispersed)
        .value("biased", Calibration::biased)
        .value("indeterminate", Calibration::indeterminate);

    py::class_<CalibrationThresholds>(m, "CalibrationThresholds")
        .def(py::init<>())
        .def_readwrite("max_relative_deviation", &CalibrationThresholds::max_relative_deviation)
        .def_readwrite("skew", &CalibrationThresholds::skew)
        .def_readwrite("underdispersed_ratio", &CalibrationThresholds::underdispersed_ratio)
        .def_readwrite("overdispersed_ratio", &CalibrationThresholds::overdispersed_ratio);

    py::class_<CalibrationDiagnostics>(m, "CalibrationDiagnostics")
        .def_readonly("max_relative_deviation", &CalibrationDiagnostics::max_relative_deviation)
        .def_readonly("endpoint_ratio", &CalibrationDiagnostics::endpoint_ratio)
        .def_readonly("skew", &CalibrationDiagnostics::skew)
        .def_readonly("classification", &CalibrationDiagnostics::classification);

    m.def(
        "diagnose",
        [](const std::vector<std::size_t>& counts, const CalibrationThresholds& t) {
            return diagnose(counts, t);
        },
        py::arg("counts"), py::arg("thresholds") = CalibrationThresholds{});

    m.def(
        "analytic_pit_reference",
        [](std::pair<double, double> forecast, std::pair<double, double> target, std::size_t n) {
            auto ref = analytic_pit_reference({forecast.first, forecast.second},
                                              {target.first, target.second}, n);
            return py::make_tuple(ref.r, ref.density);
        },
        py::arg("forecast"), py::arg("target"), py::arg("n_grid") = 200,
        "(r, density) of the PIT of N(target) under the N(forecast) CDF; laws are (mean, variance).");

    py::class_<RunArtifacts>(m, "RunArtifacts")
        .def_readonly("scenario", &RunArtifacts::scenario)
        .def_readonly("mlpit", &RunArtifacts::mlpit)
        .def_readonly("pit_finest", &RunArtifacts::pit_finest)
        .def_readonly("mlpit_diagnostics", &RunArtifacts::mlpit_diagnostics)
        .def_readonly("finest_diagnostics", &RunArtifacts::finest_diagnostics)
        .def_readonly("reference_l1", &RunArtifacts::reference_l1)
        .def_property_readonly("sizes", [](const RunArtifacts& a) { return a.summary.sizes; });

    m.def(
        "run_scenario",
        [](const std::string& name, const OuParams& forecast, std::uint64_t seed, double horizon,
           int alpha, std::size_t bins, double burn_in, const std::string& out_dir) {
            auto cfg = ExperimentConfig::defaults();
            cfg.seed = seed;
            cfg.horizon = horizon;
            cfg.alpha = alpha;
            cfg.bins = bins;
            cfg.burn_in = burn_in;
            auto sc = scenario_config(cfg, {calibration_from_string(name), forecast});
            py::gil_scoped_release release;
            return run_scenario(sc, out_dir);
        },
        py::arg("name"), py::arg("forecast"), py::arg("seed") = 1, py::arg("horizon") = 4000.0,
        py::arg("alpha") = 8, py::arg("bins") = 20, py::arg("burn_in") = 0.0,
        py::arg("out_dir") = "",
        "Run one scenario against the default target. Writes artifacts when out_dir is given.");
}
