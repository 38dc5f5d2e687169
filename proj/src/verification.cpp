#include "mlpit/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "mlpit/error.hpp"

namespace mlpit {

double empirical_cdf(std::span<const double> members, double x) {
    if (members.empty()) throw Error(ErrorCode::empty_ensemble, "forecast ensemble is empty");
    const auto below = std::count_if(members.begin(), members.end(),
                                     [x](double m) { return m <= x; });
    return static_cast<double>(below) / static_cast<double>(members.size());
}

double empirical_cdf(const ForecastEnsemble& fe, double x) { return empirical_cdf(fe.values, x); }

double pit_sample(const ForecastEnsemble& fe, double y) { return empirical_cdf(fe.values, y); }

double pit_sample(std::span<const double> members, double y) { return empirical_cdf(members, y); }

std::size_t PitHistogram::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

PitHistogram build_histogram(std::span<const double> pit_values, std::size_t bins) {
    if (bins < 1) throw Error(ErrorCode::invalid_argument, "histogram needs at least one bin");
    PitHistogram hist;
    hist.counts.assign(bins, 0);
    hist.pit_values.assign(pit_values.begin(), pit_values.end());
    const double b = static_cast<double>(bins);
    for (double r : pit_values) {
        if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::domain, "PIT value outside [0, 1]");
        const auto i = std::min(static_cast<std::size_t>(std::floor(r * b)), bins - 1);
        ++hist.counts[i];
    }
    return hist;
}

const char* to_string(Calibration c) noexcept {
    switch (c) {
        case Calibration::calibrated: return "calibrated";
        case Calibration::underdispersed: return "underdispersed";
        case Calibration::overdispersed: return "overdispersed";
        case Calibration::biased: return "biased";
        case Calibration::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

Calibration calibration_from_string(const std::string& name) {
    for (auto c : {Calibration::calibrated, Calibration::underdispersed,
                   Calibration::overdispersed, Calibration::biased, Calibration::indeterminate}) {
        if (name == to_string(c)) return c;
    }
    throw Error(ErrorCode::invalid_argument, "unknown calibration class '" + name + "'");
}

CalibrationDiagnostics diagnose(std::span<const std::size_t> counts,
                                const CalibrationThresholds& thresholds) {
    const std::size_t bins = counts.size();
    const auto total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    if (bins == 0 || total == 0) throw Error(ErrorCode::empty_input, "histogram is empty");

    CalibrationDiagnostics d;
    const double expected = static_cast<double>(total) / static_cast<double>(bins);
    for (std::size_t c : counts) {
        d.max_relative_deviation =
            std::max(d.max_relative_deviation, std::abs(static_cast<double>(c) - expected) / expected);
    }

    if (bins >= 3) {
        const double ends = 0.5 * static_cast<double>(counts.front() + counts.back());
        double interior = 0.0;
        for (std::size_t i = 1; i + 1 < bins; ++i) interior += static_cast<double>(counts[i]);
        interior /= static_cast<double>(bins - 2);
        if (interior > 0.0) {
            d.endpoint_ratio = ends / interior;
        } else {
            d.endpoint_ratio = ends > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
        }
    }

    const std::size_t half = bins / 2;
    double lower = 0.0, upper = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        lower += static_cast<double>(counts[i]);
        upper += static_cast<double>(counts[bins - 1 - i]);
    }
    d.skew = (lower - upper) / static_cast<double>(total);

    if (std::abs(d.skew) >= thresholds.skew) {
        d.classification = Calibration::biased;
    } else if (d.endpoint_ratio >= thresholds.underdispersed_ratio) {
        d.classification = Calibration::underdispersed;
    } else if (d.endpoint_ratio <= thresholds.overdispersed_ratio) {
        d.classification = Calibration::overdispersed;
    } else if (d.max_relative_deviation < thresholds.max_relative_deviation) {
        d.classification = Calibration::calibrated;
    } else {
        d.classification = Calibration::indeterminate;
    }
    return d;
}

CalibrationDiagnostics diagnose(const PitHistogram& hist, const CalibrationThresholds& thresholds) {
    return diagnose(std::span<const std::size_t>(hist.counts), thresholds);
}

namespace {

boost::math::normal make_normal(const Gaussian& g) {
    if (!(g.variance > 0.0)) throw Error(ErrorCode::invalid_argument, "variance must be > 0");
    return boost::math::normal(g.mean, std::sqrt(g.variance));
}

}  // namespace

ReferenceDensity analytic_pit_reference(const Gaussian& forecast, const Gaussian& target,
                                        std::size_t n_grid) {
    if (n_grid < 1) throw Error(ErrorCode::invalid_argument, "reference grid needs >= 1 point");
    const auto f = make_normal(forecast);
    const auto y = make_normal(target);
    ReferenceDensity out;
    out.r.reserve(n_grid);
    out.density.reserve(n_grid);
    for (std::size_t j = 0; j < n_grid; ++j) {
        const double r = (static_cast<double>(j) + 0.5) / static_cast<double>(n_grid);
        const double x = boost::math::quantile(f, r);
        out.r.push_back(r);
        out.density.push_back(boost::math::pdf(y, x) / boost::math::pdf(f, x));
    }
    return out;
}

std::vector<double> reference_bin_probabilities(const Gaussian& forecast, const Gaussian& target,
                                                std::size_t bins) {
    if (bins < 1) throw Error(ErrorCode::invalid_argument, "need at least one bin");
    const auto f = make_normal(forecast);
    const auto y = make_normal(target);
    // P(R <= r) = P(Y <= F^-1(r))
    auto cdf_r = [&](std::size_t i) {
        if (i == 0) return 0.0;
        if (i == bins) return 1.0;
        const double r = static_cast<double>(i) / static_cast<double>(bins);
        return boost::math::cdf(y, boost::math::quantile(f, r));
    };
    std::vector<double> p(bins);
    for (std::size_t i = 0; i < bins; ++i) p[i] = cdf_r(i + 1) - cdf_r(i);
    return p;
}

double histogram_l1_distance(const PitHistogram& hist, std::span<const double> bin_probabilities) {
    if (bin_probabilities.size() != hist.bins()) {
        throw Error(ErrorCode::structure, "reference has a different number of bins");
    }
    const auto total = static_cast<double>(hist.total());
    if (total == 0.0) throw Error(ErrorCode::empty_input, "histogram is empty");
    double l1 = 0.0;
    for (std::size_t i = 0; i < hist.bins(); ++i) {
        l1 += std::abs(static_cast<double>(hist.counts[i]) / total - bin_probabilities[i]);
    }
    return l1;
}

}  // namespace mlpit
