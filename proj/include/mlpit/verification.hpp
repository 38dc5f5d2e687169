#pragma once

// Calibration verification: empirical CDF, PIT samples, PIT histograms and a
// threshold classifier for their shape.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mlpit/forecast.hpp"

namespace mlpit {

/// Fraction of members <= x.
double empirical_cdf(std::span<const double> members, double x);
double empirical_cdf(const ForecastEnsemble& fe, double x);

/// PIT sample of observation y: the forecast's empirical CDF at y, ties inclusive.
double pit_sample(const ForecastEnsemble& fe, double y);
double pit_sample(std::span<const double> members, double y);

struct PitHistogram {
    std::vector<std::size_t> counts;
    std::vector<double> pit_values;

    std::size_t bins() const noexcept { return counts.size(); }
    std::size_t total() const noexcept;
    double bin_lower(std::size_t i) const { return static_cast<double>(i) / bins(); }
    double bin_upper(std::size_t i) const { return static_cast<double>(i + 1) / bins(); }
};

/// Bins [(i-1)/B, i/B) with the last bin closed at 1. Throws domain for values
/// outside [0, 1] and invalid_argument for B < 1.
PitHistogram build_histogram(std::span<const double> pit_values, std::size_t bins);

enum class Calibration { calibrated, underdispersed, overdispersed, biased, indeterminate };

const char* to_string(Calibration c) noexcept;
Calibration calibration_from_string(const std::string& name);

struct CalibrationThresholds {
    double max_relative_deviation = 0.65;
    double skew = 0.1;
    double underdispersed_ratio = 2.0;
    double overdispersed_ratio = 0.5;
};

struct CalibrationDiagnostics {
    /// max_i |H_i - N_y/B| / (N_y/B)
    double max_relative_deviation = 0.0;
    /// mean(H_1, H_B) / mean(H_2..H_{B-1}); +inf when interior bins are empty.
    double endpoint_ratio = 1.0;
    /// (mass of the lower floor(B/2) bins - mass of the upper floor(B/2) bins) / N_y
    double skew = 0.0;
    Calibration classification = Calibration::calibrated;
};

/// Classifies in order: biased if |skew| >= skew threshold; underdispersed if the
/// endpoint ratio is at least its threshold; overdispersed if at most its
/// threshold; calibrated if the max relative deviation is below its threshold;
/// indeterminate otherwise. Throws empty_input when the histogram is empty.
CalibrationDiagnostics diagnose(std::span<const std::size_t> counts,
                                const CalibrationThresholds& thresholds = {});
CalibrationDiagnostics diagnose(const PitHistogram& hist,
                                const CalibrationThresholds& thresholds = {});

struct Gaussian {
    double mean = 0.0;
    double variance = 1.0;
};

struct ReferenceDensity {
    std::vector<double> r;
    std::vector<double> density;
};

/// Density of R = F(Y), F the forecast CDF and Y ~ target, on the bin midpoints
/// r_j = (j + 1/2) / n_grid. Closed form by change of variables:
///   g(r) = phi_target(x) / phi_forecast(x),  x = F^-1(r).
ReferenceDensity analytic_pit_reference(const Gaussian& forecast, const Gaussian& target,
                                        std::size_t n_grid);

/// P(R in bin i) for B equal bins, i.e. the exact expected PIT histogram shape.
std::vector<double> reference_bin_probabilities(const Gaussian& forecast, const Gaussian& target,
                                                std::size_t bins);

/// L1 distance between the histogram normalised to a density on [0, 1] and a
/// reference given as per-bin probabilities: sum_i |H_i / N_y - p_i|.
double histogram_l1_distance(const PitHistogram& hist, std::span<const double> bin_probabilities);

}  // namespace mlpit
