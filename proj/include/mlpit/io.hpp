#pragma once

// CSV and hashing helpers for the experiment artifacts. All CSV output uses
// '.' decimals, LF line endings and shortest round-trip number formatting, so a
// value read back is bit-identical to the value written.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mlpit/forecast.hpp"
#include "mlpit/hierarchy.hpp"
#include "mlpit/verification.hpp"

namespace mlpit {

std::string format_number(double value);
/// Strict full-string parse; throws parse with `row` on failure.
double parse_number(std::string_view text, std::size_t row);

struct ObservationSeries {
    std::vector<double> times;
    std::vector<double> values;

    std::size_t size() const noexcept { return times.size(); }
    /// Throws structure unless times are strictly increasing.
    void validate() const;
};

/// Hierarchy snapshot at one time.
struct TimedHierarchy {
    double time = 0.0;
    Hierarchy hierarchy;
};

// hierarchy.csv: level,sample_index,time,fine_value,coarse_value
// Level-0 rows leave coarse_value empty.
void write_hierarchy_header(std::ostream& os);
void write_hierarchy_rows(std::ostream& os, double time, const Hierarchy& h);
std::vector<TimedHierarchy> read_hierarchy_csv(const std::filesystem::path& path);

// observations.csv: time,value
void write_observations_csv(const std::filesystem::path& path, const ObservationSeries& obs);
ObservationSeries read_observations_csv(const std::filesystem::path& path);

// mlpit.csv / pit_finest.csv: bin_lower,bin_upper,count
void write_histogram_csv(const std::filesystem::path& path, const PitHistogram& hist);
std::vector<std::size_t> read_histogram_csv(const std::filesystem::path& path);

// forecast.csv: index,u,value (index is 1-based)
void write_forecast_csv(const std::filesystem::path& path, const ForecastEnsemble& fe);

// reference_density.csv: r,density
void write_reference_csv(const std::filesystem::path& path, const ReferenceDensity& ref);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace mlpit
