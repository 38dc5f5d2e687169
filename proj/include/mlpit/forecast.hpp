#pragma once

// Single ensemble forecast from a multilevel hierarchy by inverse transform
// sampling of the multilevel quantile estimator.
//
// Each level is sorted once. A forecast member for a uniform draw u is
//
//   R_0[ceil(N_0 u)] + sum_{l=1..L} ( R_l^fine[ceil(N_l u)] - R_l^coarse[ceil(N_l u)] )
//
// where R are 1-based order statistics and the fine and coarse ensembles of a
// pair are sorted independently but read at the same rank. Rank 0 (u = 0) is
// clamped to 1.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mlpit/hierarchy.hpp"
#include "mlpit/rng.hpp"

namespace mlpit {

/// Ascending order statistics of one ensemble. Ties are kept.
class SortedLevel {
public:
    SortedLevel() = default;
    explicit SortedLevel(std::span<const double> values);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    /// 1-based order statistic.
    double rank(std::size_t r) const { return values_[r - 1]; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

struct SortedPair {
    SortedLevel fine;
    SortedLevel coarse;
};

struct SortedHierarchy {
    SortedLevel level0;
    std::vector<SortedPair> pairs;

    static SortedHierarchy from(const Hierarchy& h);
};

/// ceil(n u) clamped to [1, n]. Throws domain for u outside [0, 1].
std::size_t quantile_rank(std::size_t n, double u);

double empirical_quantile(const SortedLevel& sorted, double u);

double mlmc_quantile(const SortedHierarchy& sorted, double u);

/// Same estimator at u = i / n, with every rank computed exactly in integers.
double mlmc_quantile_stratified(const SortedHierarchy& sorted, std::size_t i, std::size_t n);

enum class UniformMode {
    random,      // u_i drawn from the quantile_uniform stream
    stratified,  // u_i = i / N, i = 1..N
};

struct ForecastEnsemble {
    std::vector<double> values;
    std::vector<double> u;
    int alpha = 1;
    std::vector<std::size_t> source_sizes;  // N_l of the hierarchy it came from
};

/// N = alpha * N_0 members. Throws structure for a malformed hierarchy and
/// invalid_argument for alpha < 1.
ForecastEnsemble generate_forecast(const Hierarchy& h, int alpha, const StreamKey& key,
                                   UniformMode mode = UniformMode::random);

double forecast_mean(const ForecastEnsemble& fe);

/// Number of adjacent decreases in member value when members are ordered by u.
/// Zero whenever the combined quantile estimator is monotone on the draws.
std::size_t count_quantile_inversions(const ForecastEnsemble& fe);

}  // namespace mlpit
