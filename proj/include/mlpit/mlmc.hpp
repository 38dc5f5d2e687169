#pragma once

// Multilevel Monte Carlo estimators and sample-size rules.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mlpit/hierarchy.hpp"

namespace mlpit {

double mc_mean(std::span<const double> ensemble, const Observable& f = identity_observable);

double level_difference_mean(const LevelPairEnsemble& pair,
                             const Observable& f = identity_observable);

/// Level-0 mean plus the mean of every fine-minus-coarse correction.
double mlmc_mean(const Hierarchy& h, const Observable& f = identity_observable);

/// Per-level statistics. Index 0 describes f(X_0) itself; index l >= 1 describes
/// f(fine) - f(coarse) of pair l.
struct LevelStats {
    std::vector<double> mean;
    std::vector<double> variance;  // unbiased, N - 1 divisor
    std::vector<double> unit_cost; // per unit of simulated time; empty without grids
};

LevelStats level_stats(const Hierarchy& h, const Observable& f = identity_observable);

/// Cost of one sample of level `level` per unit simulated time: 1/h for level 0,
/// 1.5/h for coupled levels (one fine plus half as many coarse steps for M = 2).
double unit_cost(const LevelGrid& grid);

/// Which weighting to use in the optimal sample-size formula.
///   standard_sqrt: N_l = ceil(2 eps^-2 sqrt(V_l h_l) sum_n sqrt(V_n / h_n))
///   linear_weight: N_l = ceil(2 eps^-2 (V_l h_l)    sum_n sqrt(V_n / h_n))
enum class SampleSizeRule { standard_sqrt, linear_weight };

std::vector<std::size_t> optimal_sample_sizes(std::span<const double> variances,
                                              std::span<const double> steps, double tolerance,
                                              SampleSizeRule rule = SampleSizeRule::standard_sqrt);

std::vector<std::size_t> optimal_sample_sizes(const LevelStats& stats,
                                              std::span<const LevelGrid> grids, double tolerance,
                                              SampleSizeRule rule = SampleSizeRule::standard_sqrt);

/// True while |finest correction| >= (M - 1) eps / sqrt(2).
bool needs_new_level(double finest_mean, int refinement, double tolerance);
bool needs_new_level(const LevelStats& stats, int refinement, double tolerance);

/// N_l = floor((2/3) C_max T^-1 h_l). Throws budget_too_small if any N_l is 0.
std::vector<std::size_t> fixed_budget_sizes(double cost_budget, double horizon,
                                            std::span<const double> steps);
std::vector<std::size_t> fixed_budget_sizes(double cost_budget, double horizon,
                                            std::span<const LevelGrid> grids);

/// Produces `count` samples of level `level` with sample indices
/// first_index, first_index + 1, ... Level 0 leaves `coarse` empty.
using LevelSampler =
    std::function<LevelPairEnsemble(int level, std::uint64_t first_index, std::size_t count)>;

struct AdaptiveConfig {
    double tolerance = 0.01;
    int refinement = 2;
    double base_step = 0.5;
    int max_level = 10;
    std::size_t pilot_samples = 100;
    SampleSizeRule rule = SampleSizeRule::standard_sqrt;
    /// Upper bound on sample-size update rounds per level count.
    int max_update_rounds = 20;
};

struct AdaptiveResult {
    Hierarchy hierarchy;
    LevelStats stats;
    double estimate = 0.0;
    /// sum_l V_l / N_l
    double estimator_variance = 0.0;
    /// sum_l N_l * unit_cost_l
    double total_cost = 0.0;
};

/// Giles-style adaptive MLMC: pilot each new level, size levels with
/// optimal_sample_sizes, extend, and add levels until needs_new_level is false.
/// Throws tolerance_not_met (message carries per-level diagnostics) when the
/// level cap is reached first.
AdaptiveResult run_adaptive(const LevelSampler& sampler, const AdaptiveConfig& config,
                            const Observable& f = identity_observable);

/// Terminal values at `horizon` of OU paths started at x0, on the grid
/// base_step * refinement^-level. Level-l sample i uses StreamKey(seed, l, i).
LevelSampler make_ou_terminal_sampler(const OuParams& params, double x0, double horizon,
                                      double base_step, int refinement, std::uint64_t seed,
                                      DiffusionConvention convention = DiffusionConvention::stationary);

}  // namespace mlpit
