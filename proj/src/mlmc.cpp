#include "mlpit/mlmc.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "mlpit/error.hpp"
#include "summation.hpp"

namespace mlpit {

namespace {

void require_non_empty(std::size_t n, const char* what) {
    if (n == 0) throw Error(ErrorCode::empty_ensemble, std::string(what) + " is empty");
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

// Two-pass mean/variance in sample-index order.
template <typename Value>
Moments moments(std::size_t n, Value value) {
    detail::CompensatedSum sum;
    for (std::size_t i = 0; i < n; ++i) sum.add(value(i));
    const double mean = sum.value() / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = value(i) - mean;
        ss += d * d;
    }
    return {mean, n > 1 ? ss / static_cast<double>(n - 1) : 0.0};
}

}  // namespace

double mc_mean(std::span<const double> ensemble, const Observable& f) {
    require_non_empty(ensemble.size(), "ensemble");
    detail::CompensatedSum sum;
    for (double x : ensemble) sum.add(f(x));
    return sum.value() / static_cast<double>(ensemble.size());
}

double level_difference_mean(const LevelPairEnsemble& pair, const Observable& f) {
    require_non_empty(pair.size(), "pair ensemble");
    if (pair.coarse.size() != pair.fine.size()) {
        throw Error(ErrorCode::structure, "pair ensemble has mismatched fine/coarse sizes");
    }
    detail::CompensatedSum sum;
    for (std::size_t i = 0; i < pair.size(); ++i) sum.add(f(pair.fine[i]) - f(pair.coarse[i]));
    return sum.value() / static_cast<double>(pair.size());
}

double mlmc_mean(const Hierarchy& h, const Observable& f) {
    h.validate();
    detail::CompensatedSum estimate;
    estimate.add(mc_mean(h.level0, f));
    for (const auto& pair : h.pairs) estimate.add(level_difference_mean(pair, f));
    return estimate.value();
}

double unit_cost(const LevelGrid& grid) {
    return (grid.level == 0 ? 1.0 : 1.5) / grid.step;
}

LevelStats level_stats(const Hierarchy& h, const Observable& f) {
    h.validate();
    LevelStats stats;
    for (int l = 0; l <= h.finest_level(); ++l) {
        if (h.size_at(l) < 2) {
            throw Error(ErrorCode::insufficient_samples,
                        "level " + std::to_string(l) + " has fewer than 2 samples");
        }
    }
    const auto& x0 = h.level0;
    auto m0 = moments(x0.size(), [&](std::size_t i) { return f(x0[i]); });
    stats.mean.push_back(m0.mean);
    stats.variance.push_back(m0.variance);
    for (const auto& pair : h.pairs) {
        auto m = moments(pair.size(),
                         [&](std::size_t i) { return f(pair.fine[i]) - f(pair.coarse[i]); });
        stats.mean.push_back(m.mean);
        stats.variance.push_back(m.variance);
    }
    for (const auto& grid : h.grids) stats.unit_cost.push_back(unit_cost(grid));
    return stats;
}

std::vector<std::size_t> optimal_sample_sizes(std::span<const double> variances,
                                              std::span<const double> steps, double tolerance,
                                              SampleSizeRule rule) {
    if (!(tolerance > 0.0)) {
        throw Error(ErrorCode::invalid_tolerance, "tolerance must be > 0");
    }
    if (variances.size() != steps.size()) {
        throw Error(ErrorCode::structure, "need one step per level variance");
    }
    double weight_sum = 0.0;
    for (std::size_t n = 0; n < variances.size(); ++n) {
        if (!(variances[n] >= 0.0)) throw Error(ErrorCode::invalid_argument, "variance < 0");
        if (!(steps[n] > 0.0)) throw Error(ErrorCode::invalid_step, "step must be > 0");
        weight_sum += std::sqrt(variances[n] / steps[n]);
    }
    const double scale = 2.0 / (tolerance * tolerance) * weight_sum;
    std::vector<std::size_t> sizes;
    sizes.reserve(variances.size());
    for (std::size_t l = 0; l < variances.size(); ++l) {
        const double vh = variances[l] * steps[l];
        const double factor = rule == SampleSizeRule::standard_sqrt ? std::sqrt(vh) : vh;
        sizes.push_back(static_cast<std::size_t>(std::ceil(scale * factor)));
    }
    return sizes;
}

std::vector<std::size_t> optimal_sample_sizes(const LevelStats& stats,
                                              std::span<const LevelGrid> grids, double tolerance,
                                              SampleSizeRule rule) {
    std::vector<double> steps;
    steps.reserve(grids.size());
    for (const auto& g : grids) steps.push_back(g.step);
    return optimal_sample_sizes(stats.variance, steps, tolerance, rule);
}

bool needs_new_level(double finest_mean, int refinement, double tolerance) {
    return std::abs(finest_mean) >= (refinement - 1) * tolerance / std::sqrt(2.0);
}

bool needs_new_level(const LevelStats& stats, int refinement, double tolerance) {
    if (stats.mean.empty()) throw Error(ErrorCode::structure, "no level statistics");
    return needs_new_level(stats.mean.back(), refinement, tolerance);
}

std::vector<std::size_t> fixed_budget_sizes(double cost_budget, double horizon,
                                            std::span<const double> steps) {
    if (!(cost_budget > 0.0) || !(horizon > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "cost budget and horizon must be > 0");
    }
    std::vector<std::size_t> sizes;
    sizes.reserve(steps.size());
    for (std::size_t l = 0; l < steps.size(); ++l) {
        // C_max / (T * 1.5 / h_l), arranged so that power-of-two steps stay exact.
        const double n = std::floor(cost_budget * steps[l] / (horizon * 1.5));
        if (n < 1.0) {
            throw Error(ErrorCode::budget_too_small,
                        "cost budget gives no samples at level " + std::to_string(l));
        }
        sizes.push_back(static_cast<std::size_t>(n));
    }
    return sizes;
}

std::vector<std::size_t> fixed_budget_sizes(double cost_budget, double horizon,
                                            std::span<const LevelGrid> grids) {
    std::vector<double> steps;
    steps.reserve(grids.size());
    for (const auto& g : grids) steps.push_back(g.step);
    return fixed_budget_sizes(cost_budget, horizon, steps);
}

namespace {

void append(LevelPairEnsemble& into, const LevelPairEnsemble& more) {
    into.fine.insert(into.fine.end(), more.fine.begin(), more.fine.end());
    into.coarse.insert(into.coarse.end(), more.coarse.begin(), more.coarse.end());
}

void extend_level(Hierarchy& h, const LevelSampler& sampler, int level, std::size_t target) {
    const std::size_t have = h.size_at(level);
    if (target <= have) return;
    LevelPairEnsemble batch = sampler(level, have, target - have);
    if (batch.fine.size() != target - have ||
        (level > 0 && batch.coarse.size() != batch.fine.size())) {
        throw Error(ErrorCode::structure, "level sampler returned the wrong number of samples");
    }
    if (level == 0) {
        h.level0.insert(h.level0.end(), batch.fine.begin(), batch.fine.end());
    } else {
        append(h.pairs[level - 1], batch);
    }
}

std::string describe(const LevelStats& stats, const std::vector<std::size_t>& sizes) {
    std::ostringstream os;
    for (std::size_t l = 0; l < stats.mean.size(); ++l) {
        os << "\n  level " << l << ": N=" << sizes[l] << " mean=" << stats.mean[l]
           << " var=" << stats.variance[l];
    }
    return os.str();
}

}  // namespace

AdaptiveResult run_adaptive(const LevelSampler& sampler, const AdaptiveConfig& config,
                            const Observable& f) {
    if (!(config.tolerance > 0.0)) {
        throw Error(ErrorCode::invalid_tolerance, "tolerance must be > 0");
    }
    if (config.pilot_samples < 2) {
        throw Error(ErrorCode::invalid_argument, "pilot needs at least 2 samples");
    }
    Hierarchy h;
    h.grids.push_back(LevelGrid::make(0, config.base_step, config.refinement));
    extend_level(h, sampler, 0, config.pilot_samples);

    for (;;) {
        LevelStats stats = level_stats(h, f);
        for (int round = 0; round < config.max_update_rounds; ++round) {
            auto sizes = optimal_sample_sizes(stats, h.grids, config.tolerance, config.rule);
            bool extended = false;
            for (int l = 0; l <= h.finest_level(); ++l) {
                const std::size_t target = std::max(sizes[l], config.pilot_samples);
                if (target > h.size_at(l)) {
                    extend_level(h, sampler, l, target);
                    extended = true;
                }
            }
            if (!extended) break;
            stats = level_stats(h, f);
        }

        if (!needs_new_level(stats, config.refinement, config.tolerance)) {
            AdaptiveResult result;
            result.estimate = mlmc_mean(h, f);
            for (int l = 0; l <= h.finest_level(); ++l) {
                const auto n = static_cast<double>(h.size_at(l));
                result.estimator_variance += stats.variance[l] / n;
                result.total_cost += n * stats.unit_cost[l];
            }
            result.stats = std::move(stats);
            result.hierarchy = std::move(h);
            return result;
        }
        if (h.finest_level() >= config.max_level) {
            throw Error(ErrorCode::tolerance_not_met,
                        "level cap " + std::to_string(config.max_level) +
                            " reached before the finest correction fell below tolerance" +
                            describe(stats, h.sizes()));
        }
        const int next = h.finest_level() + 1;
        h.pairs.emplace_back();
        h.grids.push_back(LevelGrid::make(next, config.base_step, config.refinement));
        extend_level(h, sampler, next, config.pilot_samples);
    }
}

LevelSampler make_ou_terminal_sampler(const OuParams& params, double x0, double horizon,
                                      double base_step, int refinement, std::uint64_t seed,
                                      DiffusionConvention convention) {
    params.validate();
    const TimeSpan span{0.0, horizon};
    return [=](int level, std::uint64_t first_index, std::size_t count) {
        const LevelGrid grid = LevelGrid::make(level, base_step, refinement);
        LevelPairEnsemble out;
        out.fine.reserve(count);
        if (level == 0) {
            const std::size_t steps = aligned_step_count(span, grid.step);
            for (std::size_t i = 0; i < count; ++i) {
                OuStepper member(x0, params, grid.step,
                                 {seed, 0, first_index + i, StreamPurpose::path_noise},
                                 convention);
                member.advance(steps);
                out.fine.push_back(member.state());
            }
            return out;
        }
        const std::size_t coarse_steps = aligned_step_count(span, grid.coarse_step());
        out.coarse.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            CoupledOuStepper pair(x0, params, grid,
                                  {seed, static_cast<std::uint32_t>(level), first_index + i,
                                   StreamPurpose::path_noise},
                                  convention);
            pair.advance_coarse_steps(coarse_steps);
            out.fine.push_back(pair.fine_state());
            out.coarse.push_back(pair.coarse_state());
        }
        return out;
    };
}

}  // namespace mlpit
