#include "mlpit/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlpit/error.hpp"
#include "summation.hpp"

namespace mlpit {

SortedLevel::SortedLevel(std::span<const double> values) : values_(values.begin(), values.end()) {
    std::stable_sort(values_.begin(), values_.end());
}

SortedHierarchy SortedHierarchy::from(const Hierarchy& h) {
    h.validate();
    SortedHierarchy out;
    out.level0 = SortedLevel(h.level0);
    out.pairs.reserve(h.pairs.size());
    for (const auto& pair : h.pairs) {
        out.pairs.push_back({SortedLevel(pair.fine), SortedLevel(pair.coarse)});
    }
    return out;
}

std::size_t quantile_rank(std::size_t n, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorCode::domain, "quantile level outside [0, 1]");
    const auto r = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * u));
    return std::clamp<std::size_t>(r, 1, n);
}

double empirical_quantile(const SortedLevel& sorted, double u) {
    if (sorted.empty()) throw Error(ErrorCode::empty_ensemble, "cannot take quantile of empty level");
    return sorted.rank(quantile_rank(sorted.size(), u));
}

namespace {

template <typename RankOf>
double combine(const SortedHierarchy& sorted, RankOf rank_of) {
    double x = sorted.level0.rank(rank_of(sorted.level0.size()));
    for (const auto& pair : sorted.pairs) {
        const std::size_t r = rank_of(pair.fine.size());
        x += pair.fine.rank(r) - pair.coarse.rank(r);
    }
    return x;
}

void require_populated(const SortedHierarchy& sorted) {
    if (sorted.level0.empty()) throw Error(ErrorCode::structure, "level-0 ensemble is empty");
    for (const auto& pair : sorted.pairs) {
        if (pair.fine.empty() || pair.fine.size() != pair.coarse.size()) {
            throw Error(ErrorCode::structure, "pair ensemble empty or mismatched");
        }
    }
}

}  // namespace

double mlmc_quantile(const SortedHierarchy& sorted, double u) {
    require_populated(sorted);
    if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorCode::domain, "quantile level outside [0, 1]");
    return combine(sorted, [u](std::size_t n) { return quantile_rank(n, u); });
}

double mlmc_quantile_stratified(const SortedHierarchy& sorted, std::size_t i, std::size_t n) {
    require_populated(sorted);
    if (n == 0 || i > n) throw Error(ErrorCode::domain, "stratified index outside [0, n]");
    return combine(sorted, [i, n](std::size_t levels) {
        const std::size_t r = (levels * i + n - 1) / n;  // ceil(levels * i / n)
        return std::max<std::size_t>(r, 1);
    });
}

ForecastEnsemble generate_forecast(const Hierarchy& h, int alpha, const StreamKey& key,
                                   UniformMode mode) {
    if (alpha < 1) throw Error(ErrorCode::invalid_argument, "forecast alpha must be >= 1");
    const SortedHierarchy sorted = SortedHierarchy::from(h);
    const std::size_t n = static_cast<std::size_t>(alpha) * h.level0.size();

    ForecastEnsemble fe;
    fe.alpha = alpha;
    fe.source_sizes = h.sizes();
    fe.values.reserve(n);
    fe.u.reserve(n);
    if (mode == UniformMode::stratified) {
        for (std::size_t i = 1; i <= n; ++i) {
            fe.u.push_back(static_cast<double>(i) / static_cast<double>(n));
            fe.values.push_back(mlmc_quantile_stratified(sorted, i, n));
        }
    } else {
        RandomStream stream(key);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = stream.next_uniform();
            fe.u.push_back(u);
            fe.values.push_back(mlmc_quantile(sorted, u));
        }
    }
    return fe;
}

double forecast_mean(const ForecastEnsemble& fe) {
    if (fe.values.empty()) throw Error(ErrorCode::empty_ensemble, "forecast ensemble is empty");
    detail::CompensatedSum sum;
    for (double x : fe.values) sum.add(x);
    return sum.value() / static_cast<double>(fe.values.size());
}

std::size_t count_quantile_inversions(const ForecastEnsemble& fe) {
    std::vector<std::size_t> order(fe.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fe.u[a] < fe.u[b]; });
    std::size_t inversions = 0;
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (fe.values[order[k]] < fe.values[order[k - 1]]) ++inversions;
    }
    return inversions;
}

}  // namespace mlpit
