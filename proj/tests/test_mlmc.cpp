#include <doctest.h>

#include <cmath>
#include <random>

#include "mlpit/error.hpp"
#include "mlpit/mlmc.hpp"

using namespace mlpit;

namespace {

// Direct evaluation of the multilevel mean: one double loop over levels and
// samples, no helper reuse.
double brute_force_mlmc_mean(const Hierarchy& h) {
    double total = 0.0;
    for (int l = 0; l <= h.finest_level(); ++l) {
        double sum = 0.0;
        std::size_t n = 0;
        if (l == 0) {
            for (double x : h.level0) {
                sum += x;
                ++n;
            }
        } else {
            const auto& pair = h.pairs[l - 1];
            for (std::size_t i = 0; i < pair.fine.size(); ++i) {
                sum += pair.fine[i] - pair.coarse[i];
                ++n;
            }
        }
        total += sum / n;
    }
    return total;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an mlpit::Error");
    return ErrorCode::io;
}

}  // namespace

TEST_CASE("mc_mean") {
    CHECK(mc_mean(std::vector<double>{3.0}) == 3.0);
    CHECK(mc_mean(std::vector<double>{1, 2, 3, 4}) == 2.5);
    CHECK(mc_mean(std::vector<double>{1, 2, 3}, [](double x) { return x * x; }) ==
          doctest::Approx(14.0 / 3.0));
    CHECK(code_of([] { mc_mean(std::vector<double>{}); }) == ErrorCode::empty_ensemble);
}

TEST_CASE("mc_mean of stationary OU samples") {
    const OuParams p{0.1, 0.0, 0.1};
    // t = 200 is twenty relaxation times, so level-0 terminal values are stationary.
    const auto sampler = make_ou_terminal_sampler(p, 0.0, 200.0, 0.5, 2, 77);
    const auto samples = sampler(0, 0, 100'000);
    CHECK(std::abs(mc_mean(samples.fine)) < 3.0 * std::sqrt(0.5 / 1e5));
}

TEST_CASE("level_difference_mean") {
    CHECK(level_difference_mean({{1, 2, 3}, {1, 2, 3}}) == 0.0);
    CHECK(level_difference_mean({{2, 4}, {1, 1}}) == 2.0);
    CHECK(code_of([] { level_difference_mean({}); }) == ErrorCode::empty_ensemble);

    const auto sampler =
        make_ou_terminal_sampler({0.1, 0.0, 0.1}, 0.0, 10.0, 0.5, 2, 5);
    const auto pair = sampler(1, 0, 10'000);
    double loop = 0.0;
    for (std::size_t i = 0; i < pair.size(); ++i) loop += pair.fine[i] - pair.coarse[i];
    CHECK(level_difference_mean(pair) == doctest::Approx(loop / 10'000).epsilon(1e-12));
}

TEST_CASE("mlmc_mean") {
    Hierarchy h;
    h.level0 = {1.0, 2.0, 6.0};
    CHECK(mlmc_mean(h) == mc_mean(h.level0));

    h.pairs = {{{1, 2}, {1, 2}}, {{5, 5, 5, 5}, {5, 5, 5, 5}}};
    CHECK(mlmc_mean(h) == mc_mean(h.level0));

    Hierarchy toy;
    toy.level0 = {0.5, 1.5, -2.0, 4.0};
    toy.pairs = {{{0.1, 0.3}, {0.0, 0.1}}, {{1.0}, {0.75}}, {{2.0, 2.0, 1.0}, {1.0, 2.5, 1.0}}};
    CHECK(mlmc_mean(toy) == doctest::Approx(brute_force_mlmc_mean(toy)).epsilon(1e-12));

    Hierarchy bad = toy;
    bad.pairs[1].coarse.push_back(0.0);
    CHECK(code_of([&] { mlmc_mean(bad); }) == ErrorCode::structure);
}

TEST_CASE("mlmc_mean equals brute force on random hierarchies") {
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<int> levels(0, 3), size(1, 9);
    std::normal_distribution<double> value(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        Hierarchy h;
        h.level0.resize(size(gen));
        for (auto& x : h.level0) x = value(gen);
        const int L = levels(gen);
        for (int l = 1; l <= L; ++l) {
            LevelPairEnsemble pair;
            const int n = size(gen);
            for (int i = 0; i < n; ++i) {
                pair.fine.push_back(value(gen));
                pair.coarse.push_back(value(gen));
            }
            h.pairs.push_back(pair);
        }
        CHECK(mlmc_mean(h) == doctest::Approx(brute_force_mlmc_mean(h)).epsilon(1e-12));
    }
}

TEST_CASE("level_stats") {
    Hierarchy h;
    h.level0 = {1.0, 3.0};
    h.pairs = {{{0.0, 2.0}, {0.0, 0.0}}, {{1.0, 2.0, 3.0}, {0.5, 1.5, 2.5}}};
    h.grids = {LevelGrid::make(0, 0.5, 2), LevelGrid::make(1, 0.5, 2), LevelGrid::make(2, 0.5, 2)};
    const auto s = level_stats(h);
    CHECK(s.mean == std::vector<double>{2.0, 1.0, 0.5});
    CHECK(s.variance[0] == 2.0);
    CHECK(s.variance[1] == 2.0);
    CHECK(s.variance[2] == 0.0);
    CHECK(s.unit_cost == std::vector<double>{2.0, 6.0, 12.0});

    h.pairs[1] = {{1.0}, {0.0}};
    CHECK(code_of([&] { level_stats(h); }) == ErrorCode::insufficient_samples);
}

TEST_CASE("level_stats variance decay on OU levels") {
    const auto sampler = make_ou_terminal_sampler({0.1, 0.0, 0.1}, 0.0, 10.0, 0.5, 2, 31);
    Hierarchy h;
    h.level0 = sampler(0, 0, 1000).fine;
    for (int l = 1; l <= 4; ++l) h.pairs.push_back(sampler(l, 0, 10'000));
    const auto s = level_stats(h);
    for (int l = 2; l <= 4; ++l) {
        const double ratio = s.variance[l] / s.variance[l - 1];
        CHECK(ratio > 0.25 / 2.0);
        CHECK(ratio < 0.25 * 2.0);
    }
}

TEST_CASE("optimal_sample_sizes") {
    const std::vector<double> one_v{1.0}, one_h{1.0};
    CHECK(optimal_sample_sizes(one_v, one_h, 1.0) == std::vector<std::size_t>{2});
    CHECK(optimal_sample_sizes(one_v, one_h, 1.0, SampleSizeRule::linear_weight) ==
          std::vector<std::size_t>{2});

    const std::vector<double> zero_v{0.0, 0.0}, steps{0.5, 0.25};
    CHECK(optimal_sample_sizes(zero_v, steps, 0.1) == std::vector<std::size_t>{0, 0});

    // The two readings differ once V_l h_l != 1: V = (4, 1), h = (1/2, 1/4), eps = 1.
    // sum sqrt(V/h) = sqrt(8) + 2; standard: 2 (sqrt 2)(sqrt8 + 2) = 8 + 4 sqrt 2 -> 14,
    // linear: 2 * 2 * (sqrt8 + 2) = 8 sqrt 2 + 8 -> 20 for level 0.
    const std::vector<double> v{4.0, 1.0};
    CHECK(optimal_sample_sizes(v, steps, 1.0)[0] == 14);
    CHECK(optimal_sample_sizes(v, steps, 1.0, SampleSizeRule::linear_weight)[0] == 20);

    SUBCASE("doubling the tolerance quarters every size") {
        const std::vector<double> vv{0.5, 0.02, 0.005, 0.0012};
        const std::vector<double> hh{0.5, 0.25, 0.125, 0.0625};
        const auto fine = optimal_sample_sizes(vv, hh, 0.01);
        const auto coarse = optimal_sample_sizes(vv, hh, 0.02);
        for (std::size_t l = 0; l < fine.size(); ++l) {
            CHECK(coarse[l] == (fine[l] + 3) / 4);  // ceil(x / 4) == ceil(ceil(x) / 4)
        }
    }

    CHECK(code_of([&] { optimal_sample_sizes(one_v, one_h, 0.0); }) == ErrorCode::invalid_tolerance);
    CHECK(code_of([&] { optimal_sample_sizes(one_v, one_h, -1.0); }) == ErrorCode::invalid_tolerance);
}

TEST_CASE("needs_new_level") {
    CHECK_FALSE(needs_new_level(0.0, 2, 0.1));
    CHECK(needs_new_level(0.1, 2, 0.1));
    CHECK_FALSE(needs_new_level(0.05, 2, 0.1));
    CHECK(needs_new_level(-0.1, 2, 0.1));
    LevelStats s;
    s.mean = {1.0, 0.05};
    CHECK_FALSE(needs_new_level(s, 2, 0.1));
}

TEST_CASE("fixed_budget_sizes") {
    std::vector<LevelGrid> grids;
    for (int l = 0; l <= 4; ++l) grids.push_back(LevelGrid::make(l, 0.5, 2));

    const auto full = fixed_budget_sizes(1.536e7, 40000.0, grids);
    CHECK(full == std::vector<std::size_t>{128, 64, 32, 16, 8});
    CHECK(fixed_budget_sizes(1.536e6, 4000.0, grids) == full);

    const auto half = fixed_budget_sizes(0.768e7, 40000.0, grids);
    CHECK(half == std::vector<std::size_t>{64, 32, 16, 8, 4});

    for (std::size_t l = 1; l < full.size(); ++l) CHECK(full[l] <= full[l - 1]);

    CHECK(code_of([&] { fixed_budget_sizes(1e4, 40000.0, grids); }) == ErrorCode::budget_too_small);
}

TEST_CASE("run_adaptive") {
    const OuParams p{0.1, 0.0, 0.1};
    const auto sampler = make_ou_terminal_sampler(p, 1.0, 10.0, 0.5, 2, 3);

    SUBCASE("slack tolerance stops at level 0") {
        AdaptiveConfig cfg;
        cfg.tolerance = 10.0;
        const auto r = run_adaptive(sampler, cfg);
        CHECK(r.hierarchy.finest_level() == 0);
        CHECK(r.hierarchy.level0.size() == cfg.pilot_samples);
    }

    SUBCASE("tighter tolerance costs more") {
        AdaptiveConfig loose, tight;
        loose.tolerance = 0.04;
        tight.tolerance = 0.02;
        const auto a = run_adaptive(sampler, loose);
        const auto b = run_adaptive(sampler, tight);
        CHECK(b.total_cost >= a.total_cost);
        CHECK(b.estimator_variance <= 0.5 * tight.tolerance * tight.tolerance * 1.05);
        CHECK(std::abs(b.estimate - std::exp(-1.0)) < 4.0 * tight.tolerance);
    }

    SUBCASE("level cap reached") {
        AdaptiveConfig cfg;
        cfg.tolerance = 1e-4;
        cfg.max_level = 0;
        cfg.pilot_samples = 10;
        try {
            const auto quick = make_ou_terminal_sampler(p, 1.0, 1.0, 0.5, 2, 3);
            run_adaptive(quick, cfg);
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::tolerance_not_met);
            CHECK(std::string(e.what()).find("level 0: N=") != std::string::npos);
        }
    }
}
