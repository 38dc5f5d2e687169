#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mlpit/error.hpp"
#include "mlpit/mlmc.hpp"
#include "mlpit/ou.hpp"

using namespace mlpit;

namespace {

struct SampleMoments {
    double mean;
    double variance;
};

SampleMoments sample_moments(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, ss / (n - 1)};
}

}  // namespace

TEST_CASE("euler-maruyama step") {
    const OuParams p{0.1, 0.0, 0.1};
    CHECK(euler_maruyama_step(0.0, p, 0.5, 0.0) == 0.0);
    CHECK(euler_maruyama_step(1.0, p, 0.5, 0.2, DiffusionConvention::literal) ==
          doctest::Approx(0.97).epsilon(1e-14));
    CHECK(euler_maruyama_step(1.0, p, 0.5, 0.2, DiffusionConvention::stationary) ==
          doctest::Approx(0.95 + std::sqrt(0.1) * 0.2).epsilon(1e-14));
    const OuParams shifted{0.4, 0.2, 0.1};
    CHECK(euler_maruyama_step(0.2, shifted, 0.5, 0.0) == 0.2);
}

TEST_CASE("stationary laws of the two conventions") {
    const OuParams calibrated{0.1, 0.0, 0.1};
    const OuParams biased{0.4, 0.2, 0.1};
    CHECK(stationary_variance(calibrated, DiffusionConvention::stationary) == doctest::Approx(0.5));
    CHECK(stationary_variance(biased, DiffusionConvention::stationary) == doctest::Approx(0.125));
    CHECK(stationary_variance(calibrated, DiffusionConvention::literal) == doctest::Approx(0.05));
    CHECK(stationary_mean(biased) == 0.2);
}

TEST_CASE("level grids") {
    const auto g = LevelGrid::make(4, 0.5, 2);
    CHECK(g.step == 0.03125);
    CHECK(g.coarse_step() == 0.0625);
    CHECK_THROWS_AS(LevelGrid::make(1, 0.5, 1), Error);
    CHECK_THROWS_AS(LevelGrid::make(-1, 0.5, 2), Error);
}

TEST_CASE("grid alignment") {
    CHECK(aligned_step_count({0.0, 1.0}, 0.03125) == 32);
    try {
        aligned_step_count({0.0, 1.0}, 0.3);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::grid_alignment);
    }
    const OuParams p{0.1, 0.0, 0.1};
    // span of 0.75 is a multiple of the fine step 0.25 but not of the coarse step 0.5
    CHECK_THROWS_AS(propagate_coupled_pair(0.0, p, LevelGrid::make(1, 0.5, 2), {0.0, 0.75},
                                           {1, 1, 0, StreamPurpose::path_noise}),
                    Error);
    CHECK_THROWS_AS(propagate_coupled_pair(0.0, p, LevelGrid::make(0, 0.5, 2), {0.0, 1.0},
                                           {1, 0, 0, StreamPurpose::path_noise}),
                    Error);
}

TEST_CASE("coupled pair shares its Brownian increments") {
    const OuParams p{0.1, 0.0, 0.1};
    const auto grid = LevelGrid::make(3, 0.5, 2);
    const StreamKey key{11, 3, 5, StreamPurpose::path_noise};
    const auto path = propagate_coupled_pair(0.3, p, grid, {0.0, 10.0}, key);

    REQUIRE(path.fine.values.size() == 161);
    REQUIRE(path.coarse.values.size() == 81);
    CHECK(path.fine.values.front() == 0.3);
    CHECK(path.coarse.values.front() == 0.3);

    // Rebuild both paths from the raw fine increments of the same key.
    const auto dw = gaussian_increments(key, 160, grid.step);
    double fine = 0.3, coarse = 0.3;
    for (std::size_t n = 0; n < 80; ++n) {
        double sum = 0.0;
        for (std::size_t j = 0; j < 2; ++j) {
            fine = euler_maruyama_step(fine, p, grid.step, dw[2 * n + j]);
            CHECK(fine == path.fine.values[2 * n + j + 1]);
            sum += dw[2 * n + j];
        }
        coarse = euler_maruyama_step(coarse, p, grid.coarse_step(), sum);
        CHECK(coarse == path.coarse.values[n + 1]);
    }
}

TEST_CASE("noiseless paths converge to the ODE at first order") {
    const OuParams p{0.1, 0.0, 0.0};
    const double exact = std::exp(-0.1 * 10.0);
    std::vector<double> err;
    double previous_gap = INFINITY;
    for (int level = 1; level <= 5; ++level) {
        const auto path = propagate_coupled_pair(1.0, p, LevelGrid::make(level, 0.5, 2), {0.0, 10.0},
                                                 {1, static_cast<std::uint32_t>(level), 0,
                                                  StreamPurpose::path_noise});
        const double gap = std::abs(path.fine.values.back() - path.coarse.values.back());
        CHECK(gap < previous_gap);
        previous_gap = gap;
        err.push_back(std::abs(path.fine.values.back() - exact));
    }
    for (std::size_t i = 1; i < err.size(); ++i) {
        CHECK(err[i - 1] / err[i] == doctest::Approx(2.0).epsilon(0.1));
    }

    const auto flat = propagate_single(0.0, OuParams{0.1, 0.0, 0.0}, LevelGrid::make(0, 0.5, 2),
                                       {0.0, 20.0}, {1, 0, 0, StreamPurpose::path_noise});
    CHECK(std::all_of(flat.values.begin(), flat.values.end(), [](double x) { return x == 0.0; }));
}

TEST_CASE("strong mean reversion pins both paths near mu") {
    const auto grid = LevelGrid::make(2, 0.5, 2);  // fine 0.125, coarse 0.25
    const double h = grid.coarse_step();
    // alpha * h_coarse = 1 puts the coarse map at mu + noise; noise scaled to O(h^1.5).
    const OuParams p{1.0 / h, 0.7, h * h};
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto path = propagate_coupled_pair(5.0, p, grid, {0.0, 4.0},
                                                 {3, 2, i, StreamPurpose::path_noise});
        CHECK(std::abs(path.fine.values.back() - 0.7) < 5.0 * h);
        CHECK(std::abs(path.coarse.values.back() - 0.7) < 5.0 * h);
    }
}

TEST_CASE("difference variance decays like M^2") {
    const OuParams p{0.1, 0.0, 0.1};
    const auto sampler = make_ou_terminal_sampler(p, 0.0, 10.0, 0.5, 2, 2024);
    std::vector<double> v;
    for (int level = 1; level <= 4; ++level) {
        const auto pair = sampler(level, 0, 10'000);
        std::vector<double> diff(pair.size());
        for (std::size_t i = 0; i < pair.size(); ++i) diff[i] = pair.fine[i] - pair.coarse[i];
        v.push_back(sample_moments(diff).variance);
    }
    for (std::size_t i = 1; i < v.size(); ++i) {
        INFO("V_" << i << "/V_" << i + 1 << " = " << v[i - 1] / v[i]);
        CHECK(v[i - 1] / v[i] == doctest::Approx(4.0).epsilon(0.2));
    }
}

TEST_CASE("long single path matches the stationary law") {
    const OuParams p{0.1, 0.0, 0.1};
    const auto grid = LevelGrid::make(4, 0.5, 2);
    const double horizon = 4000.0;

    SUBCASE("stationary convention") {
        const auto path = propagate_single(0.0, p, grid, {0.0, horizon},
                                           {5, 0, 0, StreamPurpose::observation_noise});
        const auto m = sample_moments(path.values);
        const double se = std::sqrt(2.0 * 0.5 / (p.alpha * horizon));
        CHECK(std::abs(m.mean) < 3.0 * se);
        CHECK(m.variance == doctest::Approx(0.5).epsilon(0.15));
    }
    SUBCASE("literal convention") {
        const auto path = propagate_single(0.0, p, grid, {0.0, horizon},
                                           {5, 0, 0, StreamPurpose::observation_noise},
                                           DiffusionConvention::literal);
        const auto m = sample_moments(path.values);
        const double se = std::sqrt(2.0 * 0.05 / (p.alpha * horizon));
        CHECK(std::abs(m.mean) < 3.0 * se);
        CHECK(m.variance == doctest::Approx(0.05).epsilon(0.15));
    }
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(OuParams({0.0, 0.0, 0.1}).validate(), Error);
    CHECK_THROWS_AS(OuParams({0.1, 0.0, -0.1}).validate(), Error);
    CHECK_NOTHROW(OuParams({0.1, 0.0, 0.0}).validate());
}
