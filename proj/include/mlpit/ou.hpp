#pragma once

// Ornstein-Uhlenbeck model dX = alpha (mu - X) dt + c dW and its Euler-Maruyama
// discretisation, including the coarse/fine coupling used by multilevel
// difference estimators.

#include <cstddef>
#include <vector>

#include "mlpit/rng.hpp"

namespace mlpit {

/// How the `sigma2` parameter enters the diffusion term.
///
/// `stationary`: c = sqrt(sigma2), stationary law N(mu, sigma2 / (2 alpha)).
/// `literal`:    c = sigma2, stationary law N(mu, sigma2^2 / (2 alpha)).
enum class DiffusionConvention { stationary, literal };

struct OuParams {
    double alpha = 0.1;
    double mu = 0.0;
    double sigma2 = 0.1;

    /// Throws ErrorCode::invalid_argument unless alpha > 0 and sigma2 >= 0.
    void validate() const;
};

double diffusion_coefficient(const OuParams& params,
                             DiffusionConvention convention = DiffusionConvention::stationary);
double stationary_mean(const OuParams& params);
double stationary_variance(const OuParams& params,
                           DiffusionConvention convention = DiffusionConvention::stationary);

struct LevelGrid {
    int level = 0;
    double step = 0.5;
    int refinement = 2;

    /// step = base_step * refinement^-level.
    static LevelGrid make(int level, double base_step, int refinement);
    double coarse_step() const { return step * refinement; }
};

struct TimeSpan {
    double start = 0.0;
    double end = 0.0;
    double length() const { return end - start; }
};

struct TimeSeries {
    double start = 0.0;
    double step = 0.0;
    std::vector<double> values;  // values[k] is the state at start + k * step
};

struct CoupledPath {
    TimeSeries fine;
    TimeSeries coarse;
    StreamKey key;
};

/// Number of whole steps of size `step` in `span`; throws grid_alignment when the
/// span is not an integer multiple of the step.
std::size_t aligned_step_count(const TimeSpan& span, double step);

double euler_maruyama_step(double x, const OuParams& params, double h, double dW,
                           DiffusionConvention convention = DiffusionConvention::stationary);

/// Single (uncoupled) Euler-Maruyama member. Noise is drawn sequentially from the
/// stream, one N(0, step) increment per step.
class OuStepper {
public:
    OuStepper(double x0, const OuParams& params, double step, const StreamKey& key,
              DiffusionConvention convention = DiffusionConvention::stationary);

    void advance(std::size_t steps);
    double state() const noexcept { return x_; }

private:
    double x_;
    OuParams params_;
    double step_;
    double sqrt_step_;
    DiffusionConvention convention_;
    RandomStream stream_;
};

/// Coupled fine/coarse member pair. One coarse step consumes `refinement` fine
/// increments; the coarse increment is their sum, accumulated in draw order.
class CoupledOuStepper {
public:
    CoupledOuStepper(double x0, const OuParams& params, const LevelGrid& grid,
                     const StreamKey& key,
                     DiffusionConvention convention = DiffusionConvention::stationary);

    void advance_coarse_steps(std::size_t coarse_steps);
    double fine_state() const noexcept { return fine_; }
    double coarse_state() const noexcept { return coarse_; }

private:
    friend CoupledPath propagate_coupled_pair(double, const OuParams&, const LevelGrid&,
                                              const TimeSpan&, const StreamKey&,
                                              DiffusionConvention);
    void coarse_step(std::vector<double>* fine_trace);

    double fine_;
    double coarse_;
    OuParams params_;
    LevelGrid grid_;
    double sqrt_fine_step_;
    DiffusionConvention convention_;
    RandomStream stream_;
};

/// Requires grid.level >= 1 and a span divisible by the coarse step.
CoupledPath propagate_coupled_pair(double x0, const OuParams& params, const LevelGrid& grid,
                                   const TimeSpan& span, const StreamKey& key,
                                   DiffusionConvention convention = DiffusionConvention::stationary);

TimeSeries propagate_single(double x0, const OuParams& params, const LevelGrid& grid,
                            const TimeSpan& span, const StreamKey& key,
                            DiffusionConvention convention = DiffusionConvention::stationary);

}  // namespace mlpit
