#include "mlpit/ou.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlpit/error.hpp"

namespace mlpit {

void OuParams::validate() const {
    if (!(alpha > 0.0)) throw Error(ErrorCode::invalid_argument, "OU alpha must be > 0");
    if (!(sigma2 >= 0.0)) throw Error(ErrorCode::invalid_argument, "OU sigma2 must be >= 0");
    if (!std::isfinite(mu)) throw Error(ErrorCode::invalid_argument, "OU mu must be finite");
}

double diffusion_coefficient(const OuParams& params, DiffusionConvention convention) {
    return convention == DiffusionConvention::stationary ? std::sqrt(params.sigma2)
                                                          : params.sigma2;
}

double stationary_mean(const OuParams& params) { return params.mu; }

double stationary_variance(const OuParams& params, DiffusionConvention convention) {
    const double c = diffusion_coefficient(params, convention);
    return c * c / (2.0 * params.alpha);
}

LevelGrid LevelGrid::make(int level, double base_step, int refinement) {
    if (level < 0) throw Error(ErrorCode::invalid_argument, "level must be >= 0");
    if (refinement < 2) throw Error(ErrorCode::invalid_argument, "refinement must be > 1");
    if (!(base_step > 0.0)) throw Error(ErrorCode::invalid_step, "base step must be > 0");
    return {level, base_step / std::pow(static_cast<double>(refinement), level), refinement};
}

std::size_t aligned_step_count(const TimeSpan& span, double step) {
    if (!(step > 0.0)) throw Error(ErrorCode::invalid_step, "step must be > 0");
    const double length = span.length();
    if (length < 0.0) throw Error(ErrorCode::grid_alignment, "time span ends before it starts");
    const double ratio = length / step;
    const double whole = std::round(ratio);
    if (std::abs(ratio - whole) > 1e-9 * std::max(1.0, ratio)) {
        throw Error(ErrorCode::grid_alignment,
                    "time span of length " + std::to_string(length) +
                        " is not a multiple of step " + std::to_string(step));
    }
    return static_cast<std::size_t>(whole);
}

double euler_maruyama_step(double x, const OuParams& params, double h, double dW,
                           DiffusionConvention convention) {
    return x + params.alpha * (params.mu - x) * h + diffusion_coefficient(params, convention) * dW;
}

OuStepper::OuStepper(double x0, const OuParams& params, double step, const StreamKey& key,
                     DiffusionConvention convention)
    : x_(x0), params_(params), step_(step), convention_(convention), stream_(key) {
    params.validate();
    if (!(step > 0.0)) throw Error(ErrorCode::invalid_step, "step must be > 0");
    sqrt_step_ = std::sqrt(step);
}

void OuStepper::advance(std::size_t steps) {
    for (std::size_t n = 0; n < steps; ++n) {
        x_ = euler_maruyama_step(x_, params_, step_, sqrt_step_ * stream_.next_gaussian(),
                                 convention_);
    }
}

CoupledOuStepper::CoupledOuStepper(double x0, const OuParams& params, const LevelGrid& grid,
                                   const StreamKey& key, DiffusionConvention convention)
    : fine_(x0), coarse_(x0), params_(params), grid_(grid), convention_(convention),
      stream_(key) {
    params.validate();
    if (grid.level < 1) {
        throw Error(ErrorCode::invalid_argument, "coupled pairs need level >= 1");
    }
    if (!(grid.step > 0.0)) throw Error(ErrorCode::invalid_step, "step must be > 0");
    if (grid.refinement < 2) throw Error(ErrorCode::invalid_argument, "refinement must be > 1");
    sqrt_fine_step_ = std::sqrt(grid.step);
}

void CoupledOuStepper::coarse_step(std::vector<double>* fine_trace) {
    double coarse_dw = 0.0;
    for (int j = 0; j < grid_.refinement; ++j) {
        const double dw = sqrt_fine_step_ * stream_.next_gaussian();
        fine_ = euler_maruyama_step(fine_, params_, grid_.step, dw, convention_);
        if (fine_trace) fine_trace->push_back(fine_);
        coarse_dw += dw;
    }
    coarse_ = euler_maruyama_step(coarse_, params_, grid_.coarse_step(), coarse_dw, convention_);
}

void CoupledOuStepper::advance_coarse_steps(std::size_t coarse_steps) {
    for (std::size_t n = 0; n < coarse_steps; ++n) coarse_step(nullptr);
}

CoupledPath propagate_coupled_pair(double x0, const OuParams& params, const LevelGrid& grid,
                                   const TimeSpan& span, const StreamKey& key,
                                   DiffusionConvention convention) {
    CoupledOuStepper stepper(x0, params, grid, key, convention);
    const std::size_t coarse_steps = aligned_step_count(span, grid.coarse_step());

    CoupledPath path;
    path.key = key;
    path.fine = {span.start, grid.step, {}};
    path.coarse = {span.start, grid.coarse_step(), {}};
    path.fine.values.reserve(coarse_steps * grid.refinement + 1);
    path.coarse.values.reserve(coarse_steps + 1);
    path.fine.values.push_back(x0);
    path.coarse.values.push_back(x0);
    for (std::size_t n = 0; n < coarse_steps; ++n) {
        stepper.coarse_step(&path.fine.values);
        path.coarse.values.push_back(stepper.coarse_state());
    }
    return path;
}

TimeSeries propagate_single(double x0, const OuParams& params, const LevelGrid& grid,
                            const TimeSpan& span, const StreamKey& key,
                            DiffusionConvention convention) {
    OuStepper stepper(x0, params, grid.step, key, convention);
    const std::size_t steps = aligned_step_count(span, grid.step);
    TimeSeries series{span.start, grid.step, {}};
    series.values.reserve(steps + 1);
    series.values.push_back(x0);
    for (std::size_t n = 0; n < steps; ++n) {
        stepper.advance(1);
        series.values.push_back(stepper.state());
    }
    return series;
}

}  // namespace mlpit
