#include "mlpit/error.hpp"

namespace mlpit {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::invalid_step: return "invalid-step";
        case ErrorCode::grid_alignment: return "grid-alignment";
        case ErrorCode::empty_ensemble: return "empty-ensemble";
        case ErrorCode::empty_input: return "empty-input";
        case ErrorCode::structure: return "structure";
        case ErrorCode::insufficient_samples: return "insufficient-samples";
        case ErrorCode::invalid_tolerance: return "invalid-tolerance";
        case ErrorCode::tolerance_not_met: return "tolerance-not-met";
        case ErrorCode::budget_too_small: return "budget-too-small";
        case ErrorCode::domain: return "domain";
        case ErrorCode::parse: return "parse";
        case ErrorCode::config: return "config";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

}  // namespace mlpit
