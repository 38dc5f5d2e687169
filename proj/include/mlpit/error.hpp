#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mlpit {

enum class ErrorCode {
    invalid_argument,
    invalid_step,
    grid_alignment,
    empty_ensemble,
    empty_input,
    structure,
    insufficient_samples,
    invalid_tolerance,
    tolerance_not_met,
    budget_too_small,
    domain,
    parse,
    config,
    io,
};

const char* to_string(ErrorCode code) noexcept;

/// Library-wide exception. Parse errors carry the offending row, config errors
/// the offending field.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> row,
          std::string field = {})
        : std::runtime_error(message), code_(code), row_(row), field_(std::move(field)) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> row() const noexcept { return row_; }
    const std::string& field() const noexcept { return field_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> row_;
    std::string field_;
};

}  // namespace mlpit
