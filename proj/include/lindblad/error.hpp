#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lindblad {

enum class ErrorKind {
    invalid_dimension,
    invalid_parameter,
    dimension_mismatch,
    capacity,
    unsupported_structure,
    non_orthogonal_basis,
    non_convergence,
    classification_failure,
    degenerate_steady_state,
    singular_denominator,
    insufficient_data,
    index_out_of_range,
    invariant_violation,
};

constexpr std::string_view to_string(ErrorKind k) noexcept {
    switch (k) {
        case ErrorKind::invalid_dimension: return "invalid-dimension";
        case ErrorKind::invalid_parameter: return "invalid-parameter";
        case ErrorKind::dimension_mismatch: return "dimension-mismatch";
        case ErrorKind::capacity: return "capacity";
        case ErrorKind::unsupported_structure: return "unsupported-structure";
        case ErrorKind::non_orthogonal_basis: return "non-orthogonal-basis";
        case ErrorKind::non_convergence: return "non-convergence";
        case ErrorKind::classification_failure: return "classification-failure";
        case ErrorKind::degenerate_steady_state: return "degenerate-steady-state";
        case ErrorKind::singular_denominator: return "singular-denominator";
        case ErrorKind::insufficient_data: return "insufficient-data";
        case ErrorKind::index_out_of_range: return "index-out-of-range";
        case ErrorKind::invariant_violation: return "invariant-violation";
    }
    return "unknown";
}

/// Single exception type for the library; `kind()` distinguishes the
/// failure class so callers (the CLI in particular) can map it to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace lindblad
