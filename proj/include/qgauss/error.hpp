#pragma once

#include <stdexcept>
#include <string>

namespace qgauss {

enum class ErrorKind {
    invalid_argument,
    degenerate_state,
    missing_phase,
    grid_mismatch,
    stability_violation,
    blow_up,
    caustic,
    linear_solve,
    too_few_samples,
    degenerate_metric,
    parse_error,
    validation_error,
    io,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace qgauss
