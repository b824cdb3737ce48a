#include "qgauss/error.hpp"

namespace qgauss {

const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::degenerate_state: return "degenerate-state";
        case ErrorKind::missing_phase: return "missing-phase";
        case ErrorKind::grid_mismatch: return "grid-mismatch";
        case ErrorKind::stability_violation: return "stability-violation";
        case ErrorKind::blow_up: return "blow-up";
        case ErrorKind::caustic: return "caustic";
        case ErrorKind::linear_solve: return "linear-solve";
        case ErrorKind::too_few_samples: return "too-few-samples";
        case ErrorKind::degenerate_metric: return "degenerate-metric";
        case ErrorKind::parse_error: return "parse-error";
        case ErrorKind::validation_error: return "validation-error";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

}  // namespace qgauss
