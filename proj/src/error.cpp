#include "smkl/error.hpp"

namespace smkl {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::validation: return "validation";
        case ErrorKind::io: return "io";
        case ErrorKind::parse: return "parse";
        case ErrorKind::degenerate_kernel: return "degenerate_kernel";
        case ErrorKind::psd_violation: return "psd_violation";
        case ErrorKind::not_converged: return "not_converged";
        case ErrorKind::domain: return "domain";
        case ErrorKind::precondition: return "precondition";
        case ErrorKind::enumeration_infeasible: return "enumeration_infeasible";
        case ErrorKind::probe_failed: return "probe_failed";
        case ErrorKind::harness: return "harness";
        case ErrorKind::insufficient_data: return "insufficient_data";
    }
    return "unknown";
}

}  // namespace smkl
