#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smkl {

enum class ErrorKind {
    validation,
    io,
    parse,
    degenerate_kernel,
    psd_violation,
    not_converged,
    domain,
    precondition,
    enumeration_infeasible,
    probe_failed,
    harness,
    insufficient_data,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind is
/// stable and machine readable; the CLI serializes it into the report.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

}  // namespace smkl
