#pragma once

#include <stdexcept>
#include <string>

namespace netcontract {

enum class ErrorKind {
    InvalidArgument,
    DimensionMismatch,
    NotMetzler,
    NonIrreducible,
    NotBalancable,
    NoConvergence,
    HypothesisViolated,
    Diverged,
    Parse,
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-checkable category. Numerical failures attach
/// the last residual so callers can decide whether the result is usable.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, double residual = 0.0)
        : std::runtime_error(what), kind_(kind), residual_(residual) {}

    ErrorKind kind() const noexcept { return kind_; }
    double residual() const noexcept { return residual_; }

private:
    ErrorKind kind_;
    double residual_;
};

} // namespace netcontract
