#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace learnrk {

/// Base class for all library errors. Carries a stable machine-readable
/// code (e.g. "pole", "unknown_method") that the CLI maps to stderr JSON.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& message) : Error("parse_error", message) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& message) : Error("dimension_mismatch", message) {}
};

class NonFiniteError : public Error {
public:
    explicit NonFiniteError(const std::string& message) : Error("nonfinite_entry", message) {}
};

class UnknownMethodError : public Error {
public:
    explicit UnknownMethodError(const std::string& message) : Error("unknown_method", message) {}
};

class PoleError : public Error {
public:
    explicit PoleError(const std::string& message) : Error("pole", message) {}
};

class NoRootsError : public Error {
public:
    explicit NoRootsError(const std::string& message) : Error("no_roots", message) {}
};

/// Simultaneous iteration ran out of its iteration budget. Carries the best
/// iterate so callers can inspect how far the solve got.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& message, std::vector<std::complex<double>> best_iterate)
        : Error("convergence", message), best_iterate_(std::move(best_iterate)) {}

    const std::vector<std::complex<double>>& best_iterate() const noexcept { return best_iterate_; }

private:
    std::vector<std::complex<double>> best_iterate_;
};

class ExpOverflowError : public Error {
public:
    explicit ExpOverflowError(const std::string& message) : Error("exp_overflow", message) {}
};

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& message, int trace_length)
        : Error("divergence", message), trace_length_(trace_length) {}

    int trace_length() const noexcept { return trace_length_; }

private:
    int trace_length_ = 0;
};

class InvalidArgumentError : public Error {
public:
    explicit InvalidArgumentError(const std::string& message) : Error("invalid_argument", message) {}
};

}  // namespace learnrk
