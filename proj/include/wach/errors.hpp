#pragma once

#include <stdexcept>
#include <string>

namespace wach {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DivisionByZero : Error {
    explicit DivisionByZero(const std::string& msg) : Error(msg) {}
};

// Raised when a computation runs out of significant p-adic digits, or when a
// valuation drops below the configured floor.
struct PrecisionExhausted : Error {
    explicit PrecisionExhausted(const std::string& msg) : Error(msg) {}
};

struct NotDivisible : Error {
    explicit NotDivisible(const std::string& msg) : Error(msg) {}
};

struct NotInKernelPsi : Error {
    explicit NotInKernelPsi(const std::string& msg) : Error(msg) {}
};

struct LevelTooLarge : Error {
    explicit LevelTooLarge(const std::string& msg) : Error(msg) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

struct UnsupportedFamily : Error {
    explicit UnsupportedFamily(const std::string& msg) : Error(msg) {}
};

struct ShapeViolation : Error {
    explicit ShapeViolation(const std::string& msg) : Error(msg) {}
};

// Internal errors: a linear solve or reduction step that the underlying
// theory guarantees cannot fail did fail, which indicates a bug or a
// precision budget that is far too small.
struct SolveFailed : Error {
    explicit SolveFailed(const std::string& msg) : Error(msg) {}
};

struct AllZero : Error {
    explicit AllZero(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace wach
