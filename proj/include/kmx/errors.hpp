#pragma once

#include <stdexcept>
#include <string>

namespace kmx {

/// Invalid user-facing configuration (bad ranges, missing keys, unparsable files).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller broke an operation's precondition (grid mismatch, non-unit sphere node, ...).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// A configured resource cap would be exceeded (kernel matrix size, memory).
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical abort: blow-up, non-finite values, or a time step beyond the stability cap.
class StabilityError : public std::runtime_error {
public:
    explicit StabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A diagnostic could not be produced (degenerate fit, empty data).
class DiagnosticError : public std::runtime_error {
public:
    explicit DiagnosticError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace kmx
