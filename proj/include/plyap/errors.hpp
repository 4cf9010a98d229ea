#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace plyap {

enum class ErrorKind {
    contract,
    invalid_state,
    domain,
    saturation,
    insufficient_data,
    degenerate_path,
    data,
    numerical,
    config,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Two operands do not share a basis, dimension or geometry.
class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error(ErrorKind::contract, what) {}
};

/// Zero, negative or non-finite norm; malformed state.
class InvalidStateError : public Error {
public:
    explicit InvalidStateError(const std::string& what) : Error(ErrorKind::invalid_state, what) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

class SaturationError : public Error {
public:
    SaturationError(const std::string& what, std::optional<double> saturation_time)
        : Error(ErrorKind::saturation, what), saturation_time_(saturation_time) {}
    std::optional<double> saturation_time() const noexcept { return saturation_time_; }

private:
    std::optional<double> saturation_time_;
};

class InsufficientDataError : public Error {
public:
    explicit InsufficientDataError(const std::string& what)
        : Error(ErrorKind::insufficient_data, what) {}
};

/// The divergence function does not move along the path (stationary ray).
class DegeneratePathError : public Error {
public:
    explicit DegeneratePathError(const std::string& what) : Error(ErrorKind::degenerate_path, what) {}
};

/// Malformed external data. `row` is the 1-based line number in the source file
/// when known, otherwise the 0-based sample index.
class DataError : public Error {
public:
    DataError(const std::string& what, std::optional<std::size_t> row = std::nullopt)
        : Error(ErrorKind::data, what), row_(row) {}
    std::optional<std::size_t> row() const noexcept { return row_; }

private:
    std::optional<std::size_t> row_;
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : Error(ErrorKind::config, "config field '" + field + "': " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Process exit code for the CLI: 2 config, 3 data, 4 numerical.
inline int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config:
        case ErrorKind::contract:
        case ErrorKind::domain:
        case ErrorKind::invalid_state:
            return 2;
        case ErrorKind::data:
            return 3;
        case ErrorKind::numerical:
        case ErrorKind::saturation:
        case ErrorKind::insufficient_data:
        case ErrorKind::degenerate_path:
            return 4;
    }
    return 4;
}

}  // namespace plyap
