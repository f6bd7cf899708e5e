#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgc {

// Base of every error raised by the library. The CLI maps subclasses to
// exit codes: ValidationError -> 1, NumericalError -> 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class StructuralError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidModeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ParameterError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnsupportedNormError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidExponentError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class RegimeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class PreconditionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& what, std::vector<std::string> items)
        : ValidationError(what), items_(std::move(items)) {}
    explicit ConfigError(const std::string& what) : ValidationError(what) {}
    const std::vector<std::string>& items() const { return items_; }

private:
    std::vector<std::string> items_;
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class BlowupError : public NumericalError {
public:
    BlowupError(const std::string& what, std::size_t step)
        : NumericalError(what + " (step " + std::to_string(step) + ")"), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

class DealiasingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace kgc
