#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vatom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain (non-finite amplitude, cutoff < m, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A closed-form expression was asked to leave its real domain, e.g. an
/// arccos argument well outside [-1, 1].
class NumericDomainError : public Error {
public:
    using Error::Error;
};

/// Characteristic roots too close together for the partial-fraction weights.
class DegenerateModes : public Error {
public:
    using Error::Error;
};

/// Sector without coupling: evolution is a pure phase.
class DecoupledSector : public Error {
public:
    using Error::Error;
};

class ResourceError : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Density matrix with a clearly negative eigenvalue.
class PositivityViolation : public Error {
public:
    using Error::Error;
};

class UndefinedQuantity : public Error {
public:
    using Error::Error;
};

/// Fixed-step integration drifted or failed its step-halving check.
class StepSizeError : public Error {
public:
    using Error::Error;
};

/// Malformed series file.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line, std::size_t offset)
        : Error(what + " (line " + std::to_string(line) + ", offset " + std::to_string(offset) + ")"),
          line_(line),
          offset_(offset) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t line_;
    std::size_t offset_;
};

/// Invalid experiment configuration; `path()` names the offending field, e.g. "/time/dt".
class ConfigError : public Error {
public:
    ConfigError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace vatom
