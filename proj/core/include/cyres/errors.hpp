#pragma once

#include <stdexcept>
#include <string>

namespace cyres {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Attempt to schedule an event in the past.
class PastEventError : public Error {
public:
    using Error::Error;
};

/// Structurally impossible configuration (e.g. more variants than vehicles).
class BadConfigError : public Error {
public:
    using Error::Error;
};

class UnknownVehicleError : public Error {
public:
    using Error::Error;
};

/// Performance value inconsistent with the vehicle state invariant.
class InconsistentPerfError : public Error {
public:
    using Error::Error;
};

/// Seeding target whose variant is outside the threat's susceptibility set.
class NotSusceptibleError : public Error {
public:
    using Error::Error;
};

class NoCandidatesError : public Error {
public:
    using Error::Error;
};

/// Trace never leaves P = 1, so there is no event to segment.
class NoEventError : public Error {
public:
    using Error::Error;
};

/// Malformed input bytes (not UTF-8 JSON, syntax error).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates the scenario schema.
class ValidationError : public Error {
public:
    ValidationError(std::string path, std::string reason)
        : Error(path + ": " + reason), path_(std::move(path)), reason_(std::move(reason)) {}

    const std::string& path() const { return path_; }
    const std::string& reason() const { return reason_; }

private:
    std::string path_;
    std::string reason_;
};

class BadSweepSpecError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace cyres
