#pragma once

#include <stdexcept>
#include <string>

namespace pursuit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario document does not match the schema. `key()` names the offending path.
class ParseError : public Error {
public:
    ParseError(std::string key, const std::string& what)
        : Error("parse error at '" + key + "': " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Scenario parsed but breaks an invariant. `rule()` names the rule.
class ValidationError : public Error {
public:
    ValidationError(std::string rule, const std::string& what)
        : Error("validation error [" + rule + "]: " + what), rule_(std::move(rule)) {}
    const std::string& rule() const noexcept { return rule_; }

private:
    std::string rule_;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class DegenerateMapError : public Error {
public:
    using Error::Error;
};

class MissingTargetError : public Error {
public:
    using Error::Error;
};

/// Non-finite loss or parameters during training.
class DivergenceError : public Error {
public:
    using Error::Error;
};

class CheckpointError : public Error {
public:
    enum class Kind { Missing, Corrupt, Version, RosterMismatch, ShapeMismatch };

    CheckpointError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace pursuit
