#pragma once

#include <stdexcept>
#include <string>

namespace orca {

// Invalid argument to a physics routine (negative temperature, bad quantum numbers).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent configuration/data file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InstabilityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class OutOfRangeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Estimator with a zero denominator.
class UndefinedResultError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace orca
