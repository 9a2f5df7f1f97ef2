#pragma once

#include <stdexcept>
#include <string>

namespace kurastab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: config values, preconditions on arguments.
class ValidationError : public Error {
public:
    using Error::Error;
};

class UnsupportedKind : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class MismatchedGrid : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A numerical computation could not produce a trustworthy answer.
class NumericError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

/// A root sits on (or too close to) the imaginary axis.
class InconclusiveError : public NumericError {
public:
    using NumericError::NumericError;
};

class BlowUpError : public NumericError {
public:
    using NumericError::NumericError;
};

class SingularIntegrandError : public NumericError {
public:
    using NumericError::NumericError;
};

class InsufficientDecayError : public NumericError {
public:
    using NumericError::NumericError;
};

class NotFoundError : public NumericError {
public:
    using NumericError::NumericError;
};

class OverflowError : public NumericError {
public:
    using NumericError::NumericError;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace kurastab
