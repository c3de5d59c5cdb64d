#pragma once

#include <stdexcept>
#include <string>

#include "impactlab/types.hpp"

namespace impactlab {

/// Bad command-line usage or inconsistent parameters (CLI exit code 1).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data that fails hard validation (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerically degenerate input: singular designs, zero variance, undefined mid (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UndefinedMidError : public NumericalError {
public:
    UndefinedMidError() : NumericalError("mid price undefined: book side empty") {}
};

class InsufficientDepthError : public NumericalError {
public:
    InsufficientDepthError(Shares requested, Shares attainable)
        : NumericalError("insufficient depth: requested " + std::to_string(requested) +
                         " shares, opposite side holds " + std::to_string(attainable)),
          requested_(requested),
          attainable_(attainable) {}

    Shares requested() const { return requested_; }
    Shares attainable() const { return attainable_; }

private:
    Shares requested_;
    Shares attainable_;
};

class SingularDesignError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace impactlab
