#pragma once

#include <stdexcept>
#include <string>

namespace prunekit {

/// Input or argument violates a documented invariant. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written. Maps to CLI exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss or activation.
class DivergenceError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace prunekit
