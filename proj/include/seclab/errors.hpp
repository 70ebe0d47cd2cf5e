#pragma once

#include <stdexcept>
#include <string>

namespace seclab {

/// Input violates a documented precondition (bad pmf, mismatched sizes, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An enumeration or complexity guard was exceeded.
class SizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Encoding requested for a product subcodebook with no preselected pair.
class EncodingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every Monte Carlo draw was unusable (e.g. all preselections failed).
class DegenerateInputError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace seclab
