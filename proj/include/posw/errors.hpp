#pragma once

#include <stdexcept>
#include <string>

namespace posw {

/// Bad user input: parameters, configuration, or preconditions on arguments.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input that is well formed but outside what a closed form can handle.
class UnsupportedInput : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Caller violated an interface contract (mismatched grids, broken state constraints).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A computation ran but produced an unusable result (divergence, truncation breach,
/// optimizer failure).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace posw
