#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace reviewlens {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration value or document violates its declared contract.
/// The CLI maps this to exit status 1.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message)
        : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Input data is missing, malformed, or cannot be processed.
/// The CLI maps this to exit status 2.
class DataError : public Error {
public:
    using Error::Error;
};

/// An embedding provider produced an unusable vector (zero norm, NaN) or
/// could not answer a lookup.
class EmbeddingError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace reviewlens
