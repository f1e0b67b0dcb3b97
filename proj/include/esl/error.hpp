#pragma once

#include <stdexcept>
#include <string>

namespace esl {

/// Bad arguments or inconsistent dimensions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// CSV or other text input that could not be parsed. Message carries row/column.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model file that is well-formed JSON but violates the model schema.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No initial simplicial with SSE < n could be found (usually unnormalized data).
class InitializationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace esl
