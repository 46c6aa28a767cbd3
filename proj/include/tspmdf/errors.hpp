#pragma once

#include <stdexcept>
#include <string>

namespace tspmdf {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text (instance files, reports, checkpoints headers).
struct ParseError : Error {
    using Error::Error;
};

// Structurally inconsistent arguments: size mismatches, tours that do not
// belong to the instance, incompatible model/config combinations.
struct StructuralError : Error {
    using Error::Error;
};

// A numeric argument lies outside its documented domain.
struct DomainError : Error {
    using Error::Error;
};

// Filesystem or binary-container failures.
struct IoError : Error {
    using Error::Error;
};

// An API was driven in an unsupported order (e.g. backward without a
// training-mode tape).
struct UsageError : Error {
    using Error::Error;
};

// An intermediate value became NaN or infinite.
struct NumericalError : Error {
    using Error::Error;
};

}  // namespace tspmdf
