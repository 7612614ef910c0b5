// Copyright (c) 2026 The densetrack authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace densetrack {

// Invalid configuration or command-line input. CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or missing data (files, masks, shapes). CLI exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric failure during optimization (NaN/Inf loss). CLI exit code 4.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadError : DataError {
    using DataError::DataError;
};
struct AnnotationError : DataError {
    using DataError::DataError;
};
struct OrderingError : DataError {
    using DataError::DataError;
};
struct RangeError : DataError {
    using DataError::DataError;
};
struct SizeError : DataError {
    using DataError::DataError;
};
struct ShapeError : DataError {
    using DataError::DataError;
};
struct WarpError : DataError {
    using DataError::DataError;
};
struct ParameterError : DataError {
    using DataError::DataError;
};
struct SessionError : DataError {
    using DataError::DataError;
};
struct CoverageError : DataError {
    using DataError::DataError;
};

}  // namespace densetrack
