#pragma once

#include <stdexcept>
#include <string>

namespace pcorr {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad triple, ring mismatch, parse error).
struct InputError : Error {
    using Error::Error;
};

/// A numerical procedure failed (root solve, non-integrable integrand).
struct NumericalError : Error {
    using Error::Error;
};

/// A search or certificate could not reach a definitive verdict.
struct InconclusiveError : Error {
    using Error::Error;
};

/// The residual of a chart is neither nonvanishing nor normal crossing.
struct NeedsBlowupError : InconclusiveError {
    using InconclusiveError::InconclusiveError;
};

} // namespace pcorr
