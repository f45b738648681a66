#pragma once

#include <stdexcept>
#include <string>

namespace atomlaser {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A physical or numerical parameter outside its valid domain
// (negative mass, detuning without a resonance, mu < 0, ...).
struct InvalidParameter : Error {
    using Error::Error;
};

// An algorithm failed to produce a result (no sign change in a root
// bracket, NaN during propagation, iteration cap reached).
struct NumericalFailure : Error {
    using Error::Error;
};

// Config file could not be parsed or validated.
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem-level failure while writing or reading run artifacts.
struct IoError : Error {
    using Error::Error;
};

} // namespace atomlaser
