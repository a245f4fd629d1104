#pragma once

#include <stdexcept>
#include <string>

namespace arspi {

// Base class for all library errors. The CLI maps these to exit code 1,
// except IoError and ParseError which map to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid argument to a density, quantile, or sampling routine.
struct DomainError : Error {
    using Error::Error;
};

// CSV ingestion failure. `row` is the 1-based line number, counting the
// header as row 1.
struct ParseError : Error {
    enum class Kind { MalformedRow, NegativeValue, CalendarGap, EmptyFile };

    ParseError(Kind kind, long row, const std::string& message)
        : Error("row " + std::to_string(row) + ": " + message), kind(kind), row(row) {}

    Kind kind;
    long row;
};

struct WindowTooLong : Error {
    using Error::Error;
};

struct DegenerateSeries : Error {
    using Error::Error;
};

struct AllDry : Error {
    using Error::Error;
};

struct DegenerateWet : Error {
    using Error::Error;
};

struct NonFiniteLikelihood : Error {
    using Error::Error;
};

struct InsufficientChains : Error {
    using Error::Error;
};

struct EmptyPosterior : Error {
    using Error::Error;
};

struct IndexOutOfRange : Error {
    using Error::Error;
};

struct AlignmentError : Error {
    using Error::Error;
};

struct NonFinite : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ChecksumMismatch : Error {
    using Error::Error;
};

// Filesystem / input-file problems; exit code 2 in the CLI.
struct IoError : Error {
    using Error::Error;
};

}  // namespace arspi
