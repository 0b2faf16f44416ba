#pragma once

#include <stdexcept>
#include <string>

namespace extsumm {

// Base for all data-level failures. The CLI maps these to exit code 2;
// usage/flag problems are handled before any of these can be thrown.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedRecord : Error {
    using Error::Error;
};

struct EmptyDocument : Error {
    using Error::Error;
};

struct InvalidN : Error {
    using Error::Error;
};

struct TooLarge : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct LabelOutOfRange : Error {
    using Error::Error;
};

struct AlphaOutOfRange : Error {
    using Error::Error;
};

struct VocabOverflow : Error {
    using Error::Error;
};

struct MissingLabels : Error {
    using Error::Error;
};

struct EmptyValidationSet : Error {
    using Error::Error;
};

struct NoCheckpoints : Error {
    using Error::Error;
};

struct DocMismatch : Error {
    using Error::Error;
};

struct TooFewDocs : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace extsumm
