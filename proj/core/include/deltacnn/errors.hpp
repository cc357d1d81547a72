#pragma once

#include <stdexcept>
#include <string>

namespace deltacnn {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Zero/overflowing dimensions or mismatched shapes between operands.
class ShapeError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

// Window/stride/padding combinations that produce an empty output.
class GeometryError : public Error {
public:
    using Error::Error;
};

// Malformed or truncated files (PGM, FSEQ, NNW1, model spec).
class FormatError : public Error {
public:
    using Error::Error;
};

// Invalid policies, specs or engine state divergence.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace deltacnn
