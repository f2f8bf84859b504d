#pragma once

#include <stdexcept>
#include <string>

namespace tracegym {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : Error {
    using Error::Error;
};
struct HermitianityError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct NumericalError : Error {
    using Error::Error;
};
struct DegenerateSpectrumError : Error {
    using Error::Error;
};
struct ConvergenceError : Error {
    using Error::Error;
};
struct ResourceError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

} // namespace tracegym
