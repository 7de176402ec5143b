#pragma once

#include <stdexcept>
#include <string>

namespace cgw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Exact-rational path asked for a polynomial degree above its cap.
class DegreeTooLarge : public Error {
public:
    using Error::Error;
};

/// Grid spacing cannot resolve the oscillations of the sampled state.
class ResolutionTooCoarse : public Error {
public:
    using Error::Error;
};

/// Gaussian kernel narrower than four grid cells.
class KernelUnderresolved : public Error {
public:
    using Error::Error;
};

/// A negativity column has its maximum on the first or last index.
class NoInteriorMaximum : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace cgw
