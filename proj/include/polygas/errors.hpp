#pragma once

#include <stdexcept>
#include <string>

namespace polygas {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: duplicate or unknown ids, malformed supports, wrong universe kind.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A partition function used as a normalizer vanished.
class NormalizationFailure : public Error {
public:
    using Error::Error;
};

/// Xi evaluated at negative radii was not strictly positive: the radii lie
/// outside the convergence region for the region at hand.
class DivergenceIndicator : public Error {
public:
    using Error::Error;
};

/// An enumeration or domain exceeded a configured cap.
class ResourceLimit : public Error {
public:
    using Error::Error;
};

/// The starting family of a KS iteration does not satisfy its criterion.
class PrecheckFailure : public Error {
public:
    PrecheckFailure(const std::string& element, const std::string& what)
        : Error(what), element_(element) {}

    const std::string& element() const noexcept { return element_; }

private:
    std::string element_;
};

/// Model file problems (syntax or schema).
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace polygas
