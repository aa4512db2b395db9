#ifndef HOWIRE_ERROR_HPP
#define HOWIRE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace howire {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A data structure violates one of its invariants (bad indices, inconsistent labels...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Geometric precondition failed: point behind the camera, degenerate direction, bad depth.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A candidate view was rejected while assembling a sample.
class RejectedView : public Error {
public:
    using Error::Error;
};

/// Malformed or incompatible file content.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure (unwritable directory, missing file).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace howire

#endif
