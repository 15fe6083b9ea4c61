#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nnbisim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector or matrix dimensions do not fit together.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A caller-supplied argument is outside its valid range.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// One of the merge preconditions (equal input dims, equal output dims,
/// depth ordering) does not hold. `clause()` names the failed one.
class MergePreconditionError : public Error {
public:
    MergePreconditionError(std::string clause, const std::string& what)
        : Error("merge precondition '" + clause + "' violated: " + what), clause_(std::move(clause)) {}

    const std::string& clause() const noexcept { return clause_; }

private:
    std::string clause_;
};

/// Network shapes the merger refuses to handle (fewer than two layers in the
/// smaller network).
class UnsupportedShapeError : public Error {
public:
    using Error::Error;
};

/// A configured budget (cell count, star count) would be exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// The simplex routine hit a pivot too small to trust or failed to terminate.
class DegenerateLpError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. `location()` is a line number ("line 4") or a field
/// path ("unsafe[0][1].a").
class ParseError : public Error {
public:
    ParseError(std::string location, const std::string& what)
        : Error(location + ": " + what), location_(std::move(location)) {}

    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

} // namespace nnbisim
