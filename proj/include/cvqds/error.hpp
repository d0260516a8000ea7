#pragma once

#include <stdexcept>
#include <string>

namespace cvqds {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed a value outside an operation's domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A density matrix failed its Hermiticity, trace or positivity checks.
class InvalidState : public Error {
public:
    using Error::Error;
};

/// Eigensolver or quadrature did not reach the requested accuracy.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Fock-space truncation lost more norm than allowed.
class TruncationError : public NumericError {
public:
    TruncationError(const std::string& what, int suggested_dim)
        : NumericError(what), suggested_dim_(suggested_dim) {}

    int suggested_dim() const noexcept { return suggested_dim_; }

private:
    int suggested_dim_;
};

/// The security gap p_e - p_err is not positive.
class NoSecurity : public Error {
public:
    using Error::Error;
};

/// A Hoeffding-type bound was requested outside the ordering it needs.
class BoundInapplicable : public Error {
public:
    using Error::Error;
};

/// Signature declaration and eliminated signature do not line up.
class MalformedDeclaration : public Error {
public:
    using Error::Error;
};

/// Configuration text or command-line values that cannot be used.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace cvqds
