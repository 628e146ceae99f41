#ifndef UALG_ERROR_HPP
#define UALG_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ualg {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad table, out-of-range element, bad partition, ...
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Two algebras that must share a signature do not.
class SignatureMismatch : public Error {
public:
    using Error::Error;
};

/// A configured size guard refused to run a computation.
class CapExceeded : public Error {
public:
    CapExceeded(const std::string& what, std::size_t cap)
        : Error(what + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}

    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

} // namespace ualg

#endif
