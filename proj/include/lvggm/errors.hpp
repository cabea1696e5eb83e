#pragma once

#include <stdexcept>
#include <string>

namespace lvggm {

/// Error categories; mirrored one-to-one by the C API status codes.
enum class ErrorKind {
    Invalid,    // malformed argument or config
    Dimension,  // shape mismatch between operands
    Domain,     // precondition on values violated (e.g. non-PD input)
    Capacity,   // combinatorial or retry budget exceeded
    Numeric,    // non-finite values, factorization failure, degeneracy
    Io,         // file read/write or parse failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

inline void require(bool ok, ErrorKind kind, const std::string& msg) {
    if (!ok) fail(kind, msg);
}

} // namespace lvggm
