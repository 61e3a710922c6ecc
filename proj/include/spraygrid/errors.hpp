#pragma once

#include <stdexcept>
#include <string>

namespace spraygrid {

enum class ErrorKind {
    Io,          // missing or unreadable files
    Schema,      // malformed JSON/CSV/container contents
    Parameter,   // bad argument values (non-integer ratio, block size, ...)
    Validation,  // data violates a contract (non-binary mask, target out of range)
    Alignment,   // CRS or grid mismatch, insufficient overlap
    Infeasible,  // unreachable coverage target, impossible generation request
    Solver,      // numerical failure (rank-deficient normal equations)
    Integrity,   // declared metrics disagree with recomputation
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace spraygrid
