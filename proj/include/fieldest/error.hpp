#pragma once

#include <stdexcept>
#include <string>

namespace fieldest {

/// Coarse classification used by the CLI to map failures to exit codes.
enum class ErrorKind {
    InvalidArgument,   ///< malformed input, dimension or size mismatch
    SingularEvaluation,
    RankDeficient,
    SizeCap,
    Schema,            ///< scenario file violates the schema
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace fieldest
