#pragma once

#include <stdexcept>
#include <string>

namespace resonance {

enum class ErrorCode {
    InvalidArgument = 1,  // rejected input: shape, range, precondition
    NotConverged = 2,     // iterative routine hit its cap
    Diverged = 3,         // non-finite state during integration
    Io = 4,               // filesystem / parse failures
};

// Single exception type for the core; the C layer maps `code()` onto status values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace resonance
