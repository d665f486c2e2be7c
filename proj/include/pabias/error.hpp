#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pabias {

enum class ErrorCode {
    InvalidSpec,
    NonPositiveIdq,
    InvalidBias,
    InvalidParams,
    OutOfRangeAlpha,
    LengthMismatch,
    TonesUnresolvable,
    NoCompression,
    TargetUnreachable,
    UnknownBand,
    SetpointUnreachable,
    WindowTooShort,
    Diverged,
    BadLength,
    BadDlc,
    UnknownId,
    UnknownRegister,
    ParseError,
    IoError,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every module reports failures through this exception; `code()` carries the
/// failure kind so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace pabias
