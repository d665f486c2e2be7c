#include "pabias/error.hpp"

namespace pabias {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::NonPositiveIdq: return "NonPositiveIdq";
        case ErrorCode::InvalidBias: return "InvalidBias";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::OutOfRangeAlpha: return "OutOfRangeAlpha";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::TonesUnresolvable: return "TonesUnresolvable";
        case ErrorCode::NoCompression: return "NoCompression";
        case ErrorCode::TargetUnreachable: return "TargetUnreachable";
        case ErrorCode::UnknownBand: return "UnknownBand";
        case ErrorCode::SetpointUnreachable: return "SetpointUnreachable";
        case ErrorCode::WindowTooShort: return "WindowTooShort";
        case ErrorCode::Diverged: return "Diverged";
        case ErrorCode::BadLength: return "BadLength";
        case ErrorCode::BadDlc: return "BadDlc";
        case ErrorCode::UnknownId: return "UnknownId";
        case ErrorCode::UnknownRegister: return "UnknownRegister";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace pabias
