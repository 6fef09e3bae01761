#include "dawkit/errors.hpp"

namespace dawkit {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateName: return "DuplicateName";
        case ErrorCode::UnknownInput: return "UnknownInput";
        case ErrorCode::UnknownNode: return "UnknownNode";
        case ErrorCode::UnknownKind: return "UnknownKind";
        case ErrorCode::ArityMismatch: return "ArityMismatch";
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::UnknownParameter: return "UnknownParameter";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::InvalidDuration: return "InvalidDuration";
        case ErrorCode::NoInputs: return "NoInputs";
        case ErrorCode::RatioOutOfRange: return "RatioOutOfRange";
        case ErrorCode::BadHeader: return "BadHeader";
        case ErrorCode::TruncatedChunk: return "TruncatedChunk";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::NotRiff: return "NotRiff";
        case ErrorCode::MissingChunk: return "MissingChunk";
        case ErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::EmptyRole: return "EmptyRole";
        case ErrorCode::MissingMetadata: return "MissingMetadata";
        case ErrorCode::IoError: return "IoError";
    }
    return "Error";
}

} // namespace dawkit
