#pragma once

#include <stdexcept>
#include <string>

namespace dawkit {

enum class ErrorCode {
    // engine-graph
    DuplicateName,
    UnknownInput,
    UnknownNode,
    UnknownKind,
    ArityMismatch,
    CycleDetected,
    UnknownParameter,
    OutOfRange,
    InvalidDuration,
    // dsp
    NoInputs,
    RatioOutOfRange,
    // midi
    BadHeader,
    TruncatedChunk,
    UnsupportedFormat,
    // audio files
    NotRiff,
    MissingChunk,
    UnsupportedEncoding,
    // project / CLI
    ParseError,
    ValidationError,
    EmptyRole,
    MissingMetadata,
    IoError,
};

const char* error_code_name(ErrorCode code);

/// Every failure in the library throws this; code() tells callers which
/// contract was violated, what() names the offending identifier.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace dawkit
