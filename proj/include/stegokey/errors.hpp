#pragma once

#include <stdexcept>
#include <string>

namespace stegokey {

enum class ErrorCode {
    // hierarchy / keys
    UnknownClass,
    UnknownUser,
    NotAncestor,
    MTooSmall,
    CycleDetected,
    ConfigInvalid,
    IndexOutOfRange,
    WrongArity,
    ZeroUserId,
    // payload envelope
    NameTooLong,
    BodyTooLarge,
    BadMagic,
    BadChecksum,
    TruncatedEnvelope,
    // wav
    NotRiff,
    NotWave,
    MissingFmt,
    MissingData,
    UnsupportedFormat,
    TruncatedFile,
    // stego
    CoverTooSmall,
    BadBitPosition,
    PayloadTooLarge,
    // transport
    ConnectionFailed,
    FrameTooLarge,
    TruncatedFrame,
    AccessDenied,
    NotSameClass,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace stegokey
