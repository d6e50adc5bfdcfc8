#include "stegokey/errors.hpp"

namespace stegokey {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::UnknownUser: return "UnknownUser";
    case ErrorCode::NotAncestor: return "NotAncestor";
    case ErrorCode::MTooSmall: return "MTooSmall";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::ZeroUserId: return "ZeroUserId";
    case ErrorCode::NameTooLong: return "NameTooLong";
    case ErrorCode::BodyTooLarge: return "BodyTooLarge";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadChecksum: return "BadChecksum";
    case ErrorCode::TruncatedEnvelope: return "TruncatedEnvelope";
    case ErrorCode::NotRiff: return "NotRiff";
    case ErrorCode::NotWave: return "NotWave";
    case ErrorCode::MissingFmt: return "MissingFmt";
    case ErrorCode::MissingData: return "MissingData";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::CoverTooSmall: return "CoverTooSmall";
    case ErrorCode::BadBitPosition: return "BadBitPosition";
    case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::ConnectionFailed: return "ConnectionFailed";
    case ErrorCode::FrameTooLarge: return "FrameTooLarge";
    case ErrorCode::TruncatedFrame: return "TruncatedFrame";
    case ErrorCode::AccessDenied: return "AccessDenied";
    case ErrorCode::NotSameClass: return "NotSameClass";
    case ErrorCode::IoError: return "IoError";
    }
    return "Error";
}

} // namespace stegokey
