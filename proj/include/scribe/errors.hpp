#pragma once

#include <stdexcept>
#include <string>

namespace scribe {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownCounter : Error { using Error::Error; };
struct MalformedUrl : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct MissingVariable : Error { using Error::Error; };
struct UnparseableVerdict : Error { using Error::Error; };
struct NoLiteralFound : Error { using Error::Error; };
struct EndpointUnavailable : Error { using Error::Error; };
struct AuthFailure : Error { using Error::Error; };
struct JudgeUnavailable : Error { using Error::Error; };
struct InterpreterNotConfigured : Error { using Error::Error; };
struct SpawnFailure : Error { using Error::Error; };
struct MissingTriples : Error { using Error::Error; };
struct MissingRun : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace scribe
