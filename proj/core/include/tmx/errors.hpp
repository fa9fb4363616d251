#pragma once

#include <stdexcept>
#include <string>

namespace tmx {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid mesh data (bad indices, degenerate triangles, non-manifold edges).
struct ValidationError : Error {
    using Error::Error;
};

/// Malformed input file; carries the 1-based line number where parsing failed.
struct ParseError : Error {
    ParseError(const std::string& msg, long line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
    long line;
};

/// Argument outside an operation's domain (boundary source vertex, eps >= 1/e, ...).
struct DomainError : Error {
    using Error::Error;
};

/// Usage error from the CLI layer; maps to exit code 2.
struct UsageError : Error {
    using Error::Error;
};

}  // namespace tmx
