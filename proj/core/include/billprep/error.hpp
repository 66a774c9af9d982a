#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace billprep {

struct Error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Malformed input text (mapping file, path string, CSV, config).
struct ParseError : Error
{
    ParseError(const std::string& msg, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + msg : msg)
        , line(line)
    {
    }

    std::size_t line;
};

// Well-formed input that breaks a declared invariant.
struct ValidationError : Error
{
    using Error::Error;
};

// Internal consistency failure between pipeline stages.
struct IntegrityError : Error
{
    using Error::Error;
};

struct IoError : Error
{
    using Error::Error;
};

}  // namespace billprep
