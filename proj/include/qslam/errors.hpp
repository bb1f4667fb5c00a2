#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qslam {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration (partition files, solver parameters).
struct ConfigError : Error {
    using Error::Error;
};

struct ArgumentError : Error {
    using Error::Error;
};

/// Camera collinear with the frame landmarks, coincident points and similar.
struct DegenerateGeometry : Error {
    using Error::Error;
};

struct NoIntersection : Error {
    using Error::Error;
};

struct GenerationError : Error {
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset, std::size_t line = 0)
        : Error(what), offset_(offset), line_(line)
    {
    }
    std::size_t offset() const noexcept { return offset_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t offset_;
    std::size_t line_;
};

} // namespace qslam
