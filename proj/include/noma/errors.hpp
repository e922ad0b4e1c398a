#pragma once

#include <stdexcept>
#include <string>

namespace noma {

/// Invalid argument or malformed input document.
struct ValidationError : std::invalid_argument {
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// File could not be read or written; message carries the path.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// A solver hit its iteration cap before meeting the tolerance.
struct NotConvergedError : std::runtime_error {
    explicit NotConvergedError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace noma
