#pragma once

#include <stdexcept>
#include <string>

namespace eulershape {

/// Bad inputs, violated preconditions, malformed data. CLI maps this to exit 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / parsing failures. CLI maps this to exit 2.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace eulershape
