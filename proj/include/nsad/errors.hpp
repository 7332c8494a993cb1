#pragma once

#include <stdexcept>
#include <string>

namespace nsad {

// Error taxonomy maps onto CLI exit codes: config/usage -> 1,
// data -> 2, numeric -> 3.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape/rank violations in tensor code. These are programming errors in
// library use, but config files can trigger them too, so they carry text.
struct ShapeError : std::invalid_argument {
    explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

} // namespace nsad
