#pragma once

#include <stdexcept>
#include <string>

namespace orient {

// Invalid option values, contradictory settings, bad profiles.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Unusable input data: unreadable files, schema violations, empty corpora.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerically degenerate state (zero vectors, empty projections).
struct DegenerateError : std::runtime_error {
    explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace orient
