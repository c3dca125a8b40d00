#pragma once

#include <stdexcept>
#include <string>

namespace pairloc {

struct InvalidParameter : std::invalid_argument {
    explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct LengthMismatch : std::invalid_argument {
    explicit LengthMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when a landmark pair (or a catalog mapping) collapses to a single
// point and the retry budget is exhausted.
struct DegeneratePair : std::runtime_error {
    explicit DegeneratePair(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pairloc
