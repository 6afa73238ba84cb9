#pragma once

#include <stdexcept>
#include <string>

namespace pairsim {

// invalid physical input or malformed configuration (exit code 2)
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// a statistic is undefined for the given tallies, e.g. zero accidentals (exit code 3)
struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// file system trouble (exit code 4)
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace pairsim
