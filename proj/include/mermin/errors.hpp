#pragma once

#include <stdexcept>
#include <string>

namespace mermin {

// Invalid user input: non-unit Bloch vectors, malformed files, bad dimensions.
// CLI maps this to exit code 2.
struct validation_error : std::invalid_argument {
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

// A size cap was exceeded (dense operators capped at kDenseQubitCap qubits,
// exhaustive LHV enumeration at kLhvQubitCap). CLI maps this to exit code 3.
struct cap_exceeded_error : std::runtime_error {
    explicit cap_exceeded_error(const std::string& what) : std::runtime_error(what) {}
};

// A documented operation precondition does not hold for otherwise well-formed
// input (e.g. a non-maximal state passed to the GHZ extraction). CLI exit 4.
struct precondition_error : std::runtime_error {
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mermin
