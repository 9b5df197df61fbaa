#pragma once

#include <stdexcept>
#include <string>

namespace organoid {

/// Input that violates a type invariant or operation precondition.
/// The command-line tool maps it to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Instance exceeds the configured size limit of an exact solver (exit code 3).
class SolverSizeError : public std::length_error {
public:
    explicit SolverSizeError(const std::string& what) : std::length_error(what) {}
};

} // namespace organoid
