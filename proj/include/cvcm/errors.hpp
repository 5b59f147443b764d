#pragma once

#include <stdexcept>
#include <string>

namespace cvcm {

/// Parameters that do not describe a valid physical model (unstable modes,
/// negative temperatures, mismatched dimensions, violated coupling constraints).
class ModelError : public std::invalid_argument {
public:
    explicit ModelError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure failed on an otherwise well-formed model: divergence,
/// eigenvalue pairing failure, missing steady state.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cvcm
