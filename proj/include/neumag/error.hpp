#pragma once

#include <stdexcept>
#include <string>

namespace neumag {

/// Raised when a numerical routine cannot deliver a result within its
/// contract (non-convergence, insufficient truncation, inconsistent data).
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Raised for caller mistakes: out-of-range arguments, malformed inputs.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace neumag
