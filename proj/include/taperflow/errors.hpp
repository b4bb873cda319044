#pragma once

#include <stdexcept>
#include <string>

namespace taperflow {

// Invalid argument to a single operation (x out of domain, bad exponent, ...).
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Inconsistent configuration (case id vs beta range, missing fields, ...).
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to reach its accuracy target.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A request exceeds the configured resource cap.
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace taperflow
