#pragma once

#include <stdexcept>
#include <string>

namespace dpcolor {

// Bad argument values (out-of-domain probabilities, negative sizes, ...).
struct parameter_error : std::invalid_argument {
    explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

// A documented budget was exceeded (vertex counts, subset enumeration, ...).
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input files.
struct format_error : std::runtime_error {
    explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dpcolor
