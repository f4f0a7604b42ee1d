#pragma once

#include <stdexcept>
#include <string>

namespace flowopt {

/// Malformed input file (topology, dataset, model). Messages carry the
/// offending line number where one exists.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A flow vector that violates the link-capacity or positivity constraints
/// of an operation that requires a feasible flow.
class FlowError : public std::runtime_error {
public:
    explicit FlowError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (non-convergence, broken bracket).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace flowopt
