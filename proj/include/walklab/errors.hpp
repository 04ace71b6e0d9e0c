#pragma once

#include <stdexcept>
#include <string>

namespace walklab {

// Invalid input or violated operation precondition (CLI exit code 2).
class PreconditionError : public std::runtime_error {
  public:
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// Request is valid but not feasible at this size/mode (CLI exit code 3).
class InfeasibleError : public std::runtime_error {
  public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace walklab
