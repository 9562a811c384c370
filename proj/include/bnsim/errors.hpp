#pragma once

#include <stdexcept>
#include <string>

namespace bnsim {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed network file (syntax level; carries a byte position when known).
struct ParseError : Error {
    using Error::Error;
};

// Operation called with inputs that violate its contract
// (unknown node, non-binary network, alternate path, contradictory evidence, ...).
struct PreconditionError : Error {
    using Error::Error;
};

// Exact computation would exceed the documented enumeration budget.
struct BudgetError : Error {
    using Error::Error;
};

// A local conditional normalized to zero during simulation: every candidate
// value is inconsistent with some deterministic neighbor. The sampler cannot
// proceed from this state.
struct DegenerateConditionalError : Error {
    DegenerateConditionalError(std::string node, std::string state,
                               const std::string& what)
        : Error(what), node(std::move(node)), state(std::move(state)) {}
    std::string node;
    std::string state;
};

}  // namespace bnsim
