#pragma once

#include <stdexcept>
#include <string>

namespace finact {

// Inputs that violate a documented precondition (bad weights, foreign events,
// mismatched arities, unsatisfiable pins...). Always carries a precise message
// naming the offending object.
struct PreconditionError : std::invalid_argument {
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

// Two objects live on different atom spaces.
struct DomainMismatchError : PreconditionError {
    explicit DomainMismatchError(const std::string& what) : PreconditionError(what) {}
};

// A requested isomorphism (possibly pinned) does not exist.
struct NoIsomorphismError : PreconditionError {
    explicit NoIsomorphismError(const std::string& what) : PreconditionError(what) {}
};

// An exhaustive scan or enumeration would exceed its configured budget.
// The message reports the requested size and the cap that was in force.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed document or formula text. Carries line/field context.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace finact
