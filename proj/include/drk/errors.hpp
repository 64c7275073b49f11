#ifndef DRK_ERRORS_HPP
#define DRK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace drk {

/** Malformed input file or JSON document (message carries the field path). */
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/** A configuration value violates a model constraint. */
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/** An argument is outside the mathematical domain of an operation. */
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Work or memory budget exceeded (state space, enumeration size, ...). */
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Iterative solver failed to reach the requested tolerance. */
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

/** The chain has a structural defect (for example several closed classes). */
class StructuralError : public std::runtime_error {
public:
    explicit StructuralError(const std::string& msg) : std::runtime_error(msg) {}
};

/** A computed object failed an internal consistency check. */
class IntegrityError : public std::runtime_error {
public:
    explicit IntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

/** A transition pair matched no analytic case of the closed-form builder. */
class CoverageError : public std::runtime_error {
public:
    explicit CoverageError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace drk

#endif
