#pragma once

#include <stdexcept>
#include <string>

namespace treeharm {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated precondition (bad argument, root has no parent, t = 0, ...).
class precondition_error : public error {
public:
    using error::error;
};

/// Eigenvalue lies on the l2 spectrum [-rho, rho], where the branch
/// inversion z(lambda) is not defined.
class spectrum_error : public error {
public:
    using error::error;
};

/// Series expansion requested at (or too close to) the branch points
/// lambda = +-rho, where dz/dlambda blows up.
class branch_point_error : public error {
public:
    using error::error;
};

/// Enumeration radius above the configured cap, or a stencil ran out of
/// ball radius.
class radius_error : public error {
public:
    using error::error;
};

/// Malformed input: JSON files, vertex strings, complex literals.
class parse_error : public error {
public:
    using error::error;
};

/// Unknown verification suite name or invalid suite configuration.
class suite_error : public error {
public:
    using error::error;
};

/// Sign-constant arbitration could not distinguish the two conventions
/// (indicates an implementation bug, not a data problem).
class ambiguity_error : public error {
public:
    using error::error;
};

} // namespace treeharm
