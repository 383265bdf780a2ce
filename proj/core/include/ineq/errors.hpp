#pragma once

#include <stdexcept>
#include <string>

namespace ineq {

/// Bad input: malformed files, violated preconditions, inconsistent data.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The computation itself cannot produce a meaningful number
/// (undefined share, infeasible calibration, solver drift).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ineq
