#pragma once

#include <stdexcept>

namespace kinchem {

/// Requested quantity only exists above the critical mass threshold.
struct CriticalMassNotExceeded : std::domain_error {
    using std::domain_error::domain_error;
};

/// A time integration produced NaN/Inf or left the guarded range.
struct NumericalDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace kinchem
