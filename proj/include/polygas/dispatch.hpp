#pragma once

#include "polygas/numeric.hpp"

namespace polygas {

/// Runs a scalar-generic computation `fn.template operator()<T>()` in the
/// requested backend and wraps the result.
template <class F>
GasValue dispatch(Mode mode, F&& fn)
{
    if (mode == Mode::Exact) {
        return GasValue::of(fn.template operator()<Rational>());
    }
    return GasValue::of(fn.template operator()<double>());
}

} // namespace polygas
