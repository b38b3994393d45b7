#pragma once

#include <functional>

#include "fracstefan/types.hpp"

namespace fracstefan {

/// Fixed-order Gauss-Legendre on [a, b]. Supported orders: 4, 8, 16, 32.
Real gauss_legendre(const std::function<Real(Real)>& f, Real a, Real b, int order);

/// Adaptive Simpson on [a, b] to absolute tolerance tol.
Real adaptive_simpson(const std::function<Real(Real)>& f, Real a, Real b,
                      Real tol, int max_depth = 48);

}  // namespace fracstefan
