#pragma once

#include "cmlab/bignum.hpp"

#include <vector>

namespace cmlab {

// Gamma and upper incomplete gamma at the current default precision. Callers add
// guard digits; nothing here changes the global precision, so workers may call it.

// B_{2m} as exact rationals, m = 0..count-1.
const std::vector<mpq_class>& bernoulli_even(size_t count);

// Throws PoleAtS at non-positive integers.
BigComplex cgamma(const BigComplex& s);
// Gamma(s, x) for x > 0.
BigComplex upper_gamma(const BigComplex& s, const Real& x);

}  // namespace cmlab
