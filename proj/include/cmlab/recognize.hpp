#pragma once

#include "cmlab/bignum.hpp"

#include <optional>
#include <string>

namespace cmlab {

// a + b*sqrt(d) in K with the distance to the complex input it was read from.
struct AlgebraicInK {
    int d = 0;
    mpq_class a, b;
    Real residual;
    mpz_class denominator_bound;
    bool recognized = false;

    bool is_zero() const { return a == 0 && b == 0; }
    bool is_rational() const { return b == 0; }
    BigComplex to_complex() const;
    std::string str() const;
};

// Best rational p/q with q <= bound by continued fractions, or nullopt when no
// convergent gets within tol.
std::optional<mpq_class> recognize_rational(const Real& x, const mpz_class& bound, const Real& tol);

// Recognize z as a + b sqrt(d): continued fractions on each coordinate, then a
// common-denominator sweep. recognized is false (never rounded) if the residual
// exceeds tol = 10^-(digits/2) relative to max(1, |z|).
AlgebraicInK recognize_in_K(const BigComplex& z, int d, int digits, const mpz_class& bound);

}  // namespace cmlab
