#pragma once

#include "cmlab/bignum.hpp"
#include "cmlab/cmcurve.hpp"

#include <array>

namespace cmlab {

// Lattice of the model: x = wp(z), y = wp'(z)/2, g2 = -4A, g3 = -4B.
struct PeriodLattice {
    int d = 0;
    int digits = 0;
    BigComplex omega;  // L = omega * O_K
    Real omega_plus;   // least positive real element of L
    BigComplex w1, w2;  // reduced basis with Im(w2/w1) > 0
    BigComplex tau;
    QuadInt z;  // omega_plus = z * omega
    bool z_prime_to_6sqrtd = false;
    double basis_residual = 0;  // log10 of the g2/g3 check
    double z_residual = 0;      // log10 of |Im(z*omega)|/|z*omega|
    Real g2, g3;

    BigComplex point(const QuadInt& x) const { return omega * x.to_complex(); }
    // Coordinates (s, t) with u = s*omega + t*omega*w_K, as real numbers.
    std::array<Real, 2> coords(const BigComplex& u) const;
    // u reduced modulo L into the half-open parallelogram spanned by omega, omega*w_K.
    BigComplex reduce(const BigComplex& u) const;
};

// Roots of x^3 + A x + B.
std::array<BigComplex, 3> cubic_roots(const Real& A, const Real& B);
BigComplex agm(BigComplex a, BigComplex b);
// g2, g3 of the lattice w1*(Z + tau Z) via E4, E6.
std::pair<BigComplex, BigComplex> lattice_invariants(const BigComplex& w1, const BigComplex& tau);

PeriodLattice periods(const CMCurve& E, int digits);

}  // namespace cmlab
