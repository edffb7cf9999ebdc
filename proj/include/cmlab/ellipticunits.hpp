#pragma once

#include "cmlab/bignum.hpp"
#include "cmlab/cmcurve.hpp"
#include "cmlab/periods.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace cmlab {

struct WpValue {
    BigComplex wp;     // wp(z)
    BigComplex wp_d;   // wp'(z)
};

// wp and wp' of a lattice through the q-expansion in u = z/w1, after moving
// Im(u) into [-Im(tau)/2, Im(tau)/2]. Evaluates at the current working precision.
class Weierstrass {
public:
    explicit Weierstrass(const PeriodLattice& L);
    // PoleAtLatticePoint when z is in L to working precision.
    WpValue operator()(const BigComplex& z) const;
    const PeriodLattice& lattice() const { return L_; }

private:
    PeriodLattice L_;
    BigComplex c_, q_;  // c = 2 pi i / w1
    BigComplex const_;  // 1/12 - 2 sum f(q^m)
    std::vector<BigComplex> qpow_;
};

// Convenience wrapper; builds the q-data on every call.
WpValue wp(const BigComplex& z, const PeriodLattice& L);

struct TorsionPoint {
    BigComplex z;           // in C/L
    QuadIdeal order_ideal;
    BigComplex x, y;        // (wp(z), wp'(z)/2)
};

struct EllipticUnitValue {
    BigComplex value;
    QuadIdeal ideal_a;
    std::string level;  // "n=2, p=7" or "shift"
    int digits = 0;
};

// Data shared by all unit computations for one curve at one precision: the
// lattice, P_f = Omega/f for the fixed generator f of the conductor, the ray class
// representatives B with psi(b), and the x-coordinates of E[a] per ideal a.
class UnitContext {
public:
    UnitContext(const CMCurve& E, int digits);
    // Same curve with a different generator of f (a unit multiple of cond_gen).
    UnitContext(const CMCurve& E, int digits, const QuadInt& f_gen);

    const CMCurve& curve() const { return E_; }
    int digits() const { return digits_; }
    // Precision the evaluations run at.
    int work_digits() const { return digits_ + 30; }
    const PeriodLattice& lattice() const { return wp_.lattice(); }
    const Weierstrass& weierstrass() const { return wp_; }
    const QuadInt& f() const { return f_; }
    BigComplex P_f() const;
    const std::vector<QuadIdeal>& B() const { return B_; }
    const std::vector<QuadInt>& psi_B() const { return psiB_; }
    // Replace B by another set of representatives of the same ray classes.
    void set_B(const std::vector<QuadIdeal>& B);

    // x = wp at the N(a) - 1 nonzero points gamma Omega / alpha, gamma over O/a.
    const std::vector<BigComplex>& torsion_x(const QuadIdeal& a) const;
    // x*Omega reduced mod L.
    BigComplex point(const BigComplex& x) const;
    // True when alpha z / Omega is in O_K to tolerance, i.e. z in E[a].
    bool in_torsion(const QuadIdeal& a, const BigComplex& z) const;

    // The caller holds a DigitsGuard at work_digits().
    BigComplex theta_raw(const QuadIdeal& a, const BigComplex& z) const;
    BigComplex lambda_raw(const QuadIdeal& a, const BigComplex& z) const;

private:
    CMCurve E_;
    int digits_;
    Weierstrass wp_;
    QuadInt f_;
    std::vector<QuadIdeal> B_;
    std::vector<QuadInt> psiB_;
    BigComplex delta_;
    struct Cache {
        std::mutex mu;
        std::map<std::string, std::vector<BigComplex>> tors;
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// Shared context per (curve model, digits).
std::shared_ptr<const UnitContext> unit_context(const CMCurve& E, int digits);

// The prime of K above p used for the tower: the first entry of split_type.
QuadIdeal tower_prime(const CMCurve& E, long p);
// P_n = Omega / psi(P^n); P_0 = O.
TorsionPoint tower_point(const UnitContext& ctx, long p, unsigned n);
TorsionPoint conductor_point(const UnitContext& ctx);

// Theta_a(z) = alpha^-12 Delta^(N a - 1) prod_{T in E[a], T != O} (x(z) - x(T))^-6.
// EvaluationAtTorsion when z is in E[a].
BigComplex theta(const UnitContext& ctx, const QuadIdeal& a, const BigComplex& z);
// Lambda_a(z) = prod_{b in B} Theta_a(psi(b) P_f + z). Requires a coprime to 6f.
EllipticUnitValue lambda_unit(const UnitContext& ctx, const QuadIdeal& a, const BigComplex& z);
// eta_{a,n} = Lambda_a(P_n).
EllipticUnitValue eta(const UnitContext& ctx, const QuadIdeal& a, long p, unsigned n);

struct UnitRelation {
    BigComplex lhs, rhs;
    Real residual;  // |lhs/rhs - 1|
};
// Lambda_a(psi(b) P_n) Lambda_a(P_n)^-Nb against Lambda_b(psi(a) P_n) Lambda_b(P_n)^-Na.
UnitRelation verify_unit_relation(const UnitContext& ctx, const QuadIdeal& a, const QuadIdeal& b, long p,
                                  unsigned n);

struct NormCheck {
    unsigned n = 0;
    long terms = 0;
    BigComplex product;  // prod over u = 1 mod P^n of Lambda_a(u P_{n+1})
    BigComplex target;   // Lambda_a(P_n)
    Real residual;       // |product/target - 1|
    Real residual_one;   // |product - 1|
    bool holds = false;  // residual below tolerance
};
// Norm compatibility from level n+1 down to level n. u runs over lifts of the
// kernel of (O/P^{n+1})^x -> (O/P^n)^x that are 1 mod f.
NormCheck norm_compatibility(const UnitContext& ctx, const QuadIdeal& a, long p, unsigned n);

// prod over u in (O/P^n)^x of Lambda_a(u P_n): the norm of eta_{a,n} down to K(f).
BigComplex eta_norm_product(const UnitContext& ctx, const QuadIdeal& a, long p, unsigned n, long* terms = nullptr);

struct CWDerivative {
    unsigned k = 1;
    BigComplex value;  // (d/dz)^k log Lambda_a at 0, divided by (k-1)!
    Real radius;
    Real singular_distance;  // distance from 0 to the nearest zero or pole
    size_t points = 0;
    std::vector<BigComplex> log_coeffs;  // log Lambda_a(z) = sum l_n z^n, n <= k
};
// Cauchy-integral derivative on M equally spaced points of the circle |z| = r.
// r = 0 picks 0.1 times the singular distance. RadiusTooLarge when r reaches it.
CWDerivative cw_derivative(const UnitContext& ctx, const QuadIdeal& a, unsigned k, const Real& r = Real(0));
size_t cauchy_points(unsigned k, int digits);

struct Reciprocity {
    unsigned k = 1;
    BigComplex lhs;
    BigComplex rhs;            // with the imprimitive L(conj psi^k, k)
    BigComplex rhs_primitive;  // with the primitive one
    BigComplex factor;         // N a - psi(a)^k
    Real residual;             // |lhs/rhs - 1|, or |lhs - rhs| when rhs vanishes
    Real residual_primitive;
    bool rhs_vanishes = false;
    std::string matches;       // "imprimitive", "primitive", "both" or "neither"
};
// l(eta_a) = 12 (-1)^(k-1) f^k (N a - psi(a)^k) Omega^-k L_f(conj psi^k, k).
// Requires a coprime to 6 p f.
Reciprocity verify_cw_reciprocity(const UnitContext& ctx, const QuadIdeal& a, unsigned k, long p);

}  // namespace cmlab
