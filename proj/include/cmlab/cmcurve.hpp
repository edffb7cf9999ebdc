#pragma once

#include "cmlab/bignum.hpp"
#include "cmlab/quadfield.hpp"

#include <gmpxx.h>

#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace cmlab {

struct CurveRecord {
    std::string label;
    int d_K = 0;
    std::string A, B;
    long cond_a = 1, cond_b = 0;
    bool defined_over_Q = true;
    std::optional<long> conductor;
};

class Grossencharacter;

class CMCurve {
public:
    std::string label;
    int d = 0;
    mpq_class A, B;
    QuadInt cond_gen;
    bool defined_over_Q = true;
    std::optional<long> conductor_field;

    const QuadField& field() const { return QuadField::get(d); }
    QuadIdeal conductor_ideal() const { return QuadIdeal(cond_gen); }
    // -16(4A^3 + 27B^2)
    mpq_class discriminant() const;
    mpq_class j_invariant() const;
    // N(f) * |d_K|
    long conductor_over_Q() const;
    // p > 3, A, B p-integral and p not dividing the model discriminant.
    bool model_good_at(long p) const;
    bool bad_prime(long p) const { return conductor_over_Q() % p == 0; }
    // The model (u^4 A, u^6 B), whose lattice is L/u.
    CMCurve rescaled(const mpq_class& u) const;
    const Grossencharacter& psi() const;

private:
    mutable std::shared_ptr<Grossencharacter> psi_;
    friend CMCurve load_curve(const CurveRecord&);
    friend class Grossencharacter;
};

// Validated curve; throws NotCM, SingularModel, ConductorMismatch.
CMCurve load_curve(const CurveRecord& rec);
// j-invariant of the maximal order of discriminant d.
mpq_class cm_j_invariant(int d);

// a_p = p + 1 - #E(F_p). Requires a model with good reduction at p.
long count_points(const CMCurve& E, long p);

enum class Reduction { Supersingular, Ordinary, Bad };
Reduction classify_reduction(const CMCurve& E, long p);
const char* reduction_name(Reduction r);

class Grossencharacter {
public:
    explicit Grossencharacter(const CMCurve& E);

    // psi(P) for a prime ideal coprime to f: trace-pinned at split primes,
    // -p at inert primes. Memoized.
    QuadInt at_prime(const QuadIdeal& P) const;
    // psi^k(a) through the prime factorization.
    QuadInt eval(const QuadIdeal& a, unsigned k = 1) const;
    // psi((alpha)) = eps(alpha) * alpha through the residue table.
    QuadInt eval_fast(const QuadInt& alpha) const;
    // eps(alpha) as a unit of O_K; alpha must be coprime to f.
    const QuadInt& eps(const QuadInt& alpha) const;
    // Smallest divisor of f through which eps^k factors.
    QuadIdeal conductor_of_power(unsigned k) const;
    const ResidueRing& residues() const { return R_; }
    int primes_used() const { return primes_used_; }

private:
    CMCurve base_;
    int d_;
    bool over_Q_;
    ResidueRing R_;
    std::vector<int> table_;  // residue index -> unit index, -1 off (O/f)^x
    int primes_used_ = 0;
    mutable std::shared_mutex mu_;
    mutable std::map<std::pair<std::string, std::string>, QuadInt> memo_;

    QuadInt trace_pinned(const QuadIdeal& P, long p) const;
    void build_table(const CMCurve& E);
};

}  // namespace cmlab
