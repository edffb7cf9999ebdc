#include "cmlab/cmcurve.hpp"

#include "cmlab/simd.hpp"

#include <algorithm>
#include <functional>
#include <mutex>

namespace cmlab {

namespace {

long mod_p(const mpz_class& x, long p) {
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(p));
    return r.get_si();
}

long inv_mod(long a, long p) {
    mpz_class r, A(a), P(p);
    if (!mpz_invert(r.get_mpz_t(), A.get_mpz_t(), P.get_mpz_t()))
        throw Error(Errc::InvalidArgument, "non-invertible residue");
    return r.get_si();
}

long rational_mod(const mpq_class& q, long p) {
    long num = mod_p(q.get_num(), p);
    long den = mod_p(q.get_den(), p);
    return num * inv_mod(den, p) % p;
}

int valuation(mpz_class x, long p) {
    if (x == 0) return 1 << 20;
    int v = 0;
    while (mpz_divisible_ui_p(x.get_mpz_t(), p)) {
        x /= p;
        ++v;
    }
    return v;
}

int unit_index(const QuadField& K, const QuadInt& u) {
    const auto& U = K.units();
    for (size_t i = 0; i < U.size(); ++i)
        if (U[i] == u) return static_cast<int>(i);
    return -1;
}

std::string key_part(const mpz_class& x) { return x.get_str(); }

}  // namespace

// ---------------------------------------------------------------- curve

mpq_class CMCurve::discriminant() const {
    mpq_class t = 4 * A * A * A + 27 * B * B;
    return -16 * t;
}

mpq_class CMCurve::j_invariant() const {
    mpq_class a3 = 4 * A * A * A;
    return 1728 * a3 / (a3 + 27 * B * B);
}

long CMCurve::conductor_over_Q() const { return conductor_ideal().norm().get_si() * -d; }

bool CMCurve::model_good_at(long p) const {
    if (p <= 3) return false;
    if (mpz_divisible_ui_p(A.get_den().get_mpz_t(), p) || mpz_divisible_ui_p(B.get_den().get_mpz_t(), p))
        return false;
    mpq_class D = discriminant();
    return !mpz_divisible_ui_p(D.get_num().get_mpz_t(), p);
}

CMCurve CMCurve::rescaled(const mpq_class& u) const {
    CMCurve c = *this;
    mpq_class u2 = u * u;
    c.A = A * u2 * u2;
    c.B = B * u2 * u2 * u2;
    c.A.canonicalize();
    c.B.canonicalize();
    c.label = label + "*" + u.get_str();
    return c;
}

const Grossencharacter& CMCurve::psi() const {
    if (!psi_) throw Error(Errc::InvalidArgument, "curve " + label + " was not loaded through load_curve");
    return *psi_;
}

mpq_class cm_j_invariant(int d) {
    switch (d) {
        case -3: return 0;
        case -4: return 1728;
        case -7: return -3375;
        case -8: return 8000;
        case -11: return -32768;
        case -19: return -884736;
        case -43: return -884736000;
        case -67: return mpq_class(mpz_class("-147197952000"));
        case -163: return mpq_class(mpz_class("-262537412640768000"));
    }
    throw Error(Errc::UnknownField, "no maximal-order CM j-invariant for d=" + std::to_string(d));
}

namespace {

// Discriminants of the non-maximal class-number-one orders.
const char* non_maximal_j(const mpq_class& j) {
    if (j == 54000) return "-12";
    if (j == 287496) return "-16";
    if (j == -12288000) return "-27";
    if (j == 16581375) return "-28";
    return nullptr;
}

}  // namespace

CMCurve load_curve(const CurveRecord& rec) {
    const QuadField& K = QuadField::get(rec.d_K);
    CMCurve E;
    E.label = rec.label;
    E.d = rec.d_K;
    try {
        E.A = mpq_class(rec.A);
        E.B = mpq_class(rec.B);
    } catch (const std::exception&) {
        throw Error(Errc::ParseError, "bad rational coefficient in " + rec.label);
    }
    E.A.canonicalize();
    E.B.canonicalize();
    E.cond_gen = QuadInt(K.d(), rec.cond_a, rec.cond_b);
    E.defined_over_Q = rec.defined_over_Q;
    E.conductor_field = rec.conductor;

    if (E.discriminant() == 0) throw Error(Errc::SingularModel, rec.label + ": discriminant vanishes");
    mpq_class j = E.j_invariant();
    if (j != cm_j_invariant(K.d())) {
        if (const char* o = non_maximal_j(j))
            throw Error(Errc::NotCM, rec.label + ": CM by the non-maximal order of discriminant " + o);
        throw Error(Errc::NotCM, rec.label + ": j=" + j.get_str() + " does not match d_K=" + std::to_string(K.d()));
    }
    if (E.cond_gen.is_zero()) throw Error(Errc::ConductorMismatch, rec.label + ": zero conductor generator");

    const long N = E.conductor_over_Q();
    if (E.conductor_field && *E.conductor_field != N)
        throw Error(Errc::ConductorMismatch, rec.label + ": N(f)*|d_K| = " + std::to_string(N) +
                                                 " but conductor field says " + std::to_string(*E.conductor_field));
    if (E.defined_over_Q) {
        // Primes p > 3 of the conductor must be bad for every model; bad primes of
        // the model outside the conductor must be non-minimal.
        mpz_class num = E.discriminant().get_num();
        for (long p = 5; p <= N; ++p) {
            if (N % p || !is_prime(p)) continue;
            if (!mpz_divisible_ui_p(num.get_mpz_t(), p))
                throw Error(Errc::ConductorMismatch, rec.label + ": conductor prime " + std::to_string(p) +
                                                         " does not divide the discriminant");
        }
        mpz_class rem = abs(num);
        for (unsigned long q : {2ul, 3ul})
            while (mpz_divisible_ui_p(rem.get_mpz_t(), q)) rem /= q;
        for (long p = 5; mpz_class(p) * p <= rem || p <= 100; ++p) {
            if (!is_prime(p) || !mpz_divisible_ui_p(rem.get_mpz_t(), p)) continue;
            while (mpz_divisible_ui_p(rem.get_mpz_t(), p)) rem /= p;
            if (N % p == 0) continue;
            if (valuation(E.A.get_num(), p) < 4 || valuation(E.B.get_num(), p) < 6)
                throw Error(Errc::ConductorMismatch, rec.label + ": bad prime " + std::to_string(p) +
                                                         " is missing from the conductor");
        }
        if (rem > 100 && rem.fits_slong_p() && N % rem.get_si() != 0)
            throw Error(Errc::ConductorMismatch, rec.label + ": bad prime " + rem.get_str() +
                                                     " is missing from the conductor");
    }
    E.psi_ = std::make_shared<Grossencharacter>(E);
    if (E.psi_->conductor_of_power(1) != E.conductor_ideal())
        throw Error(Errc::ConductorMismatch,
                    rec.label + ": the character has conductor " + E.psi_->conductor_of_power(1).str() +
                        ", not " + E.conductor_ideal().str());
    return E;
}

// ---------------------------------------------------------------- counting

long count_points(const CMCurve& E, long p) {
    if (!is_prime(p)) throw Error(Errc::NotPrime, std::to_string(p));
    if (!E.model_good_at(p))
        throw Error(Errc::BadReduction, E.label + " has no good short model at p=" + std::to_string(p));
    const long a = rational_mod(E.A, p), b = rational_mod(E.B, p);
    std::vector<int32_t> chi(static_cast<size_t>(p), -1);
    chi[0] = 0;
    for (long x = 1; x <= p / 2; ++x) chi[static_cast<size_t>(x * x % p)] = 1;
    std::vector<uint32_t> idx(static_cast<size_t>(p));
    for (long x = 0; x < p; ++x) {
        long fx = (x * x % p * x + a * x + b) % p;
        idx[static_cast<size_t>(x)] = static_cast<uint32_t>(fx);
    }
    int64_t s = simd::gather_sum(chi.data(), idx.data(), idx.size());
    return -static_cast<long>(s);
}

Reduction classify_reduction(const CMCurve& E, long p) {
    if (!is_prime(p)) throw Error(Errc::NotPrime, std::to_string(p));
    if (E.bad_prime(p)) return Reduction::Bad;
    auto st = split_type(E.field(), p);
    return st.kind == SplitKind::Inert ? Reduction::Supersingular : Reduction::Ordinary;
}

const char* reduction_name(Reduction r) {
    switch (r) {
        case Reduction::Supersingular: return "supersingular";
        case Reduction::Ordinary: return "ordinary";
        case Reduction::Bad: return "bad";
    }
    return "?";
}

// ---------------------------------------------------------------- character

Grossencharacter::Grossencharacter(const CMCurve& E)
    : base_(E), d_(E.d), over_Q_(E.defined_over_Q), R_(E.conductor_ideal()) {
    base_.psi_.reset();
    build_table(E);
}

QuadInt Grossencharacter::trace_pinned(const QuadIdeal& P, long p) const {
    const long ap = count_points(base_, p);
    std::vector<QuadInt> cands;
    for (const auto& g : gens_mod_units(P))
        if (g.trace() == ap) cands.push_back(g);
    if (cands.empty())
        throw Error(Errc::ConductorMismatch, "no generator of " + P.str() + " has trace a_p=" + std::to_string(ap));
    if (cands.size() == 1) return cands[0];
    QuadInt one(d_, 1, 0);
    std::vector<QuadInt> normalized;
    for (const auto& c : cands)
        if (R_.reduce(c) == R_.reduce(one)) normalized.push_back(c);
    if (normalized.size() != 1)
        throw Error(Errc::AmbiguousGenerator, "trace condition does not pin psi" + P.str());
    return normalized[0];
}

void Grossencharacter::build_table(const CMCurve& E) {
    const QuadField& K = E.field();
    const auto& U = K.units();
    table_.assign(static_cast<size_t>(R_.size()), -1);
    long target = 0;
    for (long i = 0; i < R_.size(); ++i)
        if (R_.is_unit(R_.element(i))) ++target;
    std::vector<long> known;
    long filled = 0;

    auto mul_units = [&](int i, int j) { return unit_index(K, U[i] * U[j]); };

    std::function<void(const QuadInt&, int)> set = [&](const QuadInt& x, int ui) {
        long idx = R_.index(x);
        if (table_[idx] >= 0) {
            if (table_[idx] != ui)
                throw Error(Errc::ConductorMismatch,
                            E.label + ": the character is inconsistent modulo " + R_.modulus().str());
            return;
        }
        table_[idx] = ui;
        ++filled;
        std::vector<long> snapshot = known;
        known.push_back(idx);
        QuadInt xr = R_.element(idx);
        set(xr * xr, mul_units(ui, ui));
        for (long y : snapshot) set(xr * R_.element(y), mul_units(ui, table_[y]));
    };

    // eps(u) = u^{-1} on global units.
    for (size_t i = 0; i < U.size(); ++i) set(U[i], unit_index(K, U[i].conj()));

    long extra = 0;
    for (long p = 5; p < 5000; ++p) {
        if (!is_prime(p) || E.bad_prime(p) || !E.model_good_at(p)) continue;
        auto st = split_type(K, p);
        if (st.kind == SplitKind::Split) {
            for (const auto& P : st.primes) {
                QuadInt v = trace_pinned(P, p);
                QuadInt u = exact_div(v, P.gen());
                set(P.gen(), unit_index(K, u));
                memo_[{key_part(P.gen().a), key_part(P.gen().b)}] = v;
            }
            if (over_Q_) {
                QuadInt v0 = memo_[{key_part(st.primes[0].gen().a), key_part(st.primes[0].gen().b)}];
                QuadInt v1 = memo_[{key_part(st.primes[1].gen().a), key_part(st.primes[1].gen().b)}];
                if (v0.conj() != v1)
                    throw Error(Errc::ConductorMismatch, E.label + ": psi(conj P) != conj psi(P) at p=" +
                                                             std::to_string(p));
            }
        } else if (st.kind == SplitKind::Inert && over_Q_) {
            set(QuadInt(K.d(), p, 0), unit_index(K, QuadInt(K.d(), -1, 0)));
        }
        ++primes_used_;
        if (filled == target && ++extra >= 12) break;
    }
    if (filled != target)
        throw Error(Errc::ConductorMismatch, E.label + ": could not pin the character modulo " + R_.modulus().str());
}

const QuadInt& Grossencharacter::eps(const QuadInt& alpha) const {
    long idx = R_.index(alpha);
    if (table_[idx] < 0)
        throw Error(Errc::NotCoprimeToConductor, alpha.str() + " is not prime to " + R_.modulus().str());
    return QuadField::get(d_).units()[table_[idx]];
}

QuadInt Grossencharacter::eval_fast(const QuadInt& alpha) const { return eps(alpha) * alpha; }

QuadInt Grossencharacter::at_prime(const QuadIdeal& P) const {
    if (R_.modulus().norm() > 1 && !R_.is_unit(P.gen()))
        throw Error(Errc::RamifiedOrBadPrime, P.str() + " divides the conductor");
    std::pair<std::string, std::string> key{key_part(P.gen().a), key_part(P.gen().b)};
    {
        std::shared_lock lock(mu_);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
    }
    QuadInt v;
    mpz_class N = P.norm();
    if (N.fits_slong_p() && is_prime(N.get_si()) && base_.model_good_at(N.get_si())) {
        v = trace_pinned(P, N.get_si());
    } else if (!N.fits_slong_p() || !is_prime(N.get_si())) {
        mpz_class p = sqrt(N);
        if (over_Q_ && p * p == N && P.gen() == QuadInt(d_, p, 0))
            v = QuadInt(d_, -p, 0);
        else
            v = eval_fast(P.gen());
    } else {
        v = eval_fast(P.gen());
    }
    std::unique_lock lock(mu_);
    memo_.emplace(key, v);
    return v;
}

QuadInt Grossencharacter::eval(const QuadIdeal& a, unsigned k) const {
    if (R_.modulus().norm() > 1 && !coprime(a, R_.modulus()))
        throw Error(Errc::NotCoprimeToConductor, a.str() + " is not prime to " + R_.modulus().str());
    QuadInt v(d_, 1, 0);
    for (const auto& f : factor_ideal(a)) v = v * qpow(at_prime(f.prime), static_cast<unsigned long>(f.exponent));
    return qpow(v, k);
}

QuadIdeal Grossencharacter::conductor_of_power(unsigned k) const {
    const QuadIdeal& f = R_.modulus();
    const auto& U = QuadField::get(d_).units();
    // Divisors of f, by norm.
    std::vector<QuadIdeal> divs = {QuadIdeal::unit(d_)};
    if (f.norm() > 1) {
        for (const auto& pf : factor_ideal(f)) {
            std::vector<QuadIdeal> next;
            for (const auto& D : divs) {
                QuadIdeal cur = D;
                for (int e = 0; e <= pf.exponent; ++e) {
                    next.push_back(cur);
                    cur = cur * pf.prime;
                }
            }
            divs = next;
        }
    }
    std::sort(divs.begin(), divs.end(), ideal_less);
    QuadInt one(d_, 1, 0);
    for (const auto& g : divs) {
        bool ok = true;
        for (long i = 0; i < R_.size() && ok; ++i) {
            if (table_[i] < 0) continue;
            QuadInt x = R_.element(i);
            if (!g.contains(x - one)) continue;
            if (qpow(U[table_[i]], k) != one) ok = false;
        }
        if (ok) return g;
    }
    return f;
}

}  // namespace cmlab
