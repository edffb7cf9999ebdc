#include "cmlab/heckel.hpp"

#include "cmlab/error.hpp"
#include "cmlab/gammafn.hpp"
#include "cmlab/parallel.hpp"
#include "cmlab/periods.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace cmlab {

namespace {

constexpr int kGuard = 20;
constexpr size_t kBlock = 1024;

long floor_div_l(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

int unit_idx(const QuadField& K, const QuadInt& u) {
    const auto& U = K.units();
    for (size_t i = 0; i < U.size(); ++i)
        if (U[i] == u) return static_cast<int>(i);
    throw Error(Errc::NonUnit, u.str() + " is not a unit");
}

long residue_index(long a, long b, long h, long g, long c) {
    long q = floor_div_l(b, g);
    long aa = a - q * c, bb = b - q * g;
    aa %= h;
    if (aa < 0) aa += h;
    return aa * g + bb;
}

// Fills (h, g, c, table) for modulus M from the eps table of psi.
void build_power_table(const Grossencharacter& G, const QuadField& K, unsigned k, const QuadIdeal& M, long& h,
                       long& g, long& c, std::vector<int>& table) {
    ResidueRing RM(M);
    h = RM.hnf_h();
    g = RM.hnf_g();
    c = RM.hnf_c();
    table.assign(static_cast<size_t>(RM.size()), -1);
    const ResidueRing& R = G.residues();
    for (long idx = 0; idx < R.size(); ++idx) {
        QuadInt x = R.element(idx);
        if (!R.is_unit(x)) continue;
        int ui = unit_idx(K, qpow(G.eps(x), k));
        long j = RM.index(x);
        if (table[j] >= 0 && table[j] != ui)
            throw Error(Errc::ConductorMismatch, "eps^k does not factor through " + M.str());
        table[j] = ui;
    }
}

}  // namespace

// ---------------------------------------------------------------- series

HeckeSeries::HeckeSeries(const CMCurve& E, unsigned k, bool conjugated, bool primitive)
    : d_(E.d), k_(k), conj_(conjugated), primitive_(primitive) {
    if (k == 0) throw Error(Errc::InvalidArgument, "k must be at least 1");
    const auto& G = E.psi();
    const auto& K = E.field();
    conductor_ = G.conductor_of_power(k);
    modulus_ = primitive ? conductor_ : E.conductor_ideal();
    build_power_table(G, K, k, modulus_, h_, g_, c_, table_);
    build_power_table(G, K, k, conductor_, ch_, cg_, cc_, ctable_);
    if (!primitive && E.conductor_ideal().norm() > 1)
        for (const auto& f : factor_ideal(E.conductor_ideal()))
            if (!f.prime.contains(conductor_.gen())) dropped_.push_back(f.prime);
}

long HeckeSeries::level() const { return conductor_.norm().get_si() * -d_; }

QuadInt HeckeSeries::value_mod(const QuadInt& alpha, long h, long g, long c, const std::vector<int>& t) const {
    if (!alpha.a.fits_slong_p() || !alpha.b.fits_slong_p())
        throw Error(Errc::InvalidArgument, "element too large for the residue table");
    int u = t[static_cast<size_t>(residue_index(alpha.a.get_si(), alpha.b.get_si(), h, g, c))];
    if (u < 0) return QuadInt(d_, 0, 0);
    QuadInt v = QuadField::get(d_).units()[static_cast<size_t>(u)] * qpow(alpha, k_);
    return conj_ ? v.conj() : v;
}

QuadInt HeckeSeries::value(const QuadInt& alpha) const { return value_mod(alpha, h_, g_, c_, table_); }

std::shared_ptr<const std::vector<QuadInt>> HeckeSeries::coeffs(long X) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (cache_ && static_cast<long>(cache_->size()) > X) return cache_;
    if (cache_) X = std::max(X, 2 * static_cast<long>(cache_->size()));
    const long ad = -d_;
    const mpz_class nn((static_cast<long>(d_) * d_ - d_) / 4);
    const auto& U = QuadField::get(d_).units();
    std::vector<mpz_class> sa(static_cast<size_t>(X + 1), 0), sb(static_cast<size_t>(X + 1), 0);
    // Every generator of every ideal of norm <= X: |d| b^2 <= 4X, x = 2a + b d.
    long bmax = static_cast<long>(std::sqrt(4.0 * X / ad)) + 1;
    mpz_class pa, pb, ta, tb;
    for (long b = -bmax; b <= bmax; ++b) {
        long rest = 4 * X - ad * b * b;
        if (rest < 0) continue;
        long xmax = static_cast<long>(std::sqrt(static_cast<double>(rest))) + 1;
        for (long x = -xmax; x <= xmax; ++x) {
            if (((x - b * d_) & 1) != 0) continue;
            long N4 = x * x + ad * b * b;
            if (N4 == 0 || N4 > 4 * X) continue;
            long n = N4 / 4;
            long a = (x - b * d_) / 2;
            int u = table_[static_cast<size_t>(residue_index(a, b, h_, g_, c_))];
            if (u < 0) continue;
            // (a + b w)^k, then times the unit.
            pa = 1;
            pb = 0;
            for (unsigned i = 0; i < k_; ++i) {
                ta = pa * a - nn * pb * b;
                tb = pa * b + pb * a + pb * b * d_;
                pa.swap(ta);
                pb.swap(tb);
            }
            const QuadInt& uu = U[static_cast<size_t>(u)];
            ta = uu.a * pa - nn * uu.b * pb;
            tb = uu.a * pb + uu.b * pa + uu.b * pb * d_;
            if (conj_) {
                // conj(a + b w) = (a + b d) - b w
                ta += tb * d_;
                tb = -tb;
            }
            sa[static_cast<size_t>(n)] += ta;
            sb[static_cast<size_t>(n)] += tb;
        }
    }
    auto out = std::make_shared<std::vector<QuadInt>>();
    out->reserve(static_cast<size_t>(X + 1));
    const long w = static_cast<long>(U.size());
    for (long n = 0; n <= X; ++n) {
        auto& A = sa[static_cast<size_t>(n)];
        auto& B = sb[static_cast<size_t>(n)];
        if (A % w != 0 || B % w != 0) throw Error(Errc::IntegralityFailure, "coefficient sum not divisible by #units");
        out->emplace_back(d_, A / w, B / w);
    }
    cache_ = out;
    return cache_;
}

BigComplex HeckeSeries::missing_euler_factor(const BigComplex& s) const {
    BigComplex f(1);
    for (const auto& P : dropped_) {
        QuadInt chi = value_mod(P.gen(), ch_, cg_, cc_, ctable_);
        Real N = from_mpz(P.norm());
        f *= BigComplex(1) - chi.to_complex() * cexp(-s * log(N));
    }
    return f;
}

std::shared_ptr<const HeckeSeries> hecke_series(const CMCurve& E, unsigned k, bool conjugated, bool primitive) {
    static std::mutex mu;
    static std::map<std::tuple<std::string, std::string, std::string, unsigned, bool, bool>,
                    std::shared_ptr<const HeckeSeries>>
        cache;
    auto key = std::make_tuple(E.label, E.A.get_str(), E.B.get_str(), k, conjugated, primitive);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto S = std::make_shared<const HeckeSeries>(E, k, conjugated, primitive);
    cache.emplace(key, S);
    return S;
}

const char* method_name(LMethod m) {
    switch (m) {
        case LMethod::Auto: return "auto";
        case LMethod::DirectSum: return "direct_sum";
        case LMethod::ApproxFE: return "approx_fe";
    }
    return "?";
}

// ---------------------------------------------------------------- direct sums

BigComplex partial_sum(const HeckeSeries& S, const BigComplex& s_in, long X) {
    if (X < 1) return BigComplex(0);
    const BigComplex s = promote(s_in);
    auto a = S.coeffs(X);
    auto parts = parallel_blocks<BigComplex>(static_cast<size_t>(X), kBlock, [&](size_t, size_t lo, size_t hi) {
        BigComplex acc(0);
        for (size_t i = lo; i < hi; ++i) {
            long n = static_cast<long>(i) + 1;
            const QuadInt& c = (*a)[static_cast<size_t>(n)];
            if (c.is_zero()) continue;
            acc += c.to_complex() * cexp(-s * log(Real(n)));
        }
        return acc;
    });
    BigComplex sum(0);
    for (const auto& p : parts) sum += p;
    return sum;
}

double direct_tail_log10(const HeckeSeries& S, double sigma, long X) {
    // #ideals of norm <= x is below 2 c_K x, c_K = 2 pi / (w sqrt|d|); partial
    // summation gives 2 c_K alpha/(alpha-1) X^(1-alpha), alpha = sigma - k/2.
    double alpha = sigma - S.k() / 2.0;
    if (alpha <= 1) return std::numeric_limits<double>::infinity();
    double w = static_cast<double>(QuadField::get(S.d()).units().size());
    double cK = 2 * M_PI / (w * std::sqrt(-static_cast<double>(S.d())));
    return std::log10(2 * cK * alpha / (alpha - 1)) + (1 - alpha) * std::log10(static_cast<double>(X));
}

namespace {

// Smallest X with tail below 10^-digits, or -1 if above cap.
long direct_truncation(const HeckeSeries& S, double sigma, int digits, long cap) {
    double alpha = sigma - S.k() / 2.0;
    if (alpha <= 1) return -1;
    double c = direct_tail_log10(S, sigma, 1);
    double lx = (c + digits) / (alpha - 1);
    if (lx > std::log10(static_cast<double>(cap))) return -1;
    long X = static_cast<long>(std::ceil(std::pow(10.0, lx)));
    return std::max(X, 1L);
}

// ---------------------------------------------------------------- smoothed sums

Real level_q(long level) { return sqrt(Real(level)) / (2 * real_pi()); }

// Cutoff n_max such that terms of sum a_n (Q/n)^s Gamma(s, n A / Q) are below 10^-D.
long smoothed_cutoff(const BigComplex& s, unsigned k, double Q, double A, int D) {
    double sig = std::abs(static_cast<double>(s.re));
    double target = D * std::log(10.0) + 0.5 * k * std::log(Q / A + 1) + 10;
    double x = target;
    for (int i = 0; i < 30; ++i) x = target + (0.5 * k + sig + 1) * std::log(std::max(x, 1.0));
    return static_cast<long>(std::ceil(x * Q / A)) + 1;
}

// sum_{n <= cutoff} a_n (Q/n)^s Gamma(s, n A/Q)
BigComplex smoothed_sum(const HeckeSeries& S, const BigComplex& s, const Real& A, int D) {
    Real Q = level_q(S.level());
    long X = smoothed_cutoff(s, S.k(), static_cast<double>(Q), static_cast<double>(A), D);
    auto a = S.coeffs(X);
    Real logQ = log(Q), AQ = A / Q;
    auto parts = parallel_blocks<BigComplex>(static_cast<size_t>(X), kBlock, [&](size_t, size_t lo, size_t hi) {
        BigComplex acc(0);
        for (size_t i = lo; i < hi; ++i) {
            long n = static_cast<long>(i) + 1;
            const QuadInt& c = (*a)[static_cast<size_t>(n)];
            if (c.is_zero()) continue;
            BigComplex qs = cexp(s * (logQ - log(Real(n))));
            acc += c.to_complex() * qs * upper_gamma(s, AQ * n);
        }
        return acc;
    });
    BigComplex sum(0);
    for (const auto& p : parts) sum += p;
    return sum;
}

struct Smoothed {
    BigComplex P, R;  // Lambda = P + W R
};

Smoothed smoothed_parts(const CMCurve& E, unsigned k, bool conjugated, const BigComplex& s, const Real& A, int D) {
    auto S = hecke_series(E, k, conjugated, true);
    auto Sd = hecke_series(E, k, !conjugated, true);
    BigComplex sd = BigComplex(Real(k + 1)) - s;
    return {smoothed_sum(*S, s, A, D), smoothed_sum(*Sd, sd, 1 / A, D)};
}

bool gamma_pole(const BigComplex& s) { return s.im == 0 && s.re <= 0 && s.re == floor(s.re); }

}  // namespace

BigComplex root_number(const CMCurve& E, unsigned k, bool conjugated, int digits) {
    static std::mutex mu;
    static std::map<std::tuple<std::string, std::string, std::string, unsigned, bool>, std::pair<int, BigComplex>> cache;
    auto key = std::make_tuple(E.label, E.A.get_str(), E.B.get_str(), k, conjugated);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end() && it->second.first >= digits) return it->second.second;
    }
    const int D = digits + kGuard;
    DigitsGuard g(D);
    // A generic point off the real line; two split points.
    BigComplex s = BigComplex(Real(k + 1) / 2 + Real("0.137"), Real("0.061"));
    Smoothed a = smoothed_parts(E, k, conjugated, s, Real(1), D);
    Smoothed b = smoothed_parts(E, k, conjugated, s, Real("1.25"), D);
    BigComplex den = b.R - a.R;
    if (den.abs() < ten_pow(-digits / 2)) throw Error(Errc::FitDegenerate, "root number fit is degenerate");
    BigComplex W = (a.P - b.P) / den;
    std::lock_guard<std::mutex> lock(mu);
    cache[key] = {digits, W};
    return W;
}

BigComplex completed_lambda(const CMCurve& E, unsigned k, bool conjugated, const BigComplex& s_in, int digits) {
    BigComplex W = root_number(E, k, conjugated, digits);
    const int D = digits + kGuard;
    DigitsGuard g(D);
    const BigComplex s = promote(s_in);
    Smoothed a = smoothed_parts(E, k, conjugated, s, Real(1), D);
    return a.P + W * a.R;
}

LValue lvalue(const CMCurve& E, unsigned k, bool conjugated, const BigComplex& s_in, int digits, const LOptions& opt) {
    if (k == 0) throw Error(Errc::InvalidArgument, "k must be at least 1");
    DigitsGuard top(digits + kGuard);
    const BigComplex s = promote(s_in);
    LValue r;
    r.k = k;
    r.s = s;
    r.conjugated = conjugated;
    r.primitive = opt.primitive;
    r.digits = digits;
    auto S = hecke_series(E, k, conjugated, opt.primitive);
    double sigma = static_cast<double>(s.re);
    bool convergent = sigma > k / 2.0 + 1 + opt.margin;
    long X = convergent ? direct_truncation(*S, sigma, digits + 2, opt.max_terms) : -1;
    LMethod m = opt.method;
    if (m == LMethod::DirectSum) {
        if (!convergent)
            throw Error(Errc::PrecisionLoss, "direct sum needs Re(s) > k/2 + 1 + " + std::to_string(opt.margin));
        if (X < 0)
            throw Error(Errc::PrecisionLoss, "tail bound cannot reach 10^-" + std::to_string(digits) + " within " +
                                                 std::to_string(opt.max_terms) + " terms");
    }
    if (m == LMethod::Auto) m = X > 0 ? LMethod::DirectSum : LMethod::ApproxFE;
    r.method = m;
    if (m == LMethod::DirectSum) {
        DigitsGuard g(digits + kGuard);
        r.value = partial_sum(*S, s, X);
        r.truncation = X;
        r.tail_log10 = direct_tail_log10(*S, sigma, X);
        return r;
    }
    BigComplex W = root_number(E, k, conjugated, digits);
    const int D = digits + kGuard;
    DigitsGuard g(D);
    Real Q = level_q(S->level());
    r.truncation = smoothed_cutoff(s, k, static_cast<double>(Q), 1.0, D);
    r.tail_log10 = -D;
    if (gamma_pole(s)) {
        // Lambda is entire and 1/Gamma vanishes: a trivial zero.
        r.value = BigComplex(0);
        return r;
    }
    Smoothed a = smoothed_parts(E, k, conjugated, s, Real(1), D);
    BigComplex lam = a.P + W * a.R;
    BigComplex v = lam / (cexp(s * log(Q)) * cgamma(s));
    if (!opt.primitive) v *= S->missing_euler_factor(s);
    r.value = v;
    return r;
}

// ---------------------------------------------------------------- functional equation

FECheck verify_functional_equation(const CMCurve& E, unsigned k, const Real& s0, int digits) {
    const int D = digits + kGuard;
    DigitsGuard g(D);
    FECheck r;
    r.k = k;
    Real c = Real(k + 1) / 2;
    r.s1 = promote(s0);
    r.s2 = s0 + Real("0.2");
    r.s3 = s0 + Real("0.45");
    if (abs(r.s1 - c) < Real("1e-6") || abs(r.s1 + r.s2 - 2 * c) < Real("1e-6") || abs(r.s3 - c) < Real("1e-6"))
        throw Error(Errc::FitDegenerate, "test points are symmetric about the center " + to_string(c, 6));
    for (const Real* sp : {&r.s1, &r.s2, &r.s3}) {
        if (gamma_pole(BigComplex(*sp)) || gamma_pole(BigComplex(Real(k + 1) - *sp)))
            throw Error(Errc::PoleAtS, "test point on a Gamma pole");
    }
    BigComplex Wc = root_number(E, k, true, digits);
    BigComplex Wp = root_number(E, k, false, digits);
    auto S = hecke_series(E, k, true, true);
    r.level = S->level();
    Real logN = log(Real(r.level));
    // Ratio Lambda_raw(conj psi^k, s) / Lambda_raw(psi^k, k+1-s); the two sides use
    // different split points so they share no partial sums.
    auto ratio = [&](const Real& s) {
        BigComplex bs(s), bd(Real(k + 1) - s);
        Smoothed L = smoothed_parts(E, k, true, bs, Real(1), D);
        Smoothed R = smoothed_parts(E, k, false, bd, Real("0.8"), D);
        BigComplex left = (L.P + Wc * L.R) * exp(-s * logN / 2);
        BigComplex right = (R.P + Wp * R.R) * exp(-(Real(k + 1) - s) * logN / 2);
        return left / right;
    };
    BigComplex R1 = ratio(r.s1), R2 = ratio(r.s2), R3 = ratio(r.s3);
    r.slope = log(R1.abs() / R2.abs()) / ((r.s1 - r.s2) * logN);
    r.offset = log(R1.abs()) / logN - r.slope * r.s1;
    r.W = R1 / R1.abs();
    r.W2_minus_1_log10 = log10_abs((r.W * r.W - BigComplex(1)).abs());
    auto resid = [&](const Real& off, const Real& slope) {
        BigComplex pred = r.W * exp((off + slope * r.s3) * logN);
        return log10_abs((R3 - pred).abs() / R3.abs());
    };
    r.residual_log10 = resid(r.offset, r.slope);
    r.fixed_form_log10 = resid(c, Real(-1));
    r.printed_form_log10 = resid(Real("0.5"), Real(-1));
    return r;
}

// ---------------------------------------------------------------- Damerell brackets

const char* variant_name(DamerellVariant v) {
    switch (v) {
        case DamerellVariant::BracketK: return "BracketK";
        case DamerellVariant::BracketQ: return "BracketQ";
        case DamerellVariant::BracketQDual: return "BracketQDual";
        case DamerellVariant::BracketDual: return "BracketDual";
        case DamerellVariant::BracketDualLiteral: return "BracketDualLiteral";
    }
    return "?";
}

DamerellVariant parse_variant(const std::string& s) {
    for (auto v : {DamerellVariant::BracketK, DamerellVariant::BracketQ, DamerellVariant::BracketQDual,
                   DamerellVariant::BracketDual, DamerellVariant::BracketDualLiteral})
        if (s == variant_name(v)) return v;
    throw Error(Errc::InvalidArgument, "unknown bracket variant '" + s + "'");
}

Bracket damerell_bracket(const CMCurve& E, unsigned k, DamerellVariant v, int digits, const mpz_class& bound) {
    Bracket b;
    b.variant = v;
    b.k = k;
    b.digits = digits;
    PeriodLattice P = periods(E, std::max(digits, 30));
    DigitsGuard g(digits + kGuard);
    LOptions opt;
    opt.primitive = false;
    auto L = [&](bool conj, long s) { return lvalue(E, k, conj, BigComplex(Real(s)), digits, opt).value; };
    BigComplex Om = cpow(P.omega, static_cast<long>(k));
    BigComplex Omb = Om.conj();
    Real Op = pow(P.omega_plus, static_cast<long>(k));
    Real two_pi = 2 * real_pi();
    Real fact = 1;
    for (unsigned i = 2; i < k; ++i) fact *= i;
    switch (v) {
        case DamerellVariant::BracketK: b.numeric = L(true, k) * L(false, k) / (Omb * Om); break;
        case DamerellVariant::BracketQ: b.numeric = L(true, k) / BigComplex(Op); break;
        case DamerellVariant::BracketQDual: b.numeric = L(false, k) / BigComplex(Op); break;
        case DamerellVariant::BracketDual:
        case DamerellVariant::BracketDualLiteral: {
            long e = v == DamerellVariant::BracketDual ? 2 * (static_cast<long>(k) - 1) : 2 * static_cast<long>(k) - 1;
            b.numeric = L(false, 1) * L(true, 1) * pow(two_pi, e) / (Om * Omb * (fact * fact));
            break;
        }
    }
    if (b.numeric.abs() < ten_pow(-(digits / 2))) {
        b.zero = true;
        b.alg.d = E.d;
        b.alg.a = 0;
        b.alg.b = 0;
        b.alg.residual = b.numeric.abs();
        b.alg.denominator_bound = bound;
        b.alg.recognized = true;
        return b;
    }
    b.alg = recognize_in_K(b.numeric, E.d, digits, bound);
    return b;
}

AlgebraicInK damerell_ratio(const CMCurve& E, unsigned k, DamerellVariant v, int digits, const mpz_class& bound) {
    Bracket b = damerell_bracket(E, k, v, digits, bound);
    if (!b.alg.recognized)
        throw Error(Errc::RecognitionFailed, std::string(variant_name(v)) + " for " + E.label + " k=" +
                                                 std::to_string(k) + ": residual " + to_string(b.alg.residual, 5) +
                                                 " at height " + bound.get_str());
    return b.alg;
}

// ---------------------------------------------------------------- valuations

long vp_int(mpz_class n, long p) {
    if (n == 0) throw Error(Errc::InvalidArgument, "valuation of 0");
    long v = 0;
    mpz_class P(p);
    while (n % P == 0) {
        n /= P;
        ++v;
    }
    return v;
}

std::string PValuation::str() const {
    if (infinite) return "inf";
    return std::to_string(p) + "^" + v.get_str();
}

PValuation padic_valuation(const mpq_class& x, long p) {
    if (!is_prime(p)) throw Error(Errc::NotPrime, std::to_string(p));
    PValuation r;
    r.p = p;
    if (x == 0) {
        r.infinite = true;
        return r;
    }
    r.v = vp_int(x.get_num(), p) - vp_int(x.get_den(), p);
    return r;
}

PValuation padic_valuation(const AlgebraicInK& x, long p) {
    if (x.b == 0) return padic_valuation(x.a, p);
    if (!is_prime(p)) throw Error(Errc::NotPrime, std::to_string(p));
    auto st = split_type(QuadField::get(x.d), p);
    if (st.kind == SplitKind::Split)
        throw Error(Errc::SplitPrimeAmbiguity, std::to_string(p) + " splits and " + x.str() + " is not rational");
    mpq_class N = x.a * x.a - mpq_class(x.d) * x.b * x.b;
    PValuation r = padic_valuation(N, p);
    r.v /= 2;
    return r;
}

}  // namespace cmlab
