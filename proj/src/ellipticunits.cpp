#include "cmlab/ellipticunits.hpp"

#include "cmlab/error.hpp"
#include "cmlab/heckel.hpp"
#include "cmlab/parallel.hpp"

#include <cmath>

namespace cmlab {

namespace {

constexpr size_t kBlock = 4;

Real tol(int digits) { return ten_pow(-digits); }

BigComplex two_pi_i() { return BigComplex(Real(0), 2 * real_pi()); }

BigComplex ordered_product(const std::vector<BigComplex>& parts) {
    BigComplex r(1);
    for (const auto& x : parts) r *= x;
    return r;
}

// prod_{i < n} fn(i), blocks multiplied left to right.
BigComplex parallel_product(size_t n, const std::function<BigComplex(size_t)>& fn) {
    auto parts = parallel_blocks<BigComplex>(n, kBlock, [&](size_t, size_t lo, size_t hi) {
        BigComplex r(1);
        for (size_t i = lo; i < hi; ++i) r *= fn(i);
        return r;
    });
    return ordered_product(parts);
}

Weierstrass make_wp(const CMCurve& E, int digits) {
    DigitsGuard g(digits + 30);
    return Weierstrass(periods(E, digits + 10));
}

void require_coprime(const UnitContext& ctx, const QuadIdeal& a, long p) {
    const CMCurve& E = ctx.curve();
    QuadIdeal six(QuadInt::from_int(E.d, 6));
    if (!coprime(a, six * E.conductor_ideal()))
        throw Error(Errc::NotCoprimeToConductor, a.str() + " is not coprime to 6f");
    if (p && !coprime(a, QuadIdeal(QuadInt::from_int(E.d, p))))
        throw Error(Errc::NotCoprimeToConductor, a.str() + " is not coprime to " + std::to_string(p));
}

Real nearest_lattice_distance(const PeriodLattice& L, const BigComplex& s) {
    BigComplex u = s / L.w1;
    Real n2 = round(u.im / L.tau.im);
    u -= L.tau * n2;
    Real n1 = round(u.re);
    u -= BigComplex(n1);
    Real best = -1;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
            Real d = ((u + BigComplex(Real(i)) + L.tau * Real(j)) * L.w1).abs();
            if (best < 0 || d < best) best = d;
        }
    return best;
}

}  // namespace

Weierstrass::Weierstrass(const PeriodLattice& L) : L_(L) {
    const int D = working_digits();
    c_ = two_pi_i() / L_.w1;
    q_ = cexp(two_pi_i() * L_.tau);
    // |q|^(m - 1/2) below 10^-(D + 10).
    double im_tau = static_cast<double>(L_.tau.im);
    size_t m_max = static_cast<size_t>(std::ceil((D + 10) * std::log(10.0) / (2 * M_PI * im_tau))) + 2;
    qpow_.resize(m_max + 1);
    qpow_[0] = BigComplex(1);
    const_ = BigComplex(Real(1) / 12);
    for (size_t m = 1; m <= m_max; ++m) {
        qpow_[m] = qpow_[m - 1] * q_;
        BigComplex t = BigComplex(1) / (BigComplex(1) - qpow_[m]);
        const_ -= Real(2) * qpow_[m] * t * t;
    }
}

WpValue Weierstrass::operator()(const BigComplex& z) const {
    const int D = working_digits();
    BigComplex u = z / L_.w1;
    u -= L_.tau * round(u.im / L_.tau.im);
    u -= BigComplex(round(u.re));
    if (u.abs() < tol(D - 10)) throw Error(Errc::PoleAtLatticePoint, "wp evaluated at a lattice point");
    BigComplex w = cexp(two_pi_i() * u);
    BigComplex wi = BigComplex(1) / w;
    // f(x) = x/(1-x)^2 and g(x) = x f'(x) = x(1+x)/(1-x)^3.
    auto fg = [](const BigComplex& x, BigComplex& f, BigComplex& g) {
        BigComplex t = BigComplex(1) / (BigComplex(1) - x);
        BigComplex t2 = t * t;
        f = x * t2;
        g = f * (BigComplex(1) + x) * t;
    };
    BigComplex S = const_, Sd;
    BigComplex f, g;
    fg(w, f, g);
    S += f;
    Sd += g;
    for (size_t m = 1; m < qpow_.size(); ++m) {
        fg(qpow_[m] * w, f, g);
        S += f;
        Sd += g;
        fg(qpow_[m] * wi, f, g);
        S += f;
        Sd -= g;
    }
    BigComplex c2 = c_ * c_;
    return {c2 * S, c2 * c_ * Sd};
}

WpValue wp(const BigComplex& z, const PeriodLattice& L) { return Weierstrass(L)(z); }

UnitContext::UnitContext(const CMCurve& E, int digits) : UnitContext(E, digits, E.cond_gen) {}

UnitContext::UnitContext(const CMCurve& E, int digits, const QuadInt& f_gen)
    : E_(E), digits_(digits), wp_(make_wp(E, digits)), f_(f_gen) {
    if (QuadIdeal(f_gen) != E.conductor_ideal())
        throw Error(Errc::InvalidArgument, f_gen.str() + " does not generate the conductor of " + E.label);
    DigitsGuard g(work_digits());
    delta_ = BigComplex(from_mpq(E.discriminant()));
    set_B(ray_class_reps(E.field(), E.conductor_ideal()));
}

void UnitContext::set_B(const std::vector<QuadIdeal>& B) {
    if (!B_.empty() && B.size() != B_.size())
        throw Error(Errc::InvalidArgument, "representative set has the wrong size");
    std::vector<QuadInt> psiB;
    for (const auto& b : B) {
        if (!coprime(b, E_.conductor_ideal()))
            throw Error(Errc::NotCoprimeToConductor, b.str() + " is not coprime to f");
        psiB.push_back(E_.psi().eval(b, 1));
    }
    B_ = B;
    psiB_ = std::move(psiB);
}

BigComplex UnitContext::P_f() const { return lattice().omega / f_.to_complex(); }

BigComplex UnitContext::point(const BigComplex& x) const { return lattice().omega * x; }

bool UnitContext::in_torsion(const QuadIdeal& a, const BigComplex& z) const {
    QuadInt alpha = canonical_generator(a.gen());
    auto [s, t] = lattice().coords(z * alpha.to_complex());
    Real eps = tol(digits_ + 10);
    return abs(s - round(s)) < eps && abs(t - round(t)) < eps;
}

const std::vector<BigComplex>& UnitContext::torsion_x(const QuadIdeal& a) const {
    QuadInt alpha = canonical_generator(a.gen());
    std::string key = alpha.str();
    {
        std::lock_guard<std::mutex> lk(cache_->mu);
        auto it = cache_->tors.find(key);
        if (it != cache_->tors.end()) return it->second;
    }
    DigitsGuard g(work_digits());
    ResidueRing R{QuadIdeal(alpha)};
    BigComplex ac = alpha.to_complex();
    std::vector<BigComplex> xs;
    for (long idx = 1; idx < R.size(); ++idx) xs.push_back(wp_(point(R.element(idx).to_complex() / ac)).wp);
    std::lock_guard<std::mutex> lk(cache_->mu);
    return cache_->tors.emplace(key, std::move(xs)).first->second;
}

BigComplex UnitContext::theta_raw(const QuadIdeal& a, const BigComplex& z) const {
    if (a.is_unit_ideal()) return BigComplex(1);
    if (in_torsion(a, z)) throw Error(Errc::EvaluationAtTorsion, "Theta evaluated on E[" + a.str() + "]");
    const auto& xs = torsion_x(a);
    BigComplex x = wp_(z).wp;
    BigComplex P(1);
    for (const auto& xt : xs) P *= x - xt;
    QuadInt alpha = canonical_generator(a.gen());
    long Na = a.norm().get_si();
    BigComplex r = cpow(delta_, Na - 1) / cpow(alpha.to_complex(), 12);
    return r / cpow(P, 6);
}

BigComplex UnitContext::lambda_raw(const QuadIdeal& a, const BigComplex& z) const {
    BigComplex Pf = P_f();
    BigComplex r(1);
    for (const auto& pb : psiB_) r *= theta_raw(a, pb.to_complex() * Pf + z);
    return r;
}

std::shared_ptr<const UnitContext> unit_context(const CMCurve& E, int digits) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const UnitContext>> cache;
    std::string key = E.label + "|" + E.A.get_str() + "|" + E.B.get_str() + "|" + std::to_string(digits);
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto ctx = std::make_shared<const UnitContext>(E, digits);
    cache.emplace(key, ctx);
    return ctx;
}

QuadIdeal tower_prime(const CMCurve& E, long p) {
    if (!is_prime(p)) throw Error(Errc::NotPrime, std::to_string(p) + " is not prime");
    if (E.bad_prime(p)) throw Error(Errc::RamifiedOrBadPrime, E.label + " has bad reduction at " + std::to_string(p));
    return split_type(E.field(), p).primes.front();
}

namespace {

// psi(P)^n for the tower prime.
QuadInt psi_tower(const UnitContext& ctx, long p, unsigned n) {
    return qpow(ctx.curve().psi().eval(tower_prime(ctx.curve(), p), 1), n);
}

BigComplex tower_z(const UnitContext& ctx, long p, unsigned n) {
    if (n == 0) return BigComplex(0);
    return ctx.lattice().omega / psi_tower(ctx, p, n).to_complex();
}

}  // namespace

TorsionPoint tower_point(const UnitContext& ctx, long p, unsigned n) {
    DigitsGuard g(ctx.work_digits());
    TorsionPoint P;
    QuadIdeal pr = tower_prime(ctx.curve(), p);
    P.order_ideal = QuadIdeal(qpow(pr.gen(), n));
    P.z = tower_z(ctx, p, n);
    if (n > 0) {
        WpValue v = ctx.weierstrass()(P.z);
        P.x = v.wp;
        P.y = v.wp_d / Real(2);
    }
    return P;
}

TorsionPoint conductor_point(const UnitContext& ctx) {
    DigitsGuard g(ctx.work_digits());
    TorsionPoint P;
    P.order_ideal = ctx.curve().conductor_ideal();
    P.z = ctx.P_f();
    WpValue v = ctx.weierstrass()(P.z);
    P.x = v.wp;
    P.y = v.wp_d / Real(2);
    return P;
}

BigComplex theta(const UnitContext& ctx, const QuadIdeal& a, const BigComplex& z) {
    DigitsGuard g(ctx.work_digits());
    return ctx.theta_raw(a, z);
}

EllipticUnitValue lambda_unit(const UnitContext& ctx, const QuadIdeal& a, const BigComplex& z) {
    require_coprime(ctx, a, 0);
    DigitsGuard g(ctx.work_digits());
    return {ctx.lambda_raw(a, z), a, "shift", ctx.digits()};
}

EllipticUnitValue eta(const UnitContext& ctx, const QuadIdeal& a, long p, unsigned n) {
    require_coprime(ctx, a, p);
    DigitsGuard g(ctx.work_digits());
    BigComplex v = ctx.lambda_raw(a, tower_z(ctx, p, n));
    if (v.abs() < tol(ctx.digits())) throw Error(Errc::ZeroValue, "eta vanishes numerically");
    return {v, a, "n=" + std::to_string(n) + ", p=" + std::to_string(p), ctx.digits()};
}

UnitRelation verify_unit_relation(const UnitContext& ctx, const QuadIdeal& a, const QuadIdeal& b, long p,
                                  unsigned n) {
    require_coprime(ctx, a, p);
    require_coprime(ctx, b, p);
    if (a != b && !coprime(a, b)) throw Error(Errc::InvalidArgument, a.str() + " and " + b.str() + " are not coprime");
    DigitsGuard g(ctx.work_digits());
    const auto& psi = ctx.curve().psi();
    BigComplex Pn = tower_z(ctx, p, n);
    auto side = [&](const QuadIdeal& x, const QuadIdeal& y) {
        BigComplex moved = ctx.lambda_raw(x, psi.eval(y, 1).to_complex() * Pn);
        BigComplex base = ctx.lambda_raw(x, Pn);
        return moved / cpow(base, y.norm().get_si());
    };
    UnitRelation r;
    r.lhs = side(a, b);
    r.rhs = side(b, a);
    r.residual = (r.lhs / r.rhs - BigComplex(1)).abs();
    return r;
}

NormCheck norm_compatibility(const UnitContext& ctx, const QuadIdeal& a, long p, unsigned n) {
    require_coprime(ctx, a, p);
    QuadInt pi = tower_prime(ctx.curve(), p).gen();
    QuadInt pn = qpow(pi, n);
    ResidueRing R{QuadIdeal(qpow(pi, n + 1))};
    std::vector<QuadInt> us;
    for (long idx = 0; idx < R.size(); ++idx) {
        QuadInt u = R.element(idx);
        if (R.is_unit(u) && divides(pn, u - QuadInt::from_int(u.d, 1))) us.push_back(u);
    }
    ctx.torsion_x(a);
    DigitsGuard g(ctx.work_digits());
    BigComplex Pn1 = tower_z(ctx, p, n + 1);
    NormCheck c;
    c.n = n;
    c.terms = static_cast<long>(us.size());
    c.product = parallel_product(us.size(), [&](size_t i) { return ctx.lambda_raw(a, us[i].to_complex() * Pn1); });
    c.target = ctx.lambda_raw(a, tower_z(ctx, p, n));
    c.residual = (c.product / c.target - BigComplex(1)).abs();
    c.residual_one = (c.product - BigComplex(1)).abs();
    c.holds = c.residual < tol(ctx.digits() / 2);
    return c;
}

BigComplex eta_norm_product(const UnitContext& ctx, const QuadIdeal& a, long p, unsigned n, long* terms) {
    require_coprime(ctx, a, p);
    QuadInt pi = tower_prime(ctx.curve(), p).gen();
    ResidueRing R{QuadIdeal(qpow(pi, n))};
    std::vector<QuadInt> us;
    for (long idx = 0; idx < R.size(); ++idx)
        if (R.is_unit(R.element(idx))) us.push_back(R.element(idx));
    if (terms) *terms = static_cast<long>(us.size());
    ctx.torsion_x(a);
    DigitsGuard g(ctx.work_digits());
    BigComplex Pn = tower_z(ctx, p, n);
    return parallel_product(us.size(), [&](size_t i) { return ctx.lambda_raw(a, us[i].to_complex() * Pn); });
}

size_t cauchy_points(unsigned k, int digits) {
    size_t want = 4 * (k + static_cast<size_t>(digits) / 4), M = 1;
    while (M < want) M *= 2;
    return M;
}

CWDerivative cw_derivative(const UnitContext& ctx, const QuadIdeal& a, unsigned k, const Real& r_in) {
    if (k == 0) throw Error(Errc::InvalidArgument, "k must be positive");
    require_coprime(ctx, a, 0);
    ctx.torsion_x(a);
    DigitsGuard g(ctx.work_digits());
    const PeriodLattice& L = ctx.lattice();

    // Zeros and poles of Lambda_a(z): z = -psi(b) P_f + T with T in E[a].
    QuadInt alpha = canonical_generator(a.gen());
    ResidueRing Ra{QuadIdeal(alpha)};
    BigComplex Pf = ctx.P_f();
    Real dist = -1;
    for (const auto& pb : ctx.psi_B())
        for (long idx = 0; idx < Ra.size(); ++idx) {
            BigComplex T = ctx.point(Ra.element(idx).to_complex() / alpha.to_complex());
            Real d = nearest_lattice_distance(L, T - pb.to_complex() * Pf);
            if (dist < 0 || d < dist) dist = d;
        }

    CWDerivative out;
    out.k = k;
    out.singular_distance = dist;
    out.radius = r_in > 0 ? r_in : dist / 10;
    if (out.radius >= dist) throw Error(Errc::RadiusTooLarge, "Cauchy circle meets a zero or pole of Lambda");
    const size_t M = cauchy_points(k, ctx.digits());
    out.points = M;

    std::vector<BigComplex> roots(M);
    Real two_pi = 2 * real_pi();
    for (size_t j = 0; j < M; ++j) roots[j] = polar(Real(1), two_pi * Real(j) / Real(M));
    auto parts = parallel_blocks<std::vector<BigComplex>>(M, kBlock, [&](size_t, size_t lo, size_t hi) {
        std::vector<BigComplex> v;
        for (size_t j = lo; j < hi; ++j) v.push_back(ctx.lambda_raw(a, roots[j] * out.radius));
        return v;
    });
    std::vector<BigComplex> F;
    for (auto& p : parts) F.insert(F.end(), p.begin(), p.end());

    // Taylor coefficients by the trapezoidal rule, then the log series.
    std::vector<BigComplex> c(k + 1);
    Real rn(1);
    for (unsigned n = 0; n <= k; ++n) {
        BigComplex s;
        for (size_t j = 0; j < M; ++j) s += F[j] * roots[(M - (j * n) % M) % M];
        c[n] = s / (Real(M) * rn);
        rn *= out.radius;
    }
    if (c[0].abs() < tol(ctx.digits())) throw Error(Errc::PrecisionLoss, "Lambda vanishes at the origin");
    std::vector<BigComplex> b(k + 1), l(k + 1);
    for (unsigned n = 0; n <= k; ++n) b[n] = c[n] / c[0];
    for (unsigned n = 1; n <= k; ++n) {
        BigComplex s = b[n] * Real(n);
        for (unsigned m = 1; m < n; ++m) s -= l[m] * b[n - m] * Real(m);
        l[n] = s / Real(n);
    }
    l[0] = clog(c[0]);
    out.log_coeffs = l;
    // k! l_k / (k-1)!
    out.value = l[k] * Real(k);
    return out;
}

Reciprocity verify_cw_reciprocity(const UnitContext& ctx, const QuadIdeal& a, unsigned k, long p) {
    require_coprime(ctx, a, p);
    const CMCurve& E = ctx.curve();
    Reciprocity r;
    r.k = k;
    r.lhs = cw_derivative(ctx, a, k).value;
    DigitsGuard g(ctx.work_digits());
    QuadInt fac = QuadInt::from_int(E.d, a.norm()) - E.psi().eval(a, k);
    r.factor = fac.to_complex();
    BigComplex pre = cpow(ctx.f().to_complex(), k) * r.factor * Real(k % 2 == 1 ? 12 : -12) /
                     cpow(ctx.lattice().omega, k);
    if (fac.is_zero()) {
        r.rhs = r.rhs_primitive = BigComplex(0);
    } else {
        LOptions opt;
        opt.primitive = false;
        r.rhs = pre * lvalue(E, k, true, BigComplex(Real(k)), ctx.digits(), opt).value;
        opt.primitive = true;
        r.rhs_primitive = pre * lvalue(E, k, true, BigComplex(Real(k)), ctx.digits(), opt).value;
    }
    Real tiny = tol(ctx.digits() / 2);
    auto resid = [&](const BigComplex& rhs) {
        if (rhs.abs() < tiny) return (r.lhs - rhs).abs();
        return (r.lhs / rhs - BigComplex(1)).abs();
    };
    r.rhs_vanishes = r.rhs.abs() < tiny;
    r.residual = resid(r.rhs);
    r.residual_primitive = resid(r.rhs_primitive);
    Real bound = tol(ctx.digits() / 3);
    bool i = r.residual < bound, pr = r.residual_primitive < bound;
    r.matches = i && pr ? "both" : i ? "imprimitive" : pr ? "primitive" : "neither";
    return r;
}

}  // namespace cmlab
