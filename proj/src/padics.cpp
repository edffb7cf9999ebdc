#include "cmlab/padics.hpp"

#include "cmlab/error.hpp"
#include "cmlab/quadfield.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

namespace cmlab {

namespace {

int vp_mpz(const mpz_class& x, long p, int cap) {
    if (x == 0) return cap;
    mpz_class t = x;
    int v = 0;
    while (v < cap && mpz_divisible_ui_p(t.get_mpz_t(), static_cast<unsigned long>(p))) {
        mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(p));
        ++v;
    }
    return v;
}

mpz_class zpow(long p, long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e));
    return r;
}

}  // namespace

const PadicCtx* padic_ctx(long p, int N) {
    if (p < 3 || !is_prime(p)) throw Error(Errc::NotPrime, "p-adic context needs an odd prime, got " + std::to_string(p));
    if (N < 1) throw Error(Errc::InvalidArgument, "p-adic precision must be >= 1");
    static std::mutex mu;
    static std::map<std::pair<long, int>, std::unique_ptr<PadicCtx>> table;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = table[{p, N}];
    if (!slot) {
        auto c = std::make_unique<PadicCtx>();
        c->p = p;
        c->N = N;
        c->pN = zpow(p, N);
        long r = 2;
        while (legendre(r, p) != -1) ++r;
        c->c = r;
        slot = std::move(c);
    }
    return slot.get();
}

// ---- PadicElem

PadicElem::PadicElem(const PadicCtx* ctx, const mpz_class& a, const mpz_class& b) : ctx_(ctx), a_(a), b_(b) {
    reduce();
}

PadicElem PadicElem::from_int(const PadicCtx* ctx, long a, long b) { return PadicElem(ctx, mpz_class(a), mpz_class(b)); }

PadicElem PadicElem::from_mpq(const PadicCtx* ctx, const mpq_class& q) {
    mpz_class den = q.get_den();
    if (mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(ctx->p)))
        throw Error(Errc::NonUnit, "denominator of " + q.get_str() + " is divisible by p");
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), ctx->pN.get_mpz_t());
    return PadicElem(ctx, q.get_num() * inv);
}

void PadicElem::reduce() {
    a_ %= ctx_->pN;
    if (a_ < 0) a_ += ctx_->pN;
    b_ %= ctx_->pN;
    if (b_ < 0) b_ += ctx_->pN;
}

void PadicElem::check_same(const PadicElem& o) const {
    if (ctx_ != o.ctx_) throw Error(Errc::InvalidArgument, "p-adic elements from different contexts");
}

int PadicElem::valuation() const {
    return std::min(vp_mpz(a_, ctx_->p, ctx_->N), vp_mpz(b_, ctx_->p, ctx_->N));
}

PadicElem PadicElem::frob() const { return PadicElem(ctx_, a_, -b_); }

PadicElem PadicElem::norm() const { return PadicElem(ctx_, a_ * a_ - ctx_->c * b_ * b_); }

PadicElem PadicElem::inv() const {
    if (valuation() != 0) throw Error(Errc::NonUnit, "inverse of a non-unit " + str());
    mpz_class n = (a_ * a_ - ctx_->c * b_ * b_) % ctx_->pN, ni;
    if (n < 0) n += ctx_->pN;
    mpz_invert(ni.get_mpz_t(), n.get_mpz_t(), ctx_->pN.get_mpz_t());
    return PadicElem(ctx_, a_ * ni, -b_ * ni);
}

PadicElem PadicElem::pow(long e) const {
    if (e < 0) return inv().pow(-e);
    PadicElem r(ctx_, 1), b = *this;
    while (e > 0) {
        if (e & 1) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return r;
}

PadicElem PadicElem::to_ctx(const PadicCtx* ctx) const {
    if (ctx->p != ctx_->p) throw Error(Errc::InvalidArgument, "context change across primes");
    return PadicElem(ctx, a_, b_);
}

PadicElem PadicElem::div_p_pow(int k) const {
    if (k < 0 || k > ctx_->N) throw Error(Errc::InvalidArgument, "div_p_pow exponent out of range");
    if (k == 0) return *this;
    if (valuation() < k) throw Error(Errc::NonUnit, str() + " is not divisible by p^" + std::to_string(k));
    mpz_class q = zpow(ctx_->p, k);
    mpz_class a, b;
    mpz_divexact(a.get_mpz_t(), a_.get_mpz_t(), q.get_mpz_t());
    mpz_divexact(b.get_mpz_t(), b_.get_mpz_t(), q.get_mpz_t());
    return PadicElem(ctx_, a, b);
}

PadicElem PadicElem::div_exact(const PadicElem& y) const {
    check_same(y);
    if (y.is_zero()) throw Error(Errc::NonUnit, "division by zero");
    int m = y.valuation();
    if (valuation() < m) throw Error(Errc::NonUnit, "quotient is not integral");
    return div_p_pow(m) * y.div_p_pow(m).inv();
}

PadicElem PadicElem::operator-() const { return PadicElem(ctx_, -a_, -b_); }

PadicElem& PadicElem::operator+=(const PadicElem& o) {
    check_same(o);
    a_ += o.a_;
    b_ += o.b_;
    if (a_ >= ctx_->pN) a_ -= ctx_->pN;
    if (b_ >= ctx_->pN) b_ -= ctx_->pN;
    return *this;
}

PadicElem& PadicElem::operator-=(const PadicElem& o) {
    check_same(o);
    a_ -= o.a_;
    b_ -= o.b_;
    if (a_ < 0) a_ += ctx_->pN;
    if (b_ < 0) b_ += ctx_->pN;
    return *this;
}

PadicElem& PadicElem::operator*=(const PadicElem& o) {
    check_same(o);
    if (b_ == 0 && o.b_ == 0) {
        a_ *= o.a_;
        a_ %= ctx_->pN;
        return *this;
    }
    mpz_class a = a_ * o.a_ + ctx_->c * b_ * o.b_;
    mpz_class b = a_ * o.b_ + b_ * o.a_;
    a_ = a;
    b_ = b;
    reduce();
    return *this;
}

bool PadicElem::operator==(const PadicElem& o) const { return ctx_ == o.ctx_ && a_ == o.a_ && b_ == o.b_; }

std::string PadicElem::str() const {
    if (b_ == 0) return a_.get_str();
    return a_.get_str() + " + " + b_.get_str() + "*s";
}

// ---- PadicSeries

PadicSeries::PadicSeries(const PadicCtx* ctx, size_t M, int denom)
    : ctx_(ctx), c_(M, PadicElem(ctx, 0)), denom_(denom) {}

PadicSeries::PadicSeries(std::vector<PadicElem> coeffs, int denom) : c_(std::move(coeffs)), denom_(denom) {
    if (c_.empty()) throw Error(Errc::InvalidArgument, "empty series");
    ctx_ = c_[0].ctx();
}

PadicSeries PadicSeries::variable(const PadicCtx* ctx, size_t M) {
    if (M < 2) throw Error(Errc::TruncationTooShort, "w needs truncation >= 2");
    PadicSeries s(ctx, M);
    s.c_[1] = PadicElem(ctx, 1);
    return s;
}

PadicSeries PadicSeries::constant(const PadicElem& x, size_t M) {
    PadicSeries s(x.ctx(), M);
    s.c_[0] = x;
    return s;
}

bool PadicSeries::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const PadicElem& x) { return x.is_zero(); });
}

int PadicSeries::min_valuation() const {
    int v = ctx_->N;
    for (const auto& x : c_) v = std::min(v, x.valuation());
    return v;
}

PadicSeries PadicSeries::with_denom(int denom) const {
    PadicSeries r = *this;
    r.denom_ = denom;
    if (denom > denom_) {
        PadicElem f(ctx_, zpow(ctx_->p, denom - denom_));
        for (auto& x : r.c_) x *= f;
    } else if (denom < denom_) {
        for (auto& x : r.c_) x = x.div_p_pow(denom_ - denom);
    }
    return r;
}

PadicSeries PadicSeries::normalized() const {
    if (denom_ <= 0) return *this;
    return with_denom(denom_ - std::min(denom_, min_valuation()));
}

PadicSeries PadicSeries::integral() const {
    if (denom_ <= 0) return with_denom(0);
    if (min_valuation() < denom_)
        throw Error(Errc::IntegralityFailure, "series has p^" + std::to_string(denom_ - min_valuation()) +
                                                   " in a denominator");
    return with_denom(0);
}

PadicSeries PadicSeries::to_ctx(const PadicCtx* ctx) const {
    PadicSeries r = *this;
    r.ctx_ = ctx;
    for (auto& x : r.c_) x = x.to_ctx(ctx);
    return r;
}

PadicSeries PadicSeries::truncated(size_t M) const {
    PadicSeries r = *this;
    r.c_.resize(M, PadicElem(ctx_, 0));
    return r;
}

PadicSeries PadicSeries::operator-() const {
    PadicSeries r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

PadicSeries PadicSeries::operator+(const PadicSeries& o) const {
    int d = std::max(denom_, o.denom_);
    PadicSeries a = with_denom(d), b = o.with_denom(d);
    size_t M = std::min(a.size(), b.size());
    a.c_.resize(M);
    for (size_t i = 0; i < M; ++i) a.c_[i] += b.c_[i];
    return a;
}

PadicSeries PadicSeries::operator-(const PadicSeries& o) const { return *this + (-o); }

PadicSeries PadicSeries::operator*(const PadicSeries& o) const {
    if (ctx_ != o.ctx_) throw Error(Errc::InvalidArgument, "series from different contexts");
    size_t M = std::min(size(), o.size());
    PadicSeries r(ctx_, M, denom_ + o.denom_);
    bool quad = std::any_of(c_.begin(), c_.begin() + static_cast<long>(M), [](const PadicElem& x) { return !x.in_Zp(); }) ||
                std::any_of(o.c_.begin(), o.c_.begin() + static_cast<long>(M), [](const PadicElem& x) { return !x.in_Zp(); });
    // Accumulate without reduction, reduce once per coefficient.
    mpz_class A, B, C;
    for (size_t k = 0; k < M; ++k) {
        A = 0;
        B = 0;
        C = 0;
        for (size_t i = 0; i <= k; ++i) {
            const PadicElem &x = c_[i], &y = o.c_[k - i];
            mpz_addmul(A.get_mpz_t(), x.a().get_mpz_t(), y.a().get_mpz_t());
            if (quad) {
                mpz_addmul(C.get_mpz_t(), x.b().get_mpz_t(), y.b().get_mpz_t());
                mpz_addmul(B.get_mpz_t(), x.a().get_mpz_t(), y.b().get_mpz_t());
                mpz_addmul(B.get_mpz_t(), x.b().get_mpz_t(), y.a().get_mpz_t());
            }
        }
        if (quad) A += ctx_->c * C;
        r.c_[k] = PadicElem(ctx_, A, B);
    }
    return r;
}

PadicSeries PadicSeries::operator*(const PadicElem& x) const {
    PadicSeries r = *this;
    for (auto& y : r.c_) y *= x;
    return r;
}

bool PadicSeries::operator==(const PadicSeries& o) const {
    if (ctx_ != o.ctx_ || size() != o.size()) return false;
    int d = std::max(denom_, o.denom_);
    return with_denom(d).c_ == o.with_denom(d).c_;
}

PadicSeries PadicSeries::derivative() const {
    if (size() < 2) throw Error(Errc::TruncationTooShort, "derivative of a constant-length series");
    PadicSeries r(ctx_, size() - 1, denom_);
    for (size_t n = 1; n < size(); ++n) r.c_[n - 1] = c_[n] * PadicElem::from_int(ctx_, static_cast<long>(n));
    return r;
}

PadicSeries PadicSeries::integrate() const {
    const long p = ctx_->p;
    int E = 0;
    for (size_t n = 1; n <= size(); ++n) E = std::max(E, vp_mpz(mpz_class(static_cast<unsigned long>(n)), p, 64));
    PadicSeries r(ctx_, size() + 1, denom_ + E);
    for (size_t n = 1; n <= size(); ++n) {
        mpz_class m(static_cast<unsigned long>(n));
        int v = vp_mpz(m, p, 64);
        mpz_class u = m / zpow(p, v);
        PadicElem f = PadicElem(ctx_, zpow(p, E - v)) * PadicElem(ctx_, u).inv();
        r.c_[n] = c_[n - 1] * f;
    }
    return r;
}

PadicSeries PadicSeries::frob() const {
    PadicSeries r = *this;
    for (auto& x : r.c_) x = x.frob();
    return r;
}

PadicSeries PadicSeries::inverse() const {
    PadicSeries f = normalized();
    if (f.denom_ != 0 || !f.c_[0].is_unit())
        throw Error(Errc::NonUnitConstantTerm, "series inverse needs a unit constant term");
    size_t M = size();
    PadicSeries r(ctx_, M);
    PadicElem b0 = f.c_[0].inv();
    r.c_[0] = b0;
    for (size_t n = 1; n < M; ++n) {
        PadicElem s(ctx_, 0);
        for (size_t i = 1; i <= n; ++i) s += f.c_[i] * r.c_[n - i];
        r.c_[n] = -(b0 * s);
    }
    return r;
}

PadicSeries PadicSeries::compose(const PadicSeries& g) const {
    if (!g.c_[0].is_zero()) throw Error(Errc::InvalidArgument, "composition needs g(0) = 0");
    size_t M = std::min(size(), g.size());
    PadicSeries gg = g.truncated(M);
    // Horner from the top; g^n only reaches degrees >= n.
    PadicSeries r = PadicSeries::constant(c_[M - 1], M);
    r.denom_ = denom_;
    for (size_t n = M - 1; n-- > 0;) {
        r = r * gg;
        PadicSeries cn = PadicSeries::constant(c_[n], M);
        cn.denom_ = denom_;
        r = r + cn;
    }
    return r.normalized();
}

// ---- lifting

PadicElem teichmuller(const PadicElem& x0) {
    if (x0.valuation() != 0) throw Error(Errc::NonUnit, "Teichmuller lift of a non-unit residue");
    long q = x0.in_Zp() ? x0.p() : x0.p() * x0.p();
    PadicElem x = x0;
    for (int i = 0; i < x0.N(); ++i) x = x.pow(q);
    return x;
}

PadicElem teichmuller(long x0, long p, int N) { return teichmuller(PadicElem::from_int(padic_ctx(p, N), x0)); }

PadicElem poly_eval(const std::vector<PadicElem>& f, const PadicElem& x) {
    if (f.empty()) return PadicElem(x.ctx(), 0);
    PadicElem r = f.back();
    for (size_t i = f.size() - 1; i-- > 0;) r = r * x + f[i];
    return r;
}

PadicElem hensel_root(const std::vector<PadicElem>& f, const PadicElem& x0) {
    const PadicCtx* ctx = x0.ctx();
    std::vector<PadicElem> df;
    for (size_t i = 1; i < f.size(); ++i) df.push_back(f[i] * PadicElem::from_int(ctx, static_cast<long>(i)));
    PadicElem fx = poly_eval(f, x0), dfx = poly_eval(df, x0);
    if (dfx.is_zero()) throw Error(Errc::HenselFails, "f'(x0) vanishes");
    int vd = dfx.valuation();
    if (fx.valuation() <= 2 * vd) throw Error(Errc::HenselFails, "|f(x0)| is not below |f'(x0)|^2");
    // Newton loses vd digits per division; run with guard digits and reduce.
    const PadicCtx* big = padic_ctx(ctx->p, ctx->N + 2 * vd + 2);
    std::vector<PadicElem> F, DF;
    for (const auto& c : f) F.push_back(c.to_ctx(big));
    for (const auto& c : df) DF.push_back(c.to_ctx(big));
    PadicElem x = x0.to_ctx(big);
    for (int it = 0; it < 4 * big->N + 8; ++it) {
        PadicElem fv = poly_eval(F, x);
        if (fv.is_zero()) break;
        x -= fv.div_exact(poly_eval(DF, x));
    }
    PadicElem r = x.to_ctx(ctx);
    if (!poly_eval(f, r).is_zero()) throw Error(Errc::HenselFails, "Newton iteration did not converge");
    return r;
}

PadicSeries dlog(const PadicSeries& g) {
    PadicSeries h = g.normalized();
    if (h.denom() != 0 || !h[0].is_unit()) throw Error(Errc::NonUnitConstantTerm, "dlog needs a unit constant term");
    PadicSeries d = h.derivative();
    return d * h.truncated(d.size()).inverse();
}

PadicSeries revert(const PadicSeries& f0) {
    PadicSeries f = f0.normalized();
    if (f.denom() != 0) throw Error(Errc::NotReversible, "series is not integral");
    if (f.size() < 2 || !f[0].is_zero() || !f[1].is_unit())
        throw Error(Errc::NotReversible, "need f(0) = 0 and a unit linear coefficient");
    const PadicCtx* ctx = f.ctx();
    size_t M = f.size();
    PadicSeries w = PadicSeries::variable(ctx, M);
    PadicSeries g = w * f[1].inv();
    PadicSeries df = f.derivative().truncated(M);
    // Newton: g <- g - (f(g) - w) / f'(g); correct to 2^i + 1 terms after step i.
    for (size_t have = 1; have < 2 * M; have *= 2) {
        PadicSeries err = f.compose(g) - w;
        g = g - err * df.compose(g).inverse();
    }
    return g;
}

long vp_factorial(long n, long p) {
    long v = 0;
    for (long q = p; q <= n; q *= p) {
        v += n / q;
        if (q > n / p) break;
    }
    return v;
}

}  // namespace cmlab
