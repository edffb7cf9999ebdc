#include "cmlab/quadfield.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace cmlab {

namespace {

const std::vector<int> kDiscriminants = {-3, -4, -7, -8, -11, -19, -43, -67, -163};

mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

mpz_class mod_pos(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

}  // namespace

// ---------------------------------------------------------------- field

QuadField::QuadField(int d) : d_(d) {
    n_ = mpz_class((static_cast<long>(d) * d - d) / 4);
    units_.push_back(QuadInt(d, 1, 0));
    units_.push_back(QuadInt(d, -1, 0));
    if (d == -4 || d == -3) {
        QuadInt z(d, 2, 1);  // i, or a primitive sixth root of unity
        units_.push_back(z);
        units_.push_back(-z);
        if (d == -3) {
            QuadInt z2 = z * z;
            units_.push_back(z2);
            units_.push_back(-z2);
        }
    }
}

const QuadField& QuadField::get(int d) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<QuadField>> fields;
    if (std::find(kDiscriminants.begin(), kDiscriminants.end(), d) == kDiscriminants.end())
        throw Error(Errc::UnknownField, "d_K=" + std::to_string(d) + " is not a class-number-one discriminant");
    std::lock_guard<std::mutex> lock(mu);
    auto it = fields.find(d);
    if (it == fields.end()) it = fields.emplace(d, std::unique_ptr<QuadField>(new QuadField(d))).first;
    return *it->second;
}

const std::vector<int>& QuadField::discriminants() { return kDiscriminants; }

// ---------------------------------------------------------------- elements

const QuadField& QuadInt::field() const { return QuadField::get(d); }

QuadInt QuadInt::conj() const { return QuadInt(d, a + b * d, -b); }

mpz_class QuadInt::norm() const {
    mpz_class n((static_cast<long>(d) * d - d) / 4);
    return a * a + a * b * d + b * b * n;
}

mpz_class QuadInt::trace() const { return 2 * a + b * d; }

BigComplex QuadInt::to_complex() const {
    Real s = sqrt(Real(-d));
    Real re = from_mpz(a) + from_mpz(b) * Real(d) / 2;
    Real im = from_mpz(b) * s / 2;
    return {re, im};
}

std::string QuadInt::str() const {
    // Printed in terms of i for d=-4 and sqrt(d) otherwise, as (x + y*sqrt(d))/2.
    if (d == -4) {
        mpz_class re = a - 2 * b, im = b;
        if (im == 0) return re.get_str();
        std::string s = re == 0 ? "" : re.get_str();
        std::string ims = im == 1 ? "i" : im == -1 ? "-i" : im.get_str() + "i";
        if (re != 0 && im > 0) s += "+";
        return s + ims;
    }
    mpz_class x = 2 * a + b * d, y = b;
    if (y == 0) return mpz_class(x / 2).get_str();
    std::string rad = "sqrt(" + std::to_string(d) + ")";
    if (x % 2 == 0 && y % 2 == 0) {
        mpz_class xr = x / 2, yr = y / 2;
        std::string s = xr == 0 ? "" : xr.get_str();
        if (xr != 0 && yr > 0) s += "+";
        s += (yr == 1 ? "" : yr == -1 ? "-" : yr.get_str() + "*") + rad;
        return s;
    }
    std::string s = "(" + x.get_str();
    s += (y > 0 ? "+" : "") + (y == 1 ? "" : y == -1 ? "-" : y.get_str() + "*") + rad + ")/2";
    return s;
}

bool operator==(const QuadInt& x, const QuadInt& y) { return x.d == y.d && x.a == y.a && x.b == y.b; }

QuadInt operator+(const QuadInt& x, const QuadInt& y) { return QuadInt(x.d, x.a + y.a, x.b + y.b); }
QuadInt operator-(const QuadInt& x, const QuadInt& y) { return QuadInt(x.d, x.a - y.a, x.b - y.b); }
QuadInt operator-(const QuadInt& x) { return QuadInt(x.d, -x.a, -x.b); }

QuadInt operator*(const QuadInt& x, const QuadInt& y) {
    mpz_class n((static_cast<long>(x.d) * x.d - x.d) / 4);
    mpz_class be = x.b * y.b;
    return QuadInt(x.d, x.a * y.a - be * n, x.a * y.b + x.b * y.a + be * x.d);
}

QuadInt qpow(const QuadInt& x, unsigned long k) {
    QuadInt r(x.d, 1, 0), base = x;
    while (k) {
        if (k & 1) r = r * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return r;
}

bool divides(const QuadInt& y, const QuadInt& x) {
    if (y.is_zero()) return x.is_zero();
    mpz_class n = y.norm();
    QuadInt t = x * y.conj();
    return mpz_divisible_p(t.a.get_mpz_t(), n.get_mpz_t()) && mpz_divisible_p(t.b.get_mpz_t(), n.get_mpz_t());
}

QuadInt exact_div(const QuadInt& x, const QuadInt& y) {
    if (y.is_zero()) throw Error(Errc::InvalidArgument, "division by zero");
    mpz_class n = y.norm();
    QuadInt t = x * y.conj();
    if (!mpz_divisible_p(t.a.get_mpz_t(), n.get_mpz_t()) || !mpz_divisible_p(t.b.get_mpz_t(), n.get_mpz_t()))
        throw Error(Errc::InvalidArgument, "inexact division " + x.str() + " / " + y.str());
    return QuadInt(x.d, t.a / n, t.b / n);
}

bool quad_less(const QuadInt& x, const QuadInt& y) {
    mpz_class nx = x.norm(), ny = y.norm();
    if (nx != ny) return nx < ny;
    mpz_class rx = x.twice_real(), ry = y.twice_real();
    if (rx != ry) return rx > ry;
    return x.b > y.b;
}

QuadInt parse_quad_int(int d, const std::string& text) {
    auto bad = [&](const std::string& why) {
        return Error(Errc::InvalidArgument, "cannot parse '" + text + "' in Q(sqrt(" + std::to_string(d) + ")): " + why);
    };
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    bool half = false;
    if (s.size() > 4 && s.front() == '(' && s.compare(s.size() - 3, 3, ")/2") == 0) {
        s = s.substr(1, s.size() - 4);
        half = true;
    } else if (s.size() > 2 && s.front() == '(' && s.back() == ')') {
        s = s.substr(1, s.size() - 2);
    }
    if (s.empty()) throw bad("empty");
    const std::string rad = "sqrt(" + std::to_string(d) + ")";
    // value = (X + Y sqrt(d)) / 2
    mpz_class X = 0, Y = 0;
    size_t i = 0;
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1 : 1;
            ++i;
        } else if (i > 0) {
            throw bad("expected + or -");
        }
        size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        mpz_class coef = 1;
        bool has_coef = j > i;
        if (has_coef) coef = mpz_class(s.substr(i, j - i));
        i = j;
        if (has_coef && i < s.size() && s[i] == '*') ++i;
        coef *= sign;
        if (i < s.size() && s[i] == 'i') {
            if (d != -4) throw bad("i only exists for d = -4");
            Y += coef;
            ++i;
        } else if (i < s.size() && s[i] == 'w') {
            X += coef * d;
            Y += coef;
            ++i;
        } else if (s.compare(i, rad.size(), rad) == 0) {
            Y += 2 * coef;
            i += rad.size();
        } else if (has_coef && (i == s.size() || s[i] == '+' || s[i] == '-')) {
            X += 2 * coef;
        } else {
            throw bad("unexpected '" + s.substr(i, 1) + "'");
        }
    }
    if (half) {
        if (X % 2 != 0 || Y % 2 != 0) throw bad("not integral");
        X /= 2;
        Y /= 2;
    }
    // X = 2a + b d, Y = b
    mpz_class b = Y, twice_a = X - b * d;
    if (twice_a % 2 != 0) throw bad("not integral");
    return QuadInt(d, twice_a / 2, b);
}

QuadInt canonical_generator(const QuadInt& x) {
    const auto& units = x.field().units();
    QuadInt best = x;
    for (const auto& u : units) {
        QuadInt c = x * u;
        mpz_class rc = c.twice_real(), rb = best.twice_real();
        if (rc > rb || (rc == rb && c.b > best.b)) best = c;
    }
    return best;
}

// ---------------------------------------------------------------- ideals

QuadIdeal::QuadIdeal(const QuadInt& g) : gen_(canonical_generator(g)) {}

QuadIdeal QuadIdeal::unit(int d) { return QuadIdeal(QuadInt(d, 1, 0)); }

bool operator==(const QuadIdeal& I, const QuadIdeal& J) { return I.gen() == J.gen(); }

QuadIdeal operator*(const QuadIdeal& I, const QuadIdeal& J) { return QuadIdeal(I.gen() * J.gen()); }

bool ideal_less(const QuadIdeal& I, const QuadIdeal& J) { return quad_less(I.gen(), J.gen()); }

std::vector<QuadInt> gens_mod_units(const QuadIdeal& I) {
    if (I.gen().is_zero()) throw Error(Errc::ZeroIdeal, "zero ideal has no generators");
    std::vector<QuadInt> out;
    for (const auto& u : I.gen().field().units()) out.push_back(I.gen() * u);
    return out;
}

// ---------------------------------------------------------------- primes

bool is_prime(long p) {
    if (p < 2) return false;
    if (p < 4) return true;
    if (p % 2 == 0) return false;
    for (long q = 3; q * q <= p; q += 2)
        if (p % q == 0) return false;
    return true;
}

long legendre(long a, long p) {
    mpz_class A(a), P(p);
    return mpz_legendre(A.get_mpz_t(), P.get_mpz_t());
}

namespace {

// An element of norm m, or zero if none exists.
QuadInt element_of_norm(const QuadField& K, long m) {
    const long d = K.d();
    const long ad = -d;
    // 4m = (2a + b d)^2 + b^2 |d|
    long bmax = static_cast<long>(std::sqrt(4.0 * m / ad)) + 1;
    for (long b = 0; b <= bmax; ++b) {
        long rest = 4 * m - b * b * ad;
        if (rest < 0) break;
        long t = static_cast<long>(std::llround(std::sqrt(static_cast<double>(rest))));
        while (t * t > rest) --t;
        while ((t + 1) * (t + 1) <= rest) ++t;
        if (t * t != rest) continue;
        long twoa = t - b * d;
        if (twoa % 2 != 0) continue;
        return QuadInt(d, twoa / 2, b);
    }
    return QuadInt(d, 0, 0);
}

}  // namespace

SplitType split_type(const QuadField& K, long p) {
    if (!is_prime(p)) throw Error(Errc::NotPrime, std::to_string(p) + " is not prime");
    const long d = K.d();
    SplitType st;
    st.p = p;
    if (d % p == 0) {
        st.kind = SplitKind::Ramified;
        st.primes.push_back(QuadIdeal(element_of_norm(K, p)));
        return st;
    }
    bool split;
    if (p == 2) {
        long r = ((d % 8) + 8) % 8;
        split = (r == 1);
    } else {
        split = legendre(d, p) == 1;
    }
    if (!split) {
        st.kind = SplitKind::Inert;
        st.primes.push_back(QuadIdeal(QuadInt(d, p, 0)));
        return st;
    }
    st.kind = SplitKind::Split;
    QuadIdeal P(element_of_norm(K, p));
    QuadIdeal Q(P.gen().conj());
    if (P.gen().b < Q.gen().b) std::swap(P, Q);
    st.primes = {P, Q};
    return st;
}

std::vector<PrimeFactor> factor_ideal(const QuadIdeal& I) {
    if (I.gen().is_zero()) throw Error(Errc::ZeroIdeal, "cannot factor the zero ideal");
    std::vector<PrimeFactor> out;
    const QuadField& K = I.gen().field();
    mpz_class N = I.norm();
    QuadInt x = I.gen();
    auto handle = [&](long p) {
        SplitType st = split_type(K, p);
        if (st.kind == SplitKind::Inert) {
            int e = 0;
            QuadInt pp(K.d(), p, 0);
            while (divides(pp, x)) {
                x = exact_div(x, pp);
                ++e;
            }
            if (e) out.push_back({st.primes[0], p, st.kind, e});
            return;
        }
        for (const auto& P : st.primes) {
            int e = 0;
            while (divides(P.gen(), x)) {
                x = exact_div(x, P.gen());
                ++e;
            }
            if (e) out.push_back({P, p, st.kind, e});
        }
    };
    mpz_class rem = N;
    for (long p = 2; mpz_class(p) * p <= rem; ++p) {
        if (!mpz_divisible_ui_p(rem.get_mpz_t(), p)) continue;
        while (mpz_divisible_ui_p(rem.get_mpz_t(), p)) rem /= p;
        handle(p);
    }
    if (rem > 1) {
        if (!rem.fits_slong_p()) throw Error(Errc::InvalidArgument, "ideal norm too large to factor");
        handle(rem.get_si());
    }
    if (x.norm() != 1) throw Error(Errc::InvalidArgument, "incomplete factorization of " + I.str());
    return out;
}

bool coprime(const QuadIdeal& I, const QuadIdeal& J) {
    mpz_class g = gcd(I.norm(), J.norm());
    if (g == 1) return true;
    for (const auto& f : factor_ideal(I))
        if (f.prime.contains(J.gen())) return false;
    return true;
}

// ---------------------------------------------------------------- residues

ResidueRing::ResidueRing(const QuadIdeal& f) : f_(f) {
    const QuadInt& x = f.gen();
    if (x.is_zero()) throw Error(Errc::ZeroIdeal, "modulus is zero");
    mpz_class n((static_cast<long>(x.d) * x.d - x.d) / 4);
    // Rows of the ideal lattice in (1, omega) coordinates: f and f*omega.
    mpz_class r1a = x.a, r1b = x.b;
    mpz_class r2a = -x.b * n, r2b = x.a + x.b * x.d;
    mpz_class g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), r1b.get_mpz_t(), r2b.get_mpz_t());
    mpz_class c = s * r1a + t * r2a;
    mpz_class h = abs((r2b / g) * r1a - (r1b / g) * r2a);
    if (g < 0) {
        g = -g;
        c = -c;
    }
    c = mod_pos(c, h);
    if (!h.fits_slong_p() || !g.fits_slong_p()) throw Error(Errc::InvalidArgument, "modulus too large");
    h_ = h.get_si();
    g_ = g.get_si();
    c_ = c.get_si();
    for (const auto& pf : factor_ideal(f)) prime_divisors_.push_back(pf.prime);
}

QuadInt ResidueRing::reduce(const QuadInt& x) const {
    mpz_class q = floor_div(x.b, mpz_class(g_));
    mpz_class a = x.a - q * c_;
    mpz_class b = x.b - q * g_;
    return QuadInt(x.d, mod_pos(a, mpz_class(h_)), b);
}

long ResidueRing::index(const QuadInt& x) const {
    QuadInt r = reduce(x);
    return r.a.get_si() * g_ + r.b.get_si();
}

QuadInt ResidueRing::element(long idx) const { return QuadInt(f_.d(), idx / g_, idx % g_); }

bool ResidueRing::is_unit(const QuadInt& x) const {
    for (const auto& P : prime_divisors_)
        if (P.contains(x)) return false;
    return true;
}

std::vector<QuadIdeal> ray_class_reps(const QuadField& K, const QuadIdeal& f) {
    if (f.norm() == 1) return {QuadIdeal::unit(K.d())};
    ResidueRing R(f);
    std::vector<char> seen(R.size(), 0);
    std::vector<QuadIdeal> reps;
    for (long idx = 0; idx < R.size(); ++idx) {
        if (seen[idx]) continue;
        QuadInt x = R.element(idx);
        if (!R.is_unit(x)) continue;
        QuadInt best;
        bool have = false;
        for (const auto& u : K.units()) {
            QuadInt y = R.reduce(u * x);
            seen[R.index(y)] = 1;
            // Small lifts y + m*f with m in a fixed window.
            for (long ma = -2; ma <= 2; ++ma) {
                for (long mb = -2; mb <= 2; ++mb) {
                    QuadInt lift = y + QuadInt(K.d(), ma, mb) * f.gen();
                    if (lift.is_zero()) continue;
                    QuadInt c = canonical_generator(lift);
                    if (!have || quad_less(c, best)) {
                        best = c;
                        have = true;
                    }
                }
            }
        }
        reps.push_back(QuadIdeal(best));
    }
    std::sort(reps.begin(), reps.end(), ideal_less);
    return reps;
}

std::vector<QuadIdeal> ideals_up_to(const QuadField& K, long bound) {
    std::vector<QuadIdeal> out;
    const long d = K.d();
    const long ad = -d;
    long bmax = static_cast<long>(std::sqrt(4.0 * bound / ad)) + 1;
    for (long b = -bmax; b <= bmax; ++b) {
        long rest = 4 * bound - b * b * ad;
        if (rest < 0) continue;
        long t = static_cast<long>(std::sqrt(static_cast<double>(rest))) + 1;
        // 2a + b d ranges over [-t, t]
        long amin = (-t - b * d) / 2 - 1, amax = (t - b * d) / 2 + 1;
        for (long a = amin; a <= amax; ++a) {
            QuadInt x(d, a, b);
            if (x.is_zero()) continue;
            mpz_class n = x.norm();
            if (n > bound) continue;
            if (canonical_generator(x) != x) continue;
            out.push_back(QuadIdeal(x));
        }
    }
    std::sort(out.begin(), out.end(), ideal_less);
    return out;
}

}  // namespace cmlab
