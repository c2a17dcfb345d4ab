#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

namespace qslab {

using Rat = mpq_class;
using Int = mpz_class;

// Closed interval with exact rational endpoints.  All certified real
// evaluation in the library produces these; refinement yields nested
// intervals, so containment facts survive precision changes.
struct RatInterval {
    Rat lo, hi;

    RatInterval() : lo(0), hi(0) {}
    RatInterval(Rat lo_, Rat hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {}
    static RatInterval exact(const Rat& v) { return {v, v}; }

    Rat width() const { return hi - lo; }
    Rat mid() const { return (lo + hi) / 2; }
    bool contains(const Rat& v) const { return lo <= v && v <= hi; }
    bool disjoint(const RatInterval& o) const { return hi < o.lo || o.hi < lo; }

    RatInterval operator+(const RatInterval& o) const { return {lo + o.lo, hi + o.hi}; }
    RatInterval operator-(const RatInterval& o) const { return {lo - o.hi, hi - o.lo}; }
    RatInterval operator*(const Rat& c) const {
        if (c >= 0) return {lo * c, hi * c};
        return {hi * c, lo * c};
    }
    RatInterval operator+(const Rat& c) const { return {lo + c, hi + c}; }
    RatInterval operator-(const Rat& c) const { return {lo - c, hi - c}; }

    double lo_d() const { return lo.get_d(); }
    double hi_d() const { return hi.get_d(); }
    double mid_d() const { return mid().get_d(); }
};

// Number of the form x + y*sqrt(d) with rational x, y and a fixed
// nonsquare d > 0.  Supports the exact sign tests that remove the
// precision budget for quadratic angles.
struct Surd {
    Rat x, y;
    Int d;

    Surd() : x(0), y(0), d(2) {}
    Surd(Rat x_, Rat y_, Int d_) : x(std::move(x_)), y(std::move(y_)), d(std::move(d_)) {}
    static Surd rational(const Rat& v, const Int& d) { return {v, Rat(0), d}; }

    Surd operator+(const Surd& o) const { return {x + o.x, y + o.y, d}; }
    Surd operator-(const Surd& o) const { return {x - o.x, y - o.y, d}; }
    Surd operator+(const Rat& c) const { return {x + c, y, d}; }
    Surd operator-(const Rat& c) const { return {x - c, y, d}; }
    Surd operator*(const Rat& c) const { return {x * c, y * c, d}; }
    Surd operator*(const Surd& o) const {
        return {x * o.x + y * o.y * Rat(d), x * o.y + y * o.x, d};
    }

    // sign of x + y*sqrt(d), exact
    int sign() const {
        int sx = sgn(x), sy = sgn(y);
        if (sy == 0) return sx;
        if (sx == 0) return sy;
        if (sx == sy) return sx;
        // opposite signs: compare x^2 against y^2 d
        Rat lhs = x * x, rhs = y * y * Rat(d);
        int c = cmp(lhs, rhs);
        if (c == 0) return 0;  // cannot happen for nonsquare d and y != 0
        return (c > 0) ? sx : sy;
    }

    bool operator<(const Surd& o) const { return (*this - o).sign() < 0; }
    bool operator==(const Surd& o) const { return x == o.x && y == o.y; }

    long floor() const {
        double approx = x.get_d() + y.get_d() * std::sqrt(Rat(d).get_d());
        long m = static_cast<long>(std::floor(approx));
        // fix up the double estimate with exact sign tests
        while ((*this - Rat(m)).sign() < 0) --m;
        while ((*this - Rat(m + 1)).sign() >= 0) ++m;
        return m;
    }

    double to_double() const { return x.get_d() + y.get_d() * std::sqrt(Rat(d).get_d()); }
};

static_assert(sizeof(long) == sizeof(long long), "LP64 layout assumed");

inline Int to_int(long long v) { return Int(static_cast<long>(v)); }
inline Rat to_rat(long long v) { return Rat(static_cast<long>(v)); }

// floor(sqrt(n)) for n >= 0, exact.
inline Int isqrt(const Int& n) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline bool is_square(const Int& n) {
    return mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

// Dyadic bracket of width 2^-k around sqrt(d)*num/den style values is
// built by the callers from this: floor(sqrt(d * 4^k)).
inline Int isqrt_scaled(const Int& d, unsigned k) {
    Int scaled = d << (2 * k);
    return isqrt(scaled);
}

// canonicalized construction; the raw two-argument mpq constructor does
// not reduce num/den and breaks mpq equality
inline Rat make_rat(const Int& num, const Int& den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat frac_part(const Rat& v) {
    Int num = v.get_num(), den = v.get_den();
    Int q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return make_rat(r, den);
}

inline Rat pow2_rat(long e) {
    Rat r(1);
    if (e >= 0) {
        mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(e));
    } else {
        mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(-e));
    }
    return r;
}

}  // namespace qslab
