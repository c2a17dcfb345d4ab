#pragma once

#include <cstdint>
#include <string>

#include "qslab/angle.hpp"
#include "qslab/numbers.hpp"

namespace qslab {

// Point frac(z*a + q) of the circle, with integer z and rational
// q in [0,1).  Canonical form is unique: irrationality of the angle
// forces two points to be equal iff (z, q) match componentwise.
struct TorusPoint {
    long long z = 0;
    Rat q = 0;

    TorusPoint() = default;
    TorusPoint(long long z_, Rat q_) : z(z_), q(frac_part(std::move(q_))) {}

    static TorusPoint zero() { return {}; }
    static TorusPoint rational(Rat v) { return TorusPoint(0, std::move(v)); }
    static TorusPoint multiple(long long z) { return TorusPoint(z, Rat(0)); }

    bool operator==(const TorusPoint& o) const { return z == o.z && q == o.q; }
    bool operator!=(const TorusPoint& o) const { return !(*this == o); }

    TorusPoint rotate(long long steps) const { return TorusPoint(z + steps, q); }
    TorusPoint add(const TorusPoint& o) const { return TorusPoint(z + o.z, q + o.q); }
    TorusPoint sub(const TorusPoint& o) const { return TorusPoint(z - o.z, q - o.q); }

    std::string to_text() const;
    static TorusPoint from_text(const std::string& text);
};

enum class Ordering { Less, Equal, Greater };

inline constexpr unsigned kDefaultBudgetBits = 4096;

// Strict circular value order on [0,1): Equal iff componentwise equal,
// otherwise the numeric order of frac(z*a + q).  Quadratic-shadow angles
// decide exactly; otherwise certified intervals are refined up to the
// budget and PrecisionExhausted is thrown on failure.
Ordering compare(const TorusPoint& a, const TorusPoint& b, const Angle& angle,
                 unsigned budget_bits = kDefaultBudgetBits);

// Certified bracket of width <= 2^-k around frac(z*a + q); the internal
// angle precision scales with |z| so z*a is certified before wrapping.
RatInterval eval_point(const TorusPoint& p, const Angle& angle, unsigned k);

// Exact surd value of frac(z*a + q) when the angle has a quadratic shadow.
std::optional<Surd> exact_point(const TorusPoint& p, const Angle& angle);

// Real value z*a + q (unreduced), as a certified bracket.
RatInterval eval_linear(long long z, const Rat& q, const Angle& angle, unsigned k);

}  // namespace qslab
