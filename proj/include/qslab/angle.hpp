#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qslab/numbers.hpp"

namespace qslab {

// Irrational rotation number in (0,1), given symbolically.  Three variants:
//
//   quadratic           (p + q*sqrt(d))/r with d nonsquare, q != 0
//   digit stream        base-b expansion with 1s exactly at the recurrent
//                       positions n_1 = 1, n_{k+1} = 2 n_k + 1
//   continued fraction  [0; a_1, a_2, ...] with an eventually-constant
//                       quotient stream
//
// Eventually-constant continued fractions are quadratic irrationals, so
// they carry an exact quadratic shadow; comparisons against such angles
// never consume precision budget.
class Angle {
public:
    enum class Kind { Quadratic, DigitStream, ContinuedFraction };

    struct Quad {
        Int p, q, d, r;  // (p + q*sqrt(d))/r
    };

    static Angle quadratic(Int p, Int q, Int d, Int r);
    // 1s at positions n_k of the doubling schedule, base >= 2
    static Angle recurrent_digits(unsigned base);
    // head quotients followed by the last one repeating forever
    static Angle continued_fraction(std::vector<unsigned long> head_then_repeat);

    static Angle golden_conjugate() { return continued_fraction({1}); }

    Kind kind() const;

    // Certified bracket of width <= 2^-k; brackets nest as k grows.
    RatInterval eval(unsigned k) const;

    // Exact value as a surd, available for quadratic angles and
    // eventually-constant continued fractions.
    std::optional<Surd> exact_value() const;

    std::string to_text() const;
    static Angle from_text(const std::string& text);

    bool operator==(const Angle& o) const { return to_text() == o.to_text(); }

    // digit j (1-indexed) of the stream variant
    unsigned digit(std::uint64_t j) const;
    unsigned digit_base() const;

    double approx() const { return eval(52).mid_d(); }

    struct Impl;

private:
    std::shared_ptr<const Impl> impl_;
    explicit Angle(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
};

enum class SpecialAngle { DyadicRecurrent, PAdicRecurrent, HighPartialQuotient };

// dyadic_recurrent: binary stream 0.101000100000001...
// p_adic_recurrent(p): base-p analogue, ||p^{n_k} a|| < p^{-n_k}
// high_partial_quotient(M): [0; M, M, M, ...]
Angle make_special_angle(SpecialAngle kind, unsigned long param = 0);

// n_1 = 1, n_{k+1} = 2 n_k + 1 -> 1, 3, 7, 15, 31, ...
std::vector<std::uint64_t> recurrence_schedule(unsigned count);

}  // namespace qslab
