#include "qslab/torus.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "qslab/errors.hpp"

namespace qslab {

std::string TorusPoint::to_text() const {
    std::ostringstream os;
    os << z << "*al+" << q.get_num() << "/" << q.get_den();
    return os.str();
}

TorusPoint TorusPoint::from_text(const std::string& text) {
    auto star = text.find("*al+");
    if (star == std::string::npos) throw ParseError("bad torus point: " + text);
    long long z = std::stoll(text.substr(0, star));
    std::string ratpart = text.substr(star + 4);
    auto slash = ratpart.find('/');
    if (slash == std::string::npos) throw ParseError("bad torus point: " + text);
    Rat q(Int(ratpart.substr(0, slash)), Int(ratpart.substr(slash + 1)));
    q.canonicalize();
    return TorusPoint(z, q);
}

RatInterval eval_linear(long long z, const Rat& q, const Angle& angle, unsigned k) {
    if (z == 0) return RatInterval::exact(q);
    unsigned long long az = static_cast<unsigned long long>(std::llabs(z));
    unsigned zbits = 1;
    while ((az >> zbits) != 0) ++zbits;
    RatInterval ia = angle.eval(k + zbits + 1);
    RatInterval scaled = ia * to_rat(z);
    return scaled + q;
}

std::optional<Surd> exact_point(const TorusPoint& p, const Angle& angle) {
    auto shadow = angle.exact_value();
    if (!shadow) return std::nullopt;
    Surd v = *shadow * to_rat(p.z) + p.q;
    long m = v.floor();
    return v - Rat(m);
}

RatInterval eval_point(const TorusPoint& p, const Angle& angle, unsigned k) {
    if (p.z == 0) return RatInterval::exact(p.q);
    unsigned prec = std::max(k, 32u);
    for (int round = 0; round < 64; ++round) {
        RatInterval v = eval_linear(p.z, p.q, angle, prec);
        Int flo, fhi;
        mpz_fdiv_q(flo.get_mpz_t(), v.lo.get_num().get_mpz_t(), v.lo.get_den().get_mpz_t());
        mpz_fdiv_q(fhi.get_mpz_t(), v.hi.get_num().get_mpz_t(), v.hi.get_den().get_mpz_t());
        if (flo == fhi) {
            Rat f(flo);
            return {v.lo - f, v.hi - f};
        }
        // bracket straddles an integer; refine (the value itself is
        // irrational, so this terminates)
        prec *= 2;
    }
    throw PrecisionExhausted("eval_point: bracket keeps straddling an integer");
}

Ordering compare(const TorusPoint& a, const TorusPoint& b, const Angle& angle,
                 unsigned budget_bits) {
    if (a == b) return Ordering::Equal;
    if (a.z == 0 && b.z == 0) return a.q < b.q ? Ordering::Less : Ordering::Greater;

    if (auto shadow = angle.exact_value()) {
        Surd va = *exact_point(a, angle);
        Surd vb = *exact_point(b, angle);
        int s = (va - vb).sign();
        if (s == 0) return Ordering::Equal;  // unreachable for canonical distinct points
        return s < 0 ? Ordering::Less : Ordering::Greater;
    }

    for (unsigned k = 64; k <= budget_bits; k *= 2) {
        RatInterval va = eval_point(a, angle, k);
        RatInterval vb = eval_point(b, angle, k);
        if (va.disjoint(vb)) return va.hi < vb.lo ? Ordering::Less : Ordering::Greater;
    }
    throw PrecisionExhausted("compare: certified intervals failed to separate within " +
                             std::to_string(budget_bits) + " bits");
}

}  // namespace qslab
