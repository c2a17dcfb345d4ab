#include "qslab/angle.hpp"

#include <algorithm>
#include <sstream>

#include "qslab/errors.hpp"

namespace qslab {

struct Angle::Impl {
    Kind kind;

    // Quadratic
    Quad quad{};

    // DigitStream
    unsigned base = 2;
    mutable std::mutex digit_mutex;
    mutable std::vector<std::uint64_t> schedule_cache;  // n_k values, increasing

    // ContinuedFraction: head quotients, last entry repeats forever
    std::vector<unsigned long> cf;

    // exact quadratic view when one exists
    std::optional<Surd> shadow;
};

namespace {

std::uint64_t next_schedule(std::uint64_t n) { return 2 * n + 1; }

// Extend the cached schedule until it covers position j.
bool schedule_contains(const Angle::Impl& impl, std::uint64_t j) {
    std::lock_guard<std::mutex> lock(impl.digit_mutex);
    auto& cache = impl.schedule_cache;
    if (cache.empty()) cache.push_back(1);
    while (cache.back() < j) cache.push_back(next_schedule(cache.back()));
    return std::binary_search(cache.begin(), cache.end(), j);
}

Surd quad_surd(const Angle::Quad& q) {
    return Surd(Rat(q.p) / Rat(q.r), Rat(q.q) / Rat(q.r), q.d);
}

// Value of [0; a_1, ..., a_k, m, m, m, ...] as a surd.  The repeating
// tail xi = [m; m, m, ...] satisfies xi = m + 1/xi, so
// xi = (m + sqrt(m^2+4))/2; then fold the head through the convergent
// recurrence x = (xi*p_k + p_{k-1}) / (xi*q_k + q_{k-1}).
Surd cf_surd(const std::vector<unsigned long>& cf) {
    unsigned long m = cf.back();
    Int d = Int(m) * Int(m) + 4;
    Surd xi(Rat(m) / 2, Rat(1, 2), d);
    // convergents of the head [0; a_1 .. a_{k-1}] (all but the repeating entry)
    Int pk1 = 1, pk = 0;  // p_{-1}, p_0 for a_0 = 0
    Int qk1 = 0, qk = 1;
    for (size_t i = 0; i + 1 < cf.size(); ++i) {
        Int a = Int(cf[i]);
        Int pn = a * pk + pk1;
        Int qn = a * qk + qk1;
        pk1 = pk; pk = pn;
        qk1 = qk; qk = qn;
    }
    Surd num = xi * Rat(pk) + Rat(pk1);
    Surd den = xi * Rat(qk) + Rat(qk1);
    // (nx + ny sqrt(d)) / (dx + dy sqrt(d)): multiply by the conjugate
    Rat dx = den.x, dy = den.y;
    Rat norm = dx * dx - dy * dy * Rat(d);
    Surd conj(dx, -dy, d);
    Surd prod = num * conj;
    return Surd(prod.x / norm, prod.y / norm, d);
}

}  // namespace

Angle Angle::quadratic(Int p, Int q, Int d, Int r) {
    if (sgn(q) == 0) throw std::invalid_argument("quadratic angle needs q != 0");
    if (sgn(d) <= 0 || is_square(d)) throw std::invalid_argument("d must be positive nonsquare");
    if (sgn(r) == 0) throw std::invalid_argument("r must be nonzero");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Quadratic;
    impl->quad = Quad{std::move(p), std::move(q), std::move(d), std::move(r)};
    impl->shadow = quad_surd(impl->quad);
    Surd v = *impl->shadow;
    if (!(v.sign() > 0 && (v - Rat(1)).sign() < 0))
        throw std::invalid_argument("quadratic angle must lie in (0,1)");
    return Angle(impl);
}

Angle Angle::recurrent_digits(unsigned base) {
    if (base < 2) throw std::invalid_argument("digit base must be >= 2");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::DigitStream;
    impl->base = base;
    return Angle(impl);
}

Angle Angle::continued_fraction(std::vector<unsigned long> head_then_repeat) {
    if (head_then_repeat.empty()) throw std::invalid_argument("need at least one partial quotient");
    for (unsigned long a : head_then_repeat)
        if (a == 0) throw std::invalid_argument("partial quotients must be positive");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::ContinuedFraction;
    impl->cf = std::move(head_then_repeat);
    impl->shadow = cf_surd(impl->cf);
    return Angle(impl);
}

Angle::Kind Angle::kind() const { return impl_->kind; }

unsigned Angle::digit_base() const { return impl_->base; }

unsigned Angle::digit(std::uint64_t j) const {
    if (impl_->kind != Kind::DigitStream) throw std::logic_error("not a digit-stream angle");
    return schedule_contains(*impl_, j) ? 1u : 0u;
}

RatInterval Angle::eval(unsigned k) const {
    switch (impl_->kind) {
        case Kind::Quadratic: {
            // bracket via floor(2^k * value), computed with integer sqrt;
            // floor-based dyadic brackets nest as k grows
            const Quad& q = impl_->quad;
            unsigned g = k + 2;
            Int scale = Int(1) << g;
            // value = (p + q sqrt(d))/r; n = floor(scale * value)
            // scale*(p + q sqrt(d))/r: isolate sqrt via isqrt of q^2 d scale^2
            Int sq = isqrt(q.q * q.q * q.d * scale * scale);  // floor(|q| sqrt(d) scale)
            Int num_lo, num_hi;
            if (sgn(q.q) >= 0) {
                num_lo = scale * q.p + sq;
                num_hi = num_lo + 1;
            } else {
                num_lo = scale * q.p - sq - 1;
                num_hi = num_lo + 1;
            }
            Rat lo, hi;
            if (sgn(q.r) > 0) {
                lo = Rat(num_lo) / Rat(q.r * scale);
                hi = Rat(num_hi) / Rat(q.r * scale);
            } else {
                lo = Rat(num_hi) / Rat(q.r * scale);
                hi = Rat(num_lo) / Rat(q.r * scale);
            }
            return {lo, hi};
        }
        case Kind::DigitStream: {
            // truncate after enough digits that base^-J <= 2^-k
            unsigned base = impl_->base;
            std::uint64_t J = 1;
            Rat width(1);
            while (width > pow2_rat(-(long)k)) {
                width /= base;
                ++J;
            }
            Rat acc(0), scale(1);
            for (std::uint64_t j = 1; j <= J; ++j) {
                scale /= base;
                if (schedule_contains(*impl_, j)) acc += scale;
            }
            return {acc, acc + scale};
        }
        case Kind::ContinuedFraction: {
            // consecutive convergents bracket the value with width
            // 1/(q_k q_{k+1}); indices only grow with k, so brackets nest
            Int pk1 = 1, pk = 0, qk1 = 0, qk = 1;
            size_t i = 0;
            Rat bound = pow2_rat(-(long)k);
            Rat prev(0), cur(0);
            while (true) {
                unsigned long a = impl_->cf[std::min(i, impl_->cf.size() - 1)];
                Int pn = Int(a) * pk + pk1;
                Int qn = Int(a) * qk + qk1;
                pk1 = pk; pk = pn;
                qk1 = qk; qk = qn;
                ++i;
                if (i >= 2) {
                    Rat w = Rat(1) / Rat(qk * qk1);
                    if (w <= bound) {
                        prev = Rat(pk1) / Rat(qk1);
                        cur = Rat(pk) / Rat(qk);
                        break;
                    }
                }
            }
            if (prev < cur) return {prev, cur};
            return {cur, prev};
        }
    }
    throw std::logic_error("unreachable");
}

std::optional<Surd> Angle::exact_value() const { return impl_->shadow; }

std::string Angle::to_text() const {
    std::ostringstream os;
    switch (impl_->kind) {
        case Kind::Quadratic:
            os << "quad:(" << impl_->quad.p << "," << impl_->quad.q << ","
               << impl_->quad.d << "," << impl_->quad.r << ")";
            break;
        case Kind::DigitStream:
            os << "digits" << impl_->base << ":"
               << (impl_->base == 2 ? "dyadic-recurrent" : "p-adic-recurrent");
            break;
        case Kind::ContinuedFraction: {
            os << "cf:[0;";
            for (std::size_t i = 0; i < impl_->cf.size(); ++i) {
                if (i) os << ",";
                os << impl_->cf[i];
            }
            os << ",...]";
            break;
        }
    }
    return os.str();
}

Angle Angle::from_text(const std::string& text) {
    if (text.rfind("quad:(", 0) == 0) {
        if (text.back() != ')') throw ParseError("bad quad angle: " + text);
        std::string body = text.substr(6, text.size() - 7);
        std::vector<Int> parts;
        std::istringstream is(body);
        std::string tok;
        while (std::getline(is, tok, ',')) parts.emplace_back(tok);
        if (parts.size() != 4) throw ParseError("quad angle needs 4 fields: " + text);
        return quadratic(parts[0], parts[1], parts[2], parts[3]);
    }
    if (text.rfind("digits", 0) == 0) {
        auto colon = text.find(':');
        if (colon == std::string::npos) throw ParseError("bad digit angle: " + text);
        unsigned base = std::stoul(text.substr(6, colon - 6));
        std::string tag = text.substr(colon + 1);
        if (tag != "dyadic-recurrent" && tag != "p-adic-recurrent")
            throw ParseError("unknown digit schedule: " + text);
        return recurrent_digits(base);
    }
    if (text.rfind("cf:[0;", 0) == 0) {
        std::string body = text.substr(6);
        if (body.empty() || body.back() != ']') throw ParseError("bad cf angle: " + text);
        body.pop_back();
        if (body.size() < 4 || body.substr(body.size() - 4) != ",...")
            throw ParseError("cf angle must end with ,... : " + text);
        body = body.substr(0, body.size() - 4);
        std::vector<unsigned long> cf;
        std::istringstream is(body);
        std::string tok;
        while (std::getline(is, tok, ',')) cf.push_back(std::stoul(tok));
        return continued_fraction(std::move(cf));
    }
    throw ParseError("unrecognized angle: " + text);
}

Angle make_special_angle(SpecialAngle kind, unsigned long param) {
    switch (kind) {
        case SpecialAngle::DyadicRecurrent:
            return Angle::recurrent_digits(2);
        case SpecialAngle::PAdicRecurrent: {
            if (param < 2) throw std::invalid_argument("p must be a prime >= 2");
            for (unsigned long d = 2; d * d <= param; ++d)
                if (param % d == 0) throw std::invalid_argument("p must be prime");
            return Angle::recurrent_digits(static_cast<unsigned>(param));
        }
        case SpecialAngle::HighPartialQuotient: {
            if (param < 1) throw std::invalid_argument("M must be >= 1");
            return Angle::continued_fraction({param});
        }
    }
    throw std::logic_error("unreachable");
}

std::vector<std::uint64_t> recurrence_schedule(unsigned count) {
    std::vector<std::uint64_t> out;
    std::uint64_t n = 1;
    for (unsigned k = 0; k < count; ++k) {
        out.push_back(n);
        n = 2 * n + 1;
    }
    return out;
}

}  // namespace qslab
