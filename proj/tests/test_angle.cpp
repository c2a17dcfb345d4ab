#include <doctest.h>

#include <atomic>
#include <random>
#include <thread>

#include "qslab/errors.hpp"
#include "qslab/torus.hpp"

using namespace qslab;

TEST_CASE("golden conjugate evaluates near 0.618 with nested brackets") {
    Angle a = Angle::golden_conjugate();
    RatInterval prev = a.eval(8);
    CHECK(prev.width() <= pow2_rat(-8));
    CHECK(prev.lo.get_d() < 0.6181);
    CHECK(prev.hi.get_d() > 0.6179);
    for (unsigned k = 16; k <= 256; k *= 2) {
        RatInterval cur = a.eval(k);
        CHECK(cur.width() <= pow2_rat(-(long)k));
        CHECK(cur.lo >= prev.lo);
        CHECK(cur.hi <= prev.hi);
        prev = cur;
    }
    auto exact = a.exact_value();
    REQUIRE(exact.has_value());
    CHECK(exact->x == Rat(-1, 2));
    CHECK(exact->y == Rat(1, 2));
    CHECK(exact->d == 5);
}

TEST_CASE("quadratic angle comparisons") {
    // sqrt(2)/4, inside (0, 1/2)
    Angle a = Angle::quadratic(0, 1, 2, 4);
    CHECK(compare(TorusPoint::multiple(1), TorusPoint::multiple(1), a) == Ordering::Equal);
    CHECK(compare(TorusPoint::multiple(1), TorusPoint::multiple(2), a) == Ordering::Less);
    CHECK(compare(TorusPoint::rational(Rat(1, 4)), TorusPoint::rational(Rat(1, 2)), a) ==
          Ordering::Less);
}

TEST_CASE("canonical uniqueness over random points") {
    Angle a = Angle::golden_conjugate();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 10000; ++i) {
        TorusPoint p(static_cast<long long>(rng() % 201) - 100,
                     Rat(static_cast<long>(rng() % 64), 64));
        TorusPoint q(static_cast<long long>(rng() % 201) - 100,
                     Rat(static_cast<long>(rng() % 64), 64));
        bool same = (p == q);
        CHECK((compare(p, q, a) == Ordering::Equal) == same);
    }
}

TEST_CASE("order agrees with certified interval midpoints") {
    Angle a = Angle::golden_conjugate();
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        TorusPoint p(static_cast<long long>(rng() % 41) - 20,
                     Rat(static_cast<long>(rng() % 32), 32));
        TorusPoint q(static_cast<long long>(rng() % 41) - 20,
                     Rat(static_cast<long>(rng() % 32), 32));
        if (p == q) continue;
        RatInterval ip = eval_point(p, a, 80);
        RatInterval iq = eval_point(q, a, 80);
        if (!ip.disjoint(iq)) continue;
        Ordering expect = ip.hi < iq.lo ? Ordering::Less : Ordering::Greater;
        CHECK(compare(p, q, a) == expect);
    }
}

TEST_CASE("rotation acts as a group on components") {
    TorusPoint p(3, Rat(2, 7));
    CHECK(p.rotate(5).rotate(-9) == p.rotate(-4));
    CHECK(p.rotate(0) == p);
}

TEST_CASE("dyadic recurrent digit stream") {
    Angle a = make_special_angle(SpecialAngle::DyadicRecurrent);
    // 0.1 0 1 000 1 0000000 1 ...
    CHECK(a.digit(1) == 1);
    CHECK(a.digit(2) == 0);
    CHECK(a.digit(3) == 1);
    CHECK(a.digit(4) == 0);
    CHECK(a.digit(5) == 0);
    CHECK(a.digit(6) == 0);
    CHECK(a.digit(7) == 1);
    for (int j = 8; j < 15; ++j) CHECK(a.digit(static_cast<std::uint64_t>(j)) == 0);
    CHECK(a.digit(15) == 1);
    CHECK(a.digit(31) == 1);

    // ||2^{n_k} a|| < 2^{-n_k} for the schedule 1, 3, 7, 15, 31
    for (std::uint64_t nk : recurrence_schedule(5)) {
        RatInterval iv = eval_point(TorusPoint::multiple(1LL << nk), a, 2 * unsigned(nk) + 8);
        CHECK(iv.hi < pow2_rat(-(long)nk));
    }
}

TEST_CASE("p-adic recurrent stream satisfies the norm bound") {
    Angle a = make_special_angle(SpecialAngle::PAdicRecurrent, 3);
    for (std::uint64_t nk : recurrence_schedule(5)) {
        long long p3 = 1;
        for (std::uint64_t i = 0; i < nk; ++i) p3 *= 3;
        RatInterval iv = eval_point(TorusPoint::multiple(p3), a, 80);
        Rat bound(1);
        for (std::uint64_t i = 0; i < nk; ++i) bound /= 3;
        CHECK(iv.hi < bound);
    }
}

TEST_CASE("eval_point basics and digit-shift oracle") {
    Angle a = make_special_angle(SpecialAngle::DyadicRecurrent);
    RatInterval zero = eval_point(TorusPoint::zero(), a, 32);
    CHECK(zero.lo == 0);
    CHECK(zero.hi == 0);

    // truncated-sum oracle for the angle itself
    Rat s(0);
    for (std::uint64_t nk : recurrence_schedule(5)) s += pow2_rat(-(long)nk);
    RatInterval iv = eval_point(TorusPoint::multiple(1), a, 8);
    CHECK(iv.width() <= pow2_rat(-8));
    CHECK(iv.lo <= s + pow2_rat(-62));
    CHECK(iv.hi >= s);

    // shifting the stored stream by 31 places: frac(2^31 a) = 2^-32 + 2^-96 + ...
    RatInterval shifted = eval_point(TorusPoint::multiple(1LL << 31), a, 16);
    CHECK(shifted.width() <= pow2_rat(-16));
    CHECK(shifted.lo <= pow2_rat(-32) + pow2_rat(-95));
    CHECK(shifted.hi >= pow2_rat(-32));
}

TEST_CASE("high partial quotient is the expected quadratic") {
    Angle g = make_special_angle(SpecialAngle::HighPartialQuotient, 1);
    auto exact = g.exact_value();
    REQUIRE(exact.has_value());
    CHECK(exact->x == Rat(-1, 2));
    CHECK(exact->y == Rat(1, 2));
    CHECK(exact->d == 5);

    // [0; 1000, ...] solves a = 1/(1000 + a), slightly below 1/1000
    Angle m = make_special_angle(SpecialAngle::HighPartialQuotient, 1000);
    double v = m.approx();
    CHECK(v > 0.00099999);
    CHECK(v < 0.00100001);
}

TEST_CASE("compare exhausts a tiny budget but resolves with the default") {
    Angle a = make_special_angle(SpecialAngle::DyadicRecurrent);
    // frac(2^31 a) = 2^-32 + 2^-96 + 2^-224 + ...; this rational agrees
    // through the 2^-96 term
    TorusPoint p = TorusPoint::multiple(1LL << 31);
    TorusPoint q = TorusPoint::rational(pow2_rat(-32) + pow2_rat(-96));
    CHECK_THROWS_AS((void)compare(p, q, a, 64), PrecisionExhausted);
    CHECK(compare(p, q, a) == Ordering::Greater);
}

TEST_CASE("angle serialization round trips") {
    for (const char* text : {"quad:(0,1,2,4)", "quad:(-1,1,5,2)", "digits2:dyadic-recurrent",
                             "digits3:p-adic-recurrent", "cf:[0;1,...]", "cf:[0;2,7,1000,...]"}) {
        Angle a = Angle::from_text(text);
        CHECK(a.to_text() == text);
        Angle b = Angle::from_text(a.to_text());
        CHECK(b == a);
    }
    CHECK_THROWS_AS(Angle::from_text("quad:(1,0,5,2)"), std::invalid_argument);
    CHECK_THROWS_AS(Angle::from_text("nonsense"), ParseError);
}

TEST_CASE("torus point serialization round trips") {
    TorusPoint p(-3, Rat(5, 7));
    CHECK(TorusPoint::from_text(p.to_text()) == p);
    CHECK(p.to_text() == "-3*al+5/7");
}

TEST_CASE("digit-stream brackets nest and digit evaluation is thread safe") {
    Angle a = make_special_angle(SpecialAngle::DyadicRecurrent);
    RatInterval prev = a.eval(8);
    for (unsigned k = 16; k <= 128; k *= 2) {
        RatInterval cur = a.eval(k);
        CHECK(cur.lo >= prev.lo);
        CHECK(cur.hi <= prev.hi);
        prev = cur;
    }

    Angle fresh = make_special_angle(SpecialAngle::PAdicRecurrent, 5);
    std::vector<std::thread> threads;
    std::atomic<int> bad{0};
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&fresh, &bad] {
            for (std::uint64_t nk : recurrence_schedule(6))
                if (fresh.digit(nk) != 1 || fresh.digit(nk + 1) != 0) ++bad;
        });
    }
    for (auto& t : threads) t.join();
    CHECK(bad == 0);

    CHECK_THROWS_AS(make_special_angle(SpecialAngle::PAdicRecurrent, 4),
                    std::invalid_argument);
}
