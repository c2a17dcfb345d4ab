#include <doctest.h>

#include <cmath>
#include <random>

#include "qslab/errors.hpp"
#include "qslab/trajectory.hpp"

using namespace qslab;

TEST_CASE("trivial partition gives a constant trajectory") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition p = IntervalPartition::trivial(a, 2, 1);
    SymbolWindow w = trajectory(p, TorusPoint::zero(), -5, 5);
    for (auto s : w.symbols) CHECK(s == 1);
}

TEST_CASE("sturmian trajectory matches a long-double oracle") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition p = IntervalPartition::sturmian(a);
    TorusPoint t = TorusPoint::rational(Rat(1, 5));
    SymbolWindow w = trajectory(p, t, 0, 8);
    long double alpha = 0.6180339887498948482L;
    for (long long l = 0; l < 8; ++l) {
        long double x = std::fmod(0.2L + l * alpha, 1.0L);
        CHECK(w.at(l) == (x < alpha ? 1 : 0));
    }
}

TEST_CASE("boundary hits resolve to the half-open arc") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition halves = IntervalPartition::halves(a);
    // cell 0 sits exactly on the boundary at 1/2
    SymbolWindow w = trajectory(halves, TorusPoint::rational(Rat(1, 2)), 0, 3);
    CHECK(w.at(0) == 0);  // [1/2, 1) carries label 0 and owns its start
    SymbolWindow z = trajectory(halves, TorusPoint::zero(), 0, 1);
    CHECK(z.at(0) == 1);
}

TEST_CASE("shift equivariance") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition p = IntervalPartition::sturmian(a);
    TorusPoint t = TorusPoint::rational(Rat(1, 5));
    SymbolWindow lhs = trajectory(p, t.rotate(9), 0, 50);
    SymbolWindow rhs = trajectory(p, t, 9, 59);
    CHECK(lhs.symbols == rhs.symbols);
}

TEST_CASE("besicovitch estimate basics") {
    SymbolWindow u{0, {0, 1, 0, 1}, 2};
    SymbolWindow v{0, {0, 1, 0, 1}, 2};
    CHECK(besicovitch_estimate(u, v) == 0);
    SymbolWindow w{0, {1, 0, 1, 0}, 2};
    CHECK(besicovitch_estimate(u, w) == 1);
    SymbolWindow far{10, {0}, 2};
    CHECK_THROWS_AS((void)besicovitch_estimate(u, far), EmptyOverlap);
}

TEST_CASE("besicovitch symmetry and triangle inequality") {
    std::mt19937_64 rng(67);
    auto random_window = [&](long long origin, std::size_t n) {
        SymbolWindow w;
        w.origin = origin;
        w.alphabet = 2;
        for (std::size_t i = 0; i < n; ++i)
            w.symbols.push_back(static_cast<std::uint8_t>(rng() & 1));
        return w;
    };
    for (int i = 0; i < 50; ++i) {
        SymbolWindow x = random_window(0, 64), y = random_window(0, 64),
                     z = random_window(0, 64);
        CHECK(besicovitch_estimate(x, y) == besicovitch_estimate(y, x));
        CHECK(besicovitch_estimate(x, z) <=
              besicovitch_estimate(x, y) + besicovitch_estimate(y, z));
    }
}

TEST_CASE("nearby points disagree at rate #boundary * distance") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition p = IntervalPartition::sturmian(a);
    TorusPoint t = TorusPoint::rational(Rat(1, 5));
    Rat delta(1, 1024);
    TorusPoint t2 = TorusPoint::rational(Rat(1, 5) + delta);
    SymbolWindow w1 = trajectory(p, t, 0, 1000000);
    SymbolWindow w2 = trajectory(p, t2, 0, 1000000);
    double est = besicovitch_estimate(w1, w2).get_d();
    double expected = 2 * delta.get_d();
    CHECK(std::abs(est - expected) < 1e-2);
}

TEST_CASE("conjugacy oracle") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition sturmian = IntervalPartition::sturmian(a);
    TorusPoint t = TorusPoint::rational(Rat(1, 5));

    CHECK(conjugacy_check(Rule{LinearRule::identity(2)}, sturmian, t, 5, 0, 64));
    CHECK(conjugacy_check(Rule{LinearRule::one_plus_x()}, sturmian, t, 8, 0, 4096));

    std::mt19937_64 rng(71);
    std::vector<Arc> arcs{
        Arc{TorusPoint::zero(), 1},
        Arc{TorusPoint::rational(Rat(1, 3)), 0},
        Arc{TorusPoint::multiple(2), 1},
        Arc{TorusPoint(1, Rat(1, 2)), 0},
    };
    IntervalPartition p = IntervalPartition::from_arcs(a, 2, arcs);
    CHECK(conjugacy_check(Rule{GeneralRule::majority3()}, p, t, 3, -64, 64));
}

TEST_CASE("metric identity estimate") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition sturmian = IntervalPartition::sturmian(a);
    TorusPoint t = TorusPoint::rational(Rat(1, 5));

    MetricIdentity same = metric_identity_estimate(sturmian, sturmian, t, 0, 10000);
    CHECK(same.d_delta.hi == 0);
    CHECK(same.twice_db == 0);

    IntervalPartition zero = IntervalPartition::trivial(a, 2, 0);
    MetricIdentity mi = metric_identity_estimate(sturmian, zero, t, 0, 1000000);
    // d = 2a; the window estimate lands within 1e-2
    CHECK(std::abs(mi.d_delta.mid_d() - 2 * 0.6180339887) < 1e-9);
    CHECK(mi.gap < 1e-2);
}

TEST_CASE("tiling reports") {
    SymbolWindow tile;
    tile.alphabet = 2;
    tile.origin = -2;
    tile.symbols = {1, 0, 1, 1};

    SymbolWindow spacers;
    spacers.alphabet = 2;
    spacers.origin = 0;
    spacers.symbols.assign(64, 0);
    TilingReport empty = verify_tiling(spacers, tile, 0, Rat(1));
    CHECK(empty.skeleton.empty());
    CHECK(empty.coverage == 0);
    CHECK(empty.spacer_violations == 0);

    // explicit concatenation: tile + spacers + tile
    SymbolWindow built;
    built.alphabet = 2;
    built.origin = 0;
    auto push_tile = [&]() {
        for (auto s : tile.symbols) built.symbols.push_back(s);
    };
    built.symbols.assign(3, 0);
    push_tile();
    built.symbols.insert(built.symbols.end(), 5, 0);
    push_tile();
    built.symbols.insert(built.symbols.end(), 3, 0);
    TilingReport two = verify_tiling(built, tile, 0, Rat(1, 2));
    CHECK(two.skeleton.size() == 2);
    CHECK(two.overlap_violations == 0);
    CHECK(two.tile_mismatches == 0);
    CHECK(two.spacer_violations == 0);
}

TEST_CASE("tiling stability under corruption") {
    // an exactly tiled window, then a delta-fraction of cells corrupted
    SymbolWindow tile;
    tile.alphabet = 2;
    tile.origin = -4;
    tile.symbols = {1, 1, 0, 1, 0, 0, 1, 1};
    const long long N = 4;

    SymbolWindow w;
    w.alphabet = 2;
    w.origin = 0;
    const int copies = 1000;
    for (int c = 0; c < copies; ++c) {
        for (auto s : tile.symbols) w.symbols.push_back(s);
        w.symbols.insert(w.symbols.end(), 2, 0);
    }
    TilingReport before = verify_tiling(w, tile, 0, Rat(1, 5));
    double eps = 1.0 - before.coverage.get_d();
    double dens0 = before.density.get_d();
    CHECK(before.spacer_violations == 0);

    std::mt19937_64 rng(73);
    double delta = 0.002;
    SymbolWindow corrupted = w;
    std::size_t flips = static_cast<std::size_t>(delta * double(w.symbols.size()));
    for (std::size_t i = 0; i < flips; ++i) {
        std::size_t at = rng() % corrupted.symbols.size();
        corrupted.symbols[at] ^= 1;
    }
    TilingReport after = verify_tiling(corrupted, tile, 0, Rat(1, 5));
    CHECK(after.coverage.get_d() >= 1.0 - eps - double(2 * N) * delta - 0.01);

    // skeleton overlap density stays close to the original
    std::size_t common = 0;
    for (long long j : after.skeleton)
        common += std::binary_search(before.skeleton.begin(), before.skeleton.end(), j);
    double eligible = double(w.symbols.size()) - double(2 * N) + 1;
    double overlap_density = double(common) / eligible;
    CHECK(overlap_density >= dens0 - delta - 0.01);
}

TEST_CASE("metric identity tolerance tier at window 1e4") {
    Angle a = Angle::golden_conjugate();
    std::mt19937_64 rng(83);
    TorusPoint t = TorusPoint::rational(Rat(3, 11));
    for (int i = 0; i < 5; ++i) {
        std::vector<Arc> arcs{
            Arc{TorusPoint(static_cast<long long>(rng() % 5), Rat(0)), 1},
            Arc{TorusPoint(0, Rat(static_cast<long>(1 + rng() % 7), 8)), 0},
        };
        IntervalPartition p = IntervalPartition::from_arcs(a, 2, arcs);
        IntervalPartition q = p.rotate(TorusPoint::rational(Rat(1, 9)));
        MetricIdentity mi = metric_identity_estimate(p, q, t, 0, 10000);
        CHECK(mi.gap <= 0.05);
    }
}

TEST_CASE("conjugacy stress across rules, angles, and offsets") {
    std::mt19937_64 rng(424242);
    std::vector<Angle> angles = {Angle::golden_conjugate(), Angle::quadratic(0, 1, 2, 4),
                                 make_special_angle(SpecialAngle::HighPartialQuotient, 7),
                                 make_special_angle(SpecialAngle::DyadicRecurrent)};
    std::vector<std::string> rules = {
        "lin:p=2:1+x^1", "lin:p=2:1+x^1+x^2", "lin:p=2:x^2+x^5", "lin:p=2:1+x^-3",
        "lin:p=3:1+2x^1", "lin:p=3:1+x^1+2x^3", "lin:p=5:2+3x^-1+x^2",
        "gen:A=2:B=[-1,0,1]:table=00010111",
    };
    for (int c = 0; c < 80; ++c) {
        const Angle& a = angles[static_cast<std::size_t>(c) % angles.size()];
        Rule rule = rule_from_text(rules[rng() % rules.size()]);
        int A = rule_alphabet(rule);
        IntervalPartition p = IntervalPartition::trivial(a, A, 0);
        for (int attempt = 0; attempt < 50; ++attempt) {
            unsigned count = 2 + rng() % 6;
            std::vector<Arc> arcs;
            for (unsigned i = 0; i < count; ++i)
                arcs.push_back(Arc{TorusPoint(static_cast<long long>(rng() % 13) - 6,
                                              Rat(static_cast<long>(rng() % 16), 16)),
                                   static_cast<int>(rng() % A)});
            try {
                p = IntervalPartition::from_arcs(a, A, arcs);
                if (!p.is_trivial()) break;
            } catch (const std::invalid_argument&) {
            }
        }
        unsigned n = 1 + rng() % 12;
        TorusPoint t(static_cast<long long>(rng() % 7), Rat(static_cast<long>(1 + rng() % 96), 97));
        CHECK(conjugacy_check(rule, p, t, n, -64, 512));
    }
}
