#include <doctest.h>

#include <random>

#include "qslab/errors.hpp"
#include "qslab/induced.hpp"

using namespace qslab;

namespace {

GeneralRule xor_as_table() {
    // 1 + x re-expressed as a lookup rule; exercises the generic sweep
    std::vector<std::uint8_t> table(4);
    for (int i = 0; i < 4; ++i)
        table[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(((i & 1) + (i >> 1)) & 1);
    return GeneralRule(2, {0, 1}, std::move(table));
}

IntervalPartition random_partition(const Angle& angle, int alphabet, unsigned max_arcs,
                                   std::mt19937_64& rng) {
    for (;;) {
        unsigned count = 2 + rng() % (max_arcs - 1);
        std::vector<Arc> arcs;
        for (unsigned i = 0; i < count; ++i) {
            long long z = static_cast<long long>(rng() % 9) - 4;
            Rat q(static_cast<long>(rng() % 8), 8);
            arcs.push_back(Arc{TorusPoint(z, q), static_cast<int>(rng() % alphabet)});
        }
        try {
            IntervalPartition p = IntervalPartition::from_arcs(angle, alphabet, arcs);
            if (!p.is_trivial()) return p;
        } catch (const std::invalid_argument&) {
        }
    }
}

}  // namespace

TEST_CASE("image of the half partition under 1 + x") {
    Angle a = Angle::quadratic(0, 1, 2, 4);  // ~0.3536, below 1/2
    IntervalPartition halves = IntervalPartition::halves(a);
    IntervalPartition q = induced_map(Rule{LinearRule::one_plus_x()}, halves);
    std::vector<Arc> arcs{
        Arc{TorusPoint::zero(), 1},
        Arc{TorusPoint::multiple(1), 0},
        Arc{TorusPoint::rational(Rat(1, 2)), 1},
        Arc{TorusPoint(1, Rat(1, 2)), 0},
    };
    CHECK(q == IntervalPartition::from_arcs(a, 2, arcs));
}

TEST_CASE("identity rule leaves partitions unchanged") {
    Angle a = Angle::golden_conjugate();
    std::mt19937_64 rng(41);
    IntervalPartition p = random_partition(a, 2, 6, rng);
    CHECK(induced_map(Rule{LinearRule::identity(2)}, p) == p);
}

TEST_CASE("sturmian image boundary is {0, 2a}") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition p = IntervalPartition::sturmian(a);
    IntervalPartition q = induced_map(Rule{LinearRule::one_plus_x()}, p);
    auto bd = q.boundary();
    REQUIRE(bd.size() == 2);
    bool has0 = bd[0] == TorusPoint::zero() || bd[1] == TorusPoint::zero();
    bool has2 = bd[0] == TorusPoint::multiple(2) || bd[1] == TorusPoint::multiple(2);
    CHECK(has0);
    CHECK(has2);
}

TEST_CASE("parity fast path agrees with the generic table path") {
    Angle a = Angle::golden_conjugate();
    std::mt19937_64 rng(43);
    Rule fast{LinearRule::one_plus_x()};
    Rule generic{xor_as_table()};
    for (int i = 0; i < 20; ++i) {
        IntervalPartition p = random_partition(a, 2, 6, rng);
        CHECK(induced_map(fast, p) == induced_map(generic, p));
    }

    // asymmetric three-term variant
    std::vector<std::uint8_t> table3(8);
    for (int w = 0; w < 8; ++w)
        table3[static_cast<std::size_t>(w)] =
            static_cast<std::uint8_t>(((w & 1) + ((w >> 1) & 1) + ((w >> 2) & 1)) & 1);
    Rule fast3{LinearRule(2, {{0, 1}, {1, 1}, {3, 1}})};
    Rule generic3{GeneralRule(2, {0, 1, 3}, table3)};
    for (int i = 0; i < 20; ++i) {
        IntervalPartition p = random_partition(a, 2, 6, rng);
        CHECK(induced_map(fast3, p) == induced_map(generic3, p));
    }
}

TEST_CASE("second iterate boundary count matches the polynomial oracle") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition p = IntervalPartition::sturmian(a);
    IntervalPartition q2 = induced_iterate(Rule{LinearRule::one_plus_x()}, p, 2);
    // beta-encoding: boundary positions follow supp((1+x)^2 (1+x)) = supp((1+x)^3)
    CHECK(q2.boundary_count() == power(LinearRule::one_plus_x(), 3).support_size());
    CHECK(q2.boundary_count() == 4);
    auto bd = q2.boundary();
    for (long long z : {0LL, 1LL, 2LL, 3LL}) {
        bool found = false;
        for (const auto& b : bd) found = found || (b == TorusPoint::multiple(z));
        CHECK(found);
    }
}

TEST_CASE("step and power strategies agree") {
    Angle a = Angle::golden_conjugate();
    std::mt19937_64 rng(47);
    IntervalPartition p = random_partition(a, 2, 4, rng);
    Rule r{LinearRule::one_plus_x()};
    CHECK(induced_iterate(r, p, 7, IterStrategy::Step) ==
          induced_iterate(r, p, 7, IterStrategy::Power));

    Rule r3{LinearRule(3, {{0, 1}, {1, 2}})};
    IntervalPartition p3 = random_partition(a, 3, 4, rng);
    CHECK(induced_iterate(r3, p3, 5, IterStrategy::Step) ==
          induced_iterate(r3, p3, 5, IterStrategy::Power));

    CHECK(induced_iterate(r, p, 0) == p);
}

TEST_CASE("boundary sandwich for boolean linear rules") {
    Angle a = Angle::golden_conjugate();
    std::mt19937_64 rng(53);
    Rule r{LinearRule(2, {{0, 1}, {1, 1}, {3, 1}})};
    for (int i = 0; i < 10; ++i) {
        IntervalPartition p = random_partition(a, 2, 5, rng);
        IntervalPartition q = induced_map(r, p);

        // upper: every image boundary is a translate of an input boundary
        for (const auto& b : q.boundary()) {
            bool found = false;
            for (long long off : {0LL, 1LL, 3LL})
                for (const auto& x : p.boundary()) found = found || (x.rotate(off) == b);
            CHECK(found);
        }

        // lower: the symmetric difference of the translates is contained
        std::vector<TorusPoint> toggles;
        for (long long off : {0LL, 1LL, 3LL})
            for (const auto& x : p.boundary()) toggles.push_back(x.rotate(off));
        for (std::size_t i1 = 0; i1 < toggles.size(); ++i1) {
            std::size_t count = 0;
            for (std::size_t i2 = 0; i2 < toggles.size(); ++i2)
                if (toggles[i1] == toggles[i2]) ++count;
            if (count % 2 == 1) {
                bool found = false;
                for (const auto& b : q.boundary()) found = found || (b == toggles[i1]);
                CHECK(found);
            }
        }

        // transversality bounds
        std::size_t perp = transversal_boundary(p).size();
        CHECK(q.boundary_count() >= 3 * perp);
        CHECK(q.boundary_count() <= 3 * p.boundary_count());
    }
}

TEST_CASE("all-distinct offsets give exact 2^nu counts") {
    Angle a = Angle::golden_conjugate();
    std::vector<Arc> arcs{
        Arc{TorusPoint::rational(Rat(1, 7)), 1},
        Arc{TorusPoint::rational(Rat(1, 3)), 0},
        Arc{TorusPoint::rational(Rat(2, 3)), 1},
        Arc{TorusPoint::rational(Rat(6, 7)), 0},
    };
    IntervalPartition p = IntervalPartition::from_arcs(a, 2, arcs);
    REQUIRE(transversal_boundary(p).size() == 4);
    ChoppingSeries s = chopping_stats(Rule{LinearRule::one_plus_x()}, p, 64);
    for (unsigned n = 0; n <= 64; ++n)
        CHECK(s.counts[n] == 4u * (std::size_t(1) << nu(n)));
}

TEST_CASE("counts at powers of two stay near the minimum") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition p = IntervalPartition::sturmian(a);
    Rule r{LinearRule::one_plus_x()};
    for (unsigned m = 0; m <= 8; ++m) {
        IntervalPartition q = induced_iterate(r, p, 1ULL << m);
        CHECK(q.boundary_count() <= 2 * p.boundary_count());
    }
}

TEST_CASE("image of the sturmian partition stays simple") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition q =
        induced_map(Rule{LinearRule::one_plus_x()}, IntervalPartition::sturmian(a));
    CHECK(is_simple(q).first);
}

TEST_CASE("chopping of the trivial partition is degenerate") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition p = IntervalPartition::trivial(a, 2, 0);
    ChoppingSeries s = chopping_stats(Rule{LinearRule::one_plus_x()}, p, 16);
    for (auto c : s.counts) CHECK(c == 0);
}

TEST_CASE("arc budget guard") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition p = IntervalPartition::sturmian(a);
    CHECK_THROWS_AS(chopping_stats(Rule{LinearRule::one_plus_x()}, p, 64, 8),
                    ArcBudgetExceeded);
}

TEST_CASE("lipschitz witness") {
    Angle a = Angle::golden_conjugate();
    std::mt19937_64 rng(59);
    Rule r{LinearRule::one_plus_x()};
    IntervalPartition p = random_partition(a, 2, 4, rng);

    LipschitzWitness same = lipschitz_witness(r, p, p);
    CHECK(same.lhs.hi == 0);
    CHECK(same.rhs.hi == 0);

    for (int i = 0; i < 10; ++i) {
        IntervalPartition q = random_partition(a, 2, 4, rng);
        LipschitzWitness w = lipschitz_witness(r, p, q);
        CHECK(w.lhs.hi <= w.rhs.lo);  // certified, with the huge constant as slack
    }

    IntervalPartition q = random_partition(a, 2, 4, rng);
    LipschitzWitness id = lipschitz_witness(Rule{LinearRule::identity(2)}, p, q);
    RatInterval d = sym_diff_distance(p, q, 48);
    CHECK(id.lhs.lo <= d.hi);
    CHECK(d.lo <= id.lhs.hi);
}

TEST_CASE("rotation conjugacy") {
    Angle a = Angle::golden_conjugate();
    std::mt19937_64 rng(61);
    IntervalPartition p = random_partition(a, 2, 5, rng);

    TorusPoint t = TorusPoint::rational(Rat(1, 7));
    auto found = rotation_conjugacy_test(p, p.rotate(t));
    REQUIRE(found.has_value());
    CHECK(p.rotate(*found) == p.rotate(t));

    IntervalPartition sturmian = IntervalPartition::sturmian(a);
    IntervalPartition image = induced_map(Rule{LinearRule::one_plus_x()}, sturmian);
    CHECK(!rotation_conjugacy_test(sturmian, image).has_value());

    // pure shift acts as rotation by v*a
    IntervalPartition shifted = induced_map(Rule{LinearRule::shift_by(2, 3)}, sturmian);
    auto vt = rotation_conjugacy_test(sturmian, shifted);
    REQUIRE(vt.has_value());
    CHECK(*vt == TorusPoint::multiple(3));
}
