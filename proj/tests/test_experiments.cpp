#include <doctest.h>

#include "qslab/experiments.hpp"

using namespace qslab;

TEST_CASE("config json round trip") {
    ExperimentConfig cfg;
    cfg.experiment = "chopping";
    cfg.angle_text = "quad:(0,1,2,4)";
    cfg.iterations = 80;
    cfg.seed = 99;
    ExperimentConfig back = ExperimentConfig::from_json_text(cfg.to_json_text());
    CHECK(back.experiment == cfg.experiment);
    CHECK(back.angle_text == cfg.angle_text);
    CHECK(back.iterations == cfg.iterations);
    CHECK(back.seed == cfg.seed);
}

TEST_CASE("reports are deterministic for a fixed config and seed") {
    ExperimentConfig cfg;
    cfg.experiment = "suites";
    cfg.grid_cases = 6;
    cfg.metric_cases = 2;
    cfg.window = 20000;
    cfg.seed = 12345;
    Report a = run_suites(cfg);
    Report b = run_suites(cfg);
    CHECK(a.to_json_text() == b.to_json_text());
    CHECK(a.pass);
}

TEST_CASE("growth sandwich") {
    unsigned long long S = 0;
    for (unsigned long long n = 0; n < 4096; ++n) {
        S += 1ULL << nu(n);
        CHECK(growth_sandwich_holds(n + 1, S));
    }
    CHECK(!growth_sandwich_holds(16, 1ULL << 40));
    CHECK(!growth_sandwich_holds(1 << 20, 1));
}

TEST_CASE("chopping run checks the exact law and the spot value") {
    ExperimentConfig cfg;
    cfg.experiment = "chopping";
    cfg.iterations = 80;
    Report rep = run_chopping(cfg);
    CHECK(rep.pass);
    CHECK(!rep.series_csv.empty());

    IntervalPartition p = cfg.make_partition();
    ChoppingSeries s = chopping_stats(cfg.make_rule(), p, 80);
    // spot value at n = 75: nu(76) = 3, count 8, scaled by the two
    // boundary points sharing one orbit encoded as 1 + x
    CHECK(s.counts[75] == (std::size_t(1) << nu(76)));
}

TEST_CASE("chopping of a trivial partition degenerates cleanly") {
    ExperimentConfig cfg;
    cfg.experiment = "chopping";
    cfg.partition_text = "trivial";
    cfg.iterations = 16;
    Report rep = run_chopping(cfg);
    CHECK(rep.pass);
}

TEST_CASE("expansiveness stalls on a degenerate start") {
    Angle a = Angle::golden_conjugate();
    IntervalPartition flat = IntervalPartition::trivial(a, 2, 0);
    ExpansivenessResult res = expansiveness_search(flat, 0.9, 10, 4);
    CHECK(res.inconclusive);
    CHECK(res.final_measure == 0);
}

TEST_CASE("nonrandomization rejects an oversized delta") {
    ExperimentConfig cfg;
    cfg.experiment = "nonrandomization";
    cfg.angle_text = "digits2:dyadic-recurrent";
    cfg.delta_text = "1/2";
    CHECK_THROWS_AS(run_nonrandomization(cfg), std::invalid_argument);
}

TEST_CASE("nonrandomization witness at a small sample size") {
    ExperimentConfig cfg;
    cfg.experiment = "nonrandomization";
    cfg.angle_text = "digits2:dyadic-recurrent";
    cfg.delta_text = "1/16";
    cfg.recurrence_index = 3;
    cfg.samples = 600;
    cfg.seed = 7;
    Report rep = run_nonrandomization(cfg);
    CHECK(rep.pass);
}

TEST_CASE("rigidity smoke runs") {
    ExperimentConfig nil;
    nil.experiment = "rigidity";
    nil.angle_text = "digits2:dyadic-recurrent";
    nil.rule_text = "lin:p=2:1+x^1";
    nil.iterations = 3;
    CHECK(run_rigidity(nil).pass);

    ExperimentConfig rig;
    rig.experiment = "rigidity";
    rig.angle_text = "digits3:p-adic-recurrent";
    rig.rule_text = "lin:p=3:1+x^1";
    rig.iterations = 4;
    CHECK(run_rigidity(rig).pass);
}

TEST_CASE("unknown experiment is rejected") {
    ExperimentConfig cfg;
    cfg.experiment = "nope";
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}
