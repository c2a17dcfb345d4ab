#include "qslab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "qslab/experiments.hpp"

namespace qslab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Checker {
    std::ostream& os;
    int failures = 0;

    void report(int idx, const std::string& name, bool pass, const std::string& detail) {
        os << (pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << idx << "  "
           << name;
        if (!detail.empty()) os << "  [" << detail << "]";
        os << "\n";
        if (!pass) ++failures;
    }
};

// 1. exact boundary-count law, with runtime budget
void criterion_boundary_law(Checker& ck) {
    auto start = Clock::now();
    Angle angle = Angle::golden_conjugate();
    IntervalPartition p = IntervalPartition::sturmian(angle);
    Rule rule{LinearRule::one_plus_x()};
    ChoppingSeries series = chopping_stats(rule, p, 512);
    bool exact = true;
    for (unsigned n = 0; n <= 512; ++n) {
        std::size_t expected = std::size_t(1) << nu(n + 1);
        if (series.counts[n] != expected) {
            exact = false;
            break;
        }
    }
    double secs = seconds_since(start);
    std::ostringstream det;
    det << "n<=512, runtime " << std::fixed << std::setprecision(2) << secs << "s";
    ck.report(1, "boundary counts equal 2^nu(n+1)", exact && secs < 30.0, det.str());
}

// 2. exact image of the half partition under 1 + x
void criterion_half_image(Checker& ck) {
    Angle angle = Angle::quadratic(0, 1, 2, 4);  // sqrt(2)/4, inside (0, 1/2)
    IntervalPartition p = IntervalPartition::halves(angle);
    IntervalPartition q = induced_map(Rule{LinearRule::one_plus_x()}, p);
    std::vector<Arc> arcs{
        Arc{TorusPoint::zero(), 1},
        Arc{TorusPoint::multiple(1), 0},
        Arc{TorusPoint::rational(Rat(1, 2)), 1},
        Arc{TorusPoint(1, Rat(1, 2)), 0},
    };
    IntervalPartition expected = IntervalPartition::from_arcs(angle, 2, arcs);
    ck.report(2, "image of [0,1/2) is [0,a) u [1/2,1/2+a), exact boundaries",
              q == expected, "");
}

// 3. growth sandwich and exponent for Atilde(N) up to 2^20
void criterion_growth_sandwich(Checker& ck) {
    auto start = Clock::now();
    const unsigned long long NMAX = 1ULL << 20;
    unsigned long long S = 0;
    bool sandwich = true;
    for (unsigned long long n = 0; n < NMAX; ++n) {
        S += 1ULL << nu(n);
        if (!growth_sandwich_holds(n + 1, S)) {
            sandwich = false;
            break;
        }
    }
    double alpha = std::log2(1.5);
    double atilde = double(S) / double(NMAX);
    double exponent = std::log(atilde) / std::log(double(NMAX));
    bool exp_ok = std::abs(exponent - alpha) <= 0.08;
    double secs = seconds_since(start);
    std::ostringstream det;
    det << "exponent " << std::setprecision(4) << exponent << ", runtime "
        << std::setprecision(2) << secs << "s";
    ck.report(3, "(1/3)N^a < Atilde(N) <= 3N^a for all N <= 2^20",
              sandwich && exp_ok && secs < 10.0, det.str());
}

// 4. conjugacy oracle grid
void criterion_conjugacy_grid(Checker& ck) {
    ExperimentConfig cfg;
    cfg.experiment = "suites";
    cfg.angle_text = "cf:[0;1,...]";
    cfg.grid_cases = 50;
    cfg.metric_cases = 0;
    cfg.window = 4096;
    cfg.seed = 20240901;
    Report rep = run_suites(cfg);
    auto body = nlohmann::json::parse(rep.body_json);
    unsigned passed = body["conjugacy_pass"].get<unsigned>();
    ck.report(4, "conjugacy oracle, 50 random cases exact",
              passed == 50, std::to_string(passed) + "/50");
}

// 5. distance halving at window 1e6
void criterion_distance_halving(Checker& ck) {
    auto start = Clock::now();
    ExperimentConfig cfg;
    cfg.experiment = "suites";
    cfg.angle_text = "cf:[0;1,...]";
    cfg.grid_cases = 0;
    cfg.metric_cases = 20;
    cfg.window = 1000000;
    cfg.seed = 20240902;
    Report rep = run_suites(cfg);
    auto body = nlohmann::json::parse(rep.body_json);
    unsigned passed = body["metric_pass"].get<unsigned>();
    double secs = seconds_since(start);
    std::ostringstream det;
    det << passed << "/20 within 1e-2, runtime " << std::fixed << std::setprecision(2)
        << secs << "s";
    ck.report(5, "|d_delta - 2 dB| <= 1e-2 at window 1e6", passed == 20 && secs < 120.0,
              det.str());
}

// 6. niltropism (Z/2) and rigidity (Z/3) along recurrent schedules
void criterion_rigidity(Checker& ck) {
    ExperimentConfig nil;
    nil.experiment = "rigidity";
    nil.angle_text = "digits2:dyadic-recurrent";
    nil.rule_text = "lin:p=2:1+x^1";
    nil.partition_text = "sturmian";
    nil.iterations = 5;
    Report rn = run_rigidity(nil);

    ExperimentConfig rig;
    rig.experiment = "rigidity";
    rig.angle_text = "digits3:p-adic-recurrent";
    rig.rule_text = "lin:p=3:1+x^1";
    rig.partition_text = "sturmian";
    rig.iterations = 4;
    Report rr = run_rigidity(rig);

    ck.report(6, "niltropic decay (Z/2) and rigid return (Z/3) along p-power schedules",
              rn.pass && rr.pass,
              std::string("niltropic ") + (rn.pass ? "ok" : "FAIL") + ", rigid " +
                  (rr.pass ? "ok" : "FAIL"));
}

// 7. greedy expansiveness search
void criterion_expansiveness(Checker& ck) {
    ExperimentConfig cfg;
    cfg.experiment = "expansiveness";
    cfg.angle_text = "cf:[0;1,...]";
    cfg.partition_text = "sturmian";
    cfg.target = 0.9;
    cfg.max_steps = 12;
    cfg.max_candidate = 40;
    Report rep = run_expansiveness(cfg);
    auto body = nlohmann::json::parse(rep.body_json);
    bool reached = body["reached_target"].get<bool>();
    std::size_t steps = body["records"].size();
    std::ostringstream det;
    det << "r " << std::setprecision(4) << body["final_measure"].get<double>() << " in "
        << steps << " steps";
    ck.report(7, "greedy schedule reaches measure > 0.9 with certified recurrence",
              rep.pass && reached && steps <= 12, det.str());
}

// 8. painting and epsilon-tiling
void criterion_tiling(Checker& ck) {
    Angle angle = make_special_angle(SpecialAngle::HighPartialQuotient, 128);
    Rat eps_target(1, 10);
    long long N = choose_tower_height(angle, eps_target, 256);
    TowerSpec tower = build_tower(angle, N, eps_target);

    std::mt19937_64 rng(20240908);
    SymbolWindow word;
    word.alphabet = 3;
    word.origin = -N;
    word.symbols.resize(static_cast<std::size_t>(2 * N));
    for (auto& s : word.symbols) s = static_cast<std::uint8_t>(rng() % 3);
    const int spacer = 0;
    IntervalPartition painted = paint(tower, word, spacer);

    RatInterval div = tower.delta.eval(angle, 30);
    TorusPoint t = TorusPoint::rational(div.lo / 2);
    SymbolWindow traj = trajectory(painted, t, 0, 100000);
    TilingReport tr = verify_tiling(traj, word, spacer, Rat(1, 10));

    double delta = tower.delta.approx(angle);
    bool violations_ok =
        tr.overlap_violations == 0 && tr.tile_mismatches == 0 && tr.spacer_violations == 0;
    bool coverage_ok = tr.coverage.get_d() >= 1.0 - tower.achieved_epsilon - 0.01;
    bool density_ok = std::abs(tr.density.get_d() - delta) <= 0.01;
    std::ostringstream det;
    det << "coverage " << std::setprecision(4) << tr.coverage.get_d() << ", eps "
        << tower.achieved_epsilon;
    ck.report(8, "painted tower trajectory passes verify_tiling at window 1e5",
              violations_ok && coverage_ok && density_ok, det.str());
}

// 9. constructive surjectivity approximation
void criterion_surjectivity(Checker& ck) {
    auto start = Clock::now();
    Angle angle = make_special_angle(SpecialAngle::HighPartialQuotient, 10000);
    IntervalPartition target = IntervalPartition::sturmian(angle);
    PreimageResult res;
    bool ok = true;
    std::ostringstream det;
    try {
        res = surjective_preimage_partition(LinearRule::one_plus_x(), target, Rat(1, 5));
        det << "certified distance " << std::setprecision(4)
            << res.certified_distance.hi_d();
        ok = res.certified_distance.hi < Rat(1, 5);
    } catch (const EpsilonUnreachable& e) {
        ok = false;
        det << "unreachable: " << e.what();
    }
    double secs = seconds_since(start);
    det << ", runtime " << std::fixed << std::setprecision(2) << secs << "s";
    ck.report(9, "preimage partition with certified d(Phi_T Q, target) < 0.2",
              ok && secs < 60.0, det.str());
}

// 10. nonrandomization witness
void criterion_nonrandomization(Checker& ck) {
    ExperimentConfig cfg;
    cfg.experiment = "nonrandomization";
    cfg.angle_text = "digits2:dyadic-recurrent";
    cfg.rule_text = "lin:p=2:1+x^1";
    cfg.partition_text = "sturmian";
    cfg.delta_text = "1/16";
    cfg.recurrence_index = 3;
    cfg.samples = 10000;
    cfg.seed = 20240910;
    Report rep = run_nonrandomization(cfg);
    auto body = nlohmann::json::parse(rep.body_json);
    std::ostringstream det;
    det << "control " << std::setprecision(4) << body["control_estimate"].get<double>()
        << " vs " << body["control_mean"].get<double>();
    ck.report(10, "cylinder estimate > 2*2^-E for all tested J; control at 2^-E",
              rep.pass, det.str());
}

// 11. exact predicate suite
void criterion_predicates(Checker& ck) {
    Angle angle = Angle::golden_conjugate();
    IntervalPartition sturmian = IntervalPartition::sturmian(angle);

    bool ok = true;
    ok = ok && is_simple(sturmian).first;
    ok = ok && is_primitive(sturmian);

    std::vector<Arc> arcs{Arc{TorusPoint::zero(), 1},
                          Arc{TorusPoint::rational(Rat(1, 3)), 0}};
    IntervalPartition thirds = IntervalPartition::from_arcs(angle, 2, arcs);
    ok = ok && !is_primitive(thirds);

    ok = ok && transversal_boundary(sturmian).empty();

    TorusPoint seventh = TorusPoint::rational(Rat(1, 7));
    IntervalPartition rotated = sturmian.rotate(seventh);
    auto found = rotation_conjugacy_test(sturmian, rotated);
    ok = ok && found.has_value() && *found == seventh;

    IntervalPartition image = induced_map(Rule{LinearRule::one_plus_x()}, sturmian);
    ok = ok && !rotation_conjugacy_test(sturmian, image).has_value();

    ck.report(11, "simplicity, primitivity, transversality, rotation conjugacy", ok, "");
}

}  // namespace

int run_acceptance(std::ostream& os) {
    Checker ck{os};
    criterion_boundary_law(ck);
    criterion_half_image(ck);
    criterion_growth_sandwich(ck);
    criterion_conjugacy_grid(ck);
    criterion_distance_halving(ck);
    criterion_rigidity(ck);
    criterion_expansiveness(ck);
    criterion_tiling(ck);
    criterion_surjectivity(ck);
    criterion_nonrandomization(ck);
    criterion_predicates(ck);
    if (ck.failures == 0)
        os << "ALL CRITERIA PASSED\n";
    else
        os << ck.failures << " CRITERIA FAILED\n";
    return ck.failures;
}

}  // namespace qslab
