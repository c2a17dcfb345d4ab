#pragma once

#include <cstdint>
#include <string>

#include "qslab/constructions.hpp"
#include "qslab/induced.hpp"
#include "qslab/trajectory.hpp"

namespace qslab {

// Flat config: one experiment per invocation; identical config + seed
// reproduce byte-identical reports.
struct ExperimentConfig {
    std::string experiment;        // chopping | rigidity | expansiveness |
                                   // nonrandomization | suites
    std::string angle_text = "cf:[0;1,...]";
    std::string rule_text = "lin:p=2:1+x^1";
    std::string partition_text = "sturmian";  // or halves | trivial | full text
    unsigned iterations = 512;     // chopping N / rigidity schedule length
    long long window = 1 << 20;
    unsigned samples = 10000;
    std::string delta_text = "1/16";     // nonrandomization block fraction
    unsigned recurrence_index = 3;       // nonrandomization k
    double target = 0.9;                 // expansiveness goal
    unsigned max_candidate = 40;         // expansiveness candidate cap
    unsigned max_steps = 12;             // expansiveness step budget
    unsigned grid_cases = 50;            // suites conjugacy grid size
    unsigned metric_cases = 20;          // suites metric grid size
    std::uint64_t seed = 1;
    unsigned precision_bits = 4096;
    std::string out_dir;

    std::string to_json_text() const;
    static ExperimentConfig from_json_text(const std::string& text);

    IntervalPartition make_partition() const;
    Angle make_angle() const { return Angle::from_text(angle_text); }
    Rule make_rule() const { return rule_from_text(rule_text); }
};

struct Report {
    std::string experiment;
    bool pass = false;
    std::string body_json;   // per-step records + summary, deterministic
    std::string series_csv;  // nonempty for chopping

    std::string to_json_text() const;
};

Report run_experiment(const ExperimentConfig& cfg);
Report run_chopping(const ExperimentConfig& cfg);
Report run_rigidity(const ExperimentConfig& cfg);
Report run_expansiveness(const ExperimentConfig& cfg);
Report run_nonrandomization(const ExperimentConfig& cfg);
Report run_suites(const ExperimentConfig& cfg);

// Certified check of (1/3) N^alpha < Atilde(N) <= 3 N^alpha for the
// running average Atilde(N) = S/N of 2^nu, with alpha = log2(3/2).
bool growth_sandwich_holds(unsigned long long N, unsigned long long S);

// Greedy expansiveness search state, exposed for tests and reports.
struct ExpansivenessStep {
    unsigned chosen_m = 0;        // applied Phi^(2^m)
    double measure = 0;           // r_k = lambda(P^k_1)
    double overlap = 0;           // lambda(P_1 cap rot(P_1)) at the chosen m
    bool recurrence_certified = false;  // overlap < r^2 held exactly
    bool recurrence_holds = false;      // r_{k+1} > (2 - r_k) r_k
};

struct ExpansivenessResult {
    std::vector<ExpansivenessStep> steps;
    double final_measure = 0;
    bool reached_target = false;
    bool inconclusive = false;  // budget ran out before the target
};

ExpansivenessResult expansiveness_search(const IntervalPartition& start, double target,
                                         unsigned max_candidate, unsigned max_steps);

}  // namespace qslab
