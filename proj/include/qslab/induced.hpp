#pragma once

#include <optional>
#include <string>

#include "qslab/partition.hpp"
#include "qslab/rule.hpp"

namespace qslab {

// Q_a = union over words c with phi(c) = a of the intersections of the
// pulled-back cells; trajectories commute: Phi(traj_P(t)) = traj_Q(t).
// Boolean linear rules take a parity-sweep fast path on cell 1, which
// performs the exact cancellation of coincident boundary points.
IntervalPartition induced_map(const Rule& rule, const IntervalPartition& p);

enum class IterStrategy { Step, Power };

// Phi_T^n(P).  Step composes n single applications; Power applies the
// n-th power of the rule once.  Both agree exactly.
IntervalPartition induced_iterate(const Rule& rule, const IntervalPartition& p,
                                  unsigned long long n,
                                  IterStrategy strategy = IterStrategy::Power);

struct ChoppingSeries {
    std::vector<std::size_t> counts;  // #boundary(Phi_T^n P), n = 0..N
    // A(n) = (1/n) sum_{m<n} counts[m], n >= 1
    std::vector<double> averages;
    double exponent_log_ratio = 0;  // log A(N) / log N
    double exponent_lsq = 0;        // least-squares slope of log counts vs log n

    std::string to_csv() const;
};

ChoppingSeries chopping_stats(const Rule& rule, const IntervalPartition& p, unsigned N,
                              std::size_t arc_budget = std::size_t(1) << 22);

struct LipschitzWitness {
    RatInterval lhs;  // d(Phi_T P, Phi_T Q)
    RatInterval rhs;  // 2 B A^B d(P, Q)
};

LipschitzWitness lipschitz_witness(const Rule& rule, const IntervalPartition& p,
                                   const IntervalPartition& q);

// First t with rot_t(P) = Q among the differences of Q's first boundary
// point against each boundary point of P; none when no rotation works.
std::optional<TorusPoint> rotation_conjugacy_test(const IntervalPartition& p,
                                                  const IntervalPartition& q);

}  // namespace qslab
