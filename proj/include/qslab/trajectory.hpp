#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qslab/induced.hpp"
#include "qslab/partition.hpp"
#include "qslab/rule.hpp"

namespace qslab {

// Symbol at cell l is the label of the arc containing frac(t + l*a);
// boundary hits resolve to the half-open arc starting there.  Long
// windows run on a certified double-interval fast path with exact
// fallback at ambiguous cells.
SymbolWindow trajectory(const IntervalPartition& p, const TorusPoint& t, long long lo,
                        long long hi);

// Fraction of disagreeing cells over the common domain (finite-window
// proxy for the Besicovitch pseudometric).
Rat besicovitch_estimate(const SymbolWindow& a, const SymbolWindow& b);

// Master consistency oracle: the CA applied to the trajectory must equal
// the trajectory of the induced partition, cell for cell.
bool conjugacy_check(const Rule& rule, const IntervalPartition& p, const TorusPoint& t,
                     unsigned n, long long window_lo, long long window_hi);

struct MetricIdentity {
    RatInterval d_delta;   // certified d(P,Q)
    Rat twice_db;          // 2 * finite-window Besicovitch estimate
    double gap;            // | mid(d_delta) - twice_db |
};

MetricIdentity metric_identity_estimate(const IntervalPartition& p,
                                        const IntervalPartition& q, const TorusPoint& t,
                                        long long window_lo, long long window_hi);

struct TilingReport {
    std::vector<long long> skeleton;  // greedily thinned to satisfy T1
    Rat density;                      // skeleton count / eligible positions
    std::size_t overlap_violations = 0;  // matches dropped by the greedy pass
    std::size_t tile_mismatches = 0;     // T3 violations (zero by construction)
    std::size_t spacer_violations = 0;   // T4 violations away from the window edges
    Rat coverage;                        // covered fraction of the window

    std::string to_json() const;
};

// Skeleton = every position whose tile-sized block equals the tile,
// thinned left to right so blocks are disjoint; reports coverage and
// spacer violations outside skeleton + block.
TilingReport verify_tiling(const SymbolWindow& w, const SymbolWindow& tile, int spacer,
                           const Rat& epsilon);

}  // namespace qslab
