#pragma once

#include <optional>

#include "qslab/partition.hpp"
#include "qslab/rule.hpp"
#include "qslab/trajectory.hpp"

namespace qslab {

// Rokhlin tower for the rotation: base J = [0, delta) whose translates
// by b in [-N, N) are pairwise disjoint.  delta is the exact minimum of
// ||j*a|| over 0 < j < 2N, so the reported quality is honest; callers
// pick an angle/height pairing that makes it good.
struct TowerSpec {
    Angle angle;
    long long half_height = 1;  // levels indexed by [-N, N)
    SymLen delta;               // base length, exact
    double achieved_epsilon = 1;  // 1 - 2N*delta

    TorusPoint base_end() const;  // right endpoint of J
    long long height() const { return 2 * half_height; }

    std::string to_json() const;
};

TowerSpec build_tower(const Angle& angle, long long half_height, const Rat& eps_target);

// Exact pairwise-disjointness check of the tower levels (test support).
bool verify_tower_disjoint(const TowerSpec& tower);

// Largest-coverage height <= max_half_height; throws EpsilonUnreachable
// when nothing meets the target.
long long choose_tower_height(const Angle& angle, const Rat& eps_target,
                              long long max_half_height);

// P_a = union of levels painted a; the spacer cell absorbs the rest.
IntervalPartition paint(const TowerSpec& tower, const SymbolWindow& word, int spacer);

// Subshift with an inert spacer whose admissible blocks extend to
// configurations that are spacer outside a bounded window.  The built-in
// instance is the fixed-point shift of the majority-of-3 rule:
// admissible iff every interior maximal run has length >= 2.
struct DirichletSft {
    int alphabet = 2;
    int spacer = 0;
    int valence = 2;

    static DirichletSft majority_fixed_points() { return DirichletSft{}; }

    bool admissible(const SymbolWindow& w) const;
    std::size_t count_violations(const SymbolWindow& w) const;
};

// Widens the core by the valence on each side: agrees with the core on
// its interior, spacer outside, admissible everywhere.
SymbolWindow dirichlet_extension(const DirichletSft& sft, const SymbolWindow& core);

struct QsSftPoint {
    IntervalPartition partition;
    TorusPoint base_point;  // lies inside the tower base
    SymbolWindow word;      // the painted word
};

// Paints a tower with a Dirichlet-extended nonconstant word, yielding a
// quasisturmian point whose trajectory is admissible on every window.
QsSftPoint qs_point_in_sft(const DirichletSft& sft, const Angle& angle, const Rat& eps,
                           long long max_half_height = 1 << 14);

struct PreimageResult {
    IntervalPartition preimage;       // Q_eps
    RatInterval certified_distance;   // d(Phi_T(Q_eps), target)
    double tower_epsilon = 1;
};

// Constructive approximation: paints the target onto a tower, solves the
// window preimage under 1 + x by prefix summation, and paints that word
// back.  Only 1 + x over Z/2 ships a preimage solver.
PreimageResult surjective_preimage_partition(const LinearRule& rule,
                                             const IntervalPartition& target,
                                             const Rat& eps,
                                             long long max_half_height = 1 << 15);

}  // namespace qslab
