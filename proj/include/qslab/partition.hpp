#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qslab/torus.hpp"

namespace qslab {

// Length (or signed measure) of the form z*a + q, kept symbolic until a
// single certified evaluation.  No rounding error accumulates across
// refinements.
struct SymLen {
    Int z = 0;
    Rat q = 0;

    SymLen() = default;
    SymLen(Int z_, Rat q_) : z(std::move(z_)), q(std::move(q_)) {}

    SymLen& operator+=(const SymLen& o) { z += o.z; q += o.q; return *this; }
    SymLen& operator-=(const SymLen& o) { z -= o.z; q -= o.q; return *this; }
    SymLen operator+(const SymLen& o) const { return {z + o.z, q + o.q}; }
    SymLen operator-(const SymLen& o) const { return {z - o.z, q - o.q}; }
    SymLen operator*(long c) const { return {z * c, q * c}; }
    bool operator==(const SymLen& o) const { return z == o.z && q == o.q; }
    bool is_zero() const { return sgn(z) == 0 && sgn(q) == 0; }

    RatInterval eval(const Angle& angle, unsigned k) const;
    std::optional<Surd> exact(const Angle& angle) const;
    double approx(const Angle& angle) const { return eval(angle, 52).mid_d(); }
};

// certified sign; exact for shadow angles, interval refinement otherwise
int sym_sign(const SymLen& v, const Angle& angle, unsigned budget_bits = kDefaultBudgetBits);

struct Arc {
    TorusPoint start;
    int label = 0;
};

// label-change points of a partition; empty iff the partition is trivial
using BoundarySet = std::vector<TorusPoint>;

// Labelled cyclic partition of the circle into half-open arcs
// [start_i, start_{i+1}) with exact boundary points.  Canonical form:
// starts strictly increasing in circular order, adjacent arcs carry
// different labels, and the trivial partition is the single arc
// [0,1) based at zero.
class IntervalPartition {
public:
    IntervalPartition() = default;

    static IntervalPartition from_arcs(Angle angle, int alphabet, std::vector<Arc> arcs);
    static IntervalPartition trivial(Angle angle, int alphabet = 2, int label = 0);
    // {[0,a) -> 1, [a,1) -> 0}
    static IntervalPartition sturmian(Angle angle);
    // {[0,1/2) -> 1, [1/2,1) -> 0}
    static IntervalPartition halves(Angle angle);

    const Angle& angle() const { return angle_; }
    int alphabet() const { return alphabet_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    bool is_trivial() const { return arcs_.size() == 1; }

    // label-change points; empty iff trivial
    BoundarySet boundary() const;
    std::size_t boundary_count() const { return is_trivial() ? 0 : arcs_.size(); }

    int label_at(const TorusPoint& t) const;

    // cells translated forward by t
    IntervalPartition rotate(const TorusPoint& t) const;
    IntervalPartition with_alphabet(int alphabet) const;

    std::vector<SymLen> cell_measures() const;
    SymLen cell_measure(int label) const;

    bool operator==(const IntervalPartition& o) const;
    bool operator!=(const IntervalPartition& o) const { return !(*this == o); }

    std::string to_text() const;
    static IntervalPartition from_text(const std::string& text, int alphabet = -1);

private:
    Angle angle_ = Angle::golden_conjugate();
    int alphabet_ = 2;
    std::vector<Arc> arcs_;
};

struct RefineResult {
    IntervalPartition refined;             // labels are ids of distinct tuples
    std::vector<std::vector<int>> tuples;  // tuples[i] belongs to refined.arcs()[i]
};

// Common refinement; each output arc records the tuple of input labels,
// determined combinatorially during the circular sweep.
RefineResult refine(const std::vector<IntervalPartition>& parts);

// Sum_a lambda(P_a symdiff Q_a) as a certified bracket of width <= 2^-k.
RatInterval sym_diff_distance(const IntervalPartition& p, const IntervalPartition& q,
                              unsigned k);
// Exact symbolic form of the same quantity.
SymLen sym_diff_len(const IntervalPartition& p, const IntervalPartition& q);

// true iff no nonzero t with rot_t(P) = P; returns a witness otherwise
std::pair<bool, std::optional<TorusPoint>> is_simple(const IntervalPartition& p);

// true iff all boundary points share the same rational offset mod 1
bool is_primitive(const IntervalPartition& p);

// boundary points whose rotation orbit meets the boundary only once
BoundarySet transversal_boundary(const IntervalPartition& p);

// total of all cell measures, symbolically (must equal 0*a + 1)
SymLen total_measure(const IntervalPartition& p);

// lambda(P_a intersect Q_b), exact
SymLen joint_cell_measure(const IntervalPartition& p, const IntervalPartition& q,
                          int label_p, int label_q);

}  // namespace qslab
