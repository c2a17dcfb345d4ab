#include "qslab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qslab/errors.hpp"

namespace qslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DoubleIv {
    double lo, hi;
};

DoubleIv to_double_iv(const RatInterval& iv) {
    double lo = std::nextafter(iv.lo.get_d(), -kInf);
    double hi = std::nextafter(iv.hi.get_d(), kInf);
    return {lo, hi};
}

// Point locator: certified double brackets per boundary, exact fallback.
class Locator {
public:
    explicit Locator(const IntervalPartition& p) : p_(p) {
        const auto& arcs = p.arcs();
        if (!p.is_trivial()) {
            starts_.reserve(arcs.size());
            for (const Arc& a : arcs) starts_.push_back(to_double_iv(eval_point(a.start, p.angle(), 80)));
        }
    }

    // label of the arc containing the cell point; (z, q) is the exact
    // point, [xlo, xhi] its certified double bracket
    int locate(double xlo, double xhi, long long z, const Rat& q) const {
        if (p_.is_trivial()) return p_.arcs()[0].label;
        const std::size_t n = starts_.size();
        double mid = 0.5 * (xlo + xhi);
        if (mid < starts_[0].lo) {
            // wrapped into the last arc, if certainly before the first start
            if (xhi < starts_[0].lo) return p_.arcs()[n - 1].label;
            return p_.label_at(TorusPoint(z, q));
        }
        std::size_t lo = 0, hi = n;
        while (hi - lo > 1) {
            std::size_t m = (lo + hi) / 2;
            if (starts_[m].lo <= mid)
                lo = m;
            else
                hi = m;
        }
        bool after = xlo > starts_[lo].hi;
        bool before = (lo + 1 < n) ? (xhi < starts_[lo + 1].lo)
                                   : (xhi < 1.0 + starts_[0].lo);
        if (after && before) return p_.arcs()[lo].label;
        return p_.label_at(TorusPoint(z, q));  // ambiguous: decide exactly
    }

private:
    const IntervalPartition& p_;
    std::vector<DoubleIv> starts_;
};

}  // namespace

SymbolWindow trajectory(const IntervalPartition& p, const TorusPoint& t, long long lo,
                        long long hi) {
    if (hi <= lo) throw std::invalid_argument("trajectory: empty window");
    SymbolWindow out;
    out.origin = lo;
    out.alphabet = p.alphabet();
    out.symbols.assign(static_cast<std::size_t>(hi - lo), 0);

    const Angle& angle = p.angle();
    DoubleIv a = to_double_iv(angle.eval(70));
    Locator locator(p);

    constexpr long long kReanchor = 1 << 16;
    double xlo = 0, xhi = 0;
    for (long long l = lo; l < hi; ++l) {
        long long idx = l - lo;
        if (idx % kReanchor == 0) {
            RatInterval anchor = eval_point(t.rotate(l), angle, 80);
            xlo = std::nextafter(anchor.lo.get_d(), -kInf);
            xhi = std::nextafter(anchor.hi.get_d(), kInf);
        } else {
            xlo = std::nextafter(xlo + a.lo, -kInf);
            xhi = std::nextafter(xhi + a.hi, kInf);
            if (xlo >= 1.0) {
                xlo -= 1.0;
                xhi -= 1.0;
            } else if (xhi >= 1.0) {
                // bracket straddles the wrap; re-anchor exactly
                RatInterval anchor = eval_point(t.rotate(l), angle, 80);
                xlo = std::nextafter(anchor.lo.get_d(), -kInf);
                xhi = std::nextafter(anchor.hi.get_d(), kInf);
            }
        }
        out.symbols[static_cast<std::size_t>(idx)] =
            static_cast<std::uint8_t>(locator.locate(xlo, xhi, t.z + l, t.q));
    }
    return out;
}

Rat besicovitch_estimate(const SymbolWindow& a, const SymbolWindow& b) {
    long long lo = std::max(a.lo(), b.lo());
    long long hi = std::min(a.hi(), b.hi());
    if (hi <= lo) throw EmptyOverlap("besicovitch_estimate: windows do not overlap");
    long long diff = 0;
    for (long long l = lo; l < hi; ++l)
        if (a.at(l) != b.at(l)) ++diff;
    return make_rat(to_int(diff), to_int(hi - lo));
}

bool conjugacy_check(const Rule& rule, const IntervalPartition& p, const TorusPoint& t,
                     unsigned n, long long window_lo, long long window_hi) {
    SymbolWindow traj = trajectory(p, t, window_lo, window_hi);
    SymbolWindow lhs = apply_window_n(rule, traj, n);
    IntervalPartition q = induced_iterate(rule, p, n);
    SymbolWindow rhs = trajectory(q, t, lhs.lo(), lhs.hi());
    return lhs.symbols == rhs.symbols && lhs.origin == rhs.origin;
}

MetricIdentity metric_identity_estimate(const IntervalPartition& p,
                                        const IntervalPartition& q, const TorusPoint& t,
                                        long long window_lo, long long window_hi) {
    MetricIdentity out;
    out.d_delta = sym_diff_distance(p, q, 48);
    SymbolWindow wp = trajectory(p, t, window_lo, window_hi);
    SymbolWindow wq = trajectory(q, t, window_lo, window_hi);
    out.twice_db = 2 * besicovitch_estimate(wp, wq);
    out.gap = std::abs(out.d_delta.mid_d() - out.twice_db.get_d());
    return out;
}

TilingReport verify_tiling(const SymbolWindow& w, const SymbolWindow& tile, int spacer,
                           const Rat& epsilon) {
    (void)epsilon;  // recorded by callers; the report carries raw numbers
    TilingReport out;
    out.density = 0;
    out.coverage = 0;
    const long long tile_len = tile.hi() - tile.lo();
    if (tile_len <= 0 || w.hi() - w.lo() < tile_len) return out;

    // tile occupies [j + tile.lo, j + tile.hi) for skeleton point j
    long long j_lo = w.lo() - tile.lo();
    long long j_hi = w.hi() - tile.hi();  // inclusive
    std::vector<long long> matches;
    for (long long j = j_lo; j <= j_hi; ++j) {
        bool ok = true;
        for (long long b = tile.lo(); b < tile.hi(); ++b) {
            if (w.at(j + b) != tile.at(b)) {
                ok = false;
                break;
            }
        }
        if (ok) matches.push_back(j);
    }

    // greedy left-to-right thinning enforces disjoint blocks (T1)
    long long last_end = std::numeric_limits<long long>::min();
    for (long long j : matches) {
        if (j + tile.lo() >= last_end) {
            out.skeleton.push_back(j);
            last_end = j + tile.hi();
        } else {
            ++out.overlap_violations;
        }
    }

    for (long long j : out.skeleton)
        for (long long b = tile.lo(); b < tile.hi(); ++b)
            if (w.at(j + b) != tile.at(b)) ++out.tile_mismatches;

    // spacer check away from the window edges, where a covering tile
    // could not have been missed
    std::vector<std::uint8_t> covered(w.symbols.size(), 0);
    for (long long j : out.skeleton)
        for (long long b = tile.lo(); b < tile.hi(); ++b)
            covered[static_cast<std::size_t>(j + b - w.lo())] = 1;
    long long margin_lo = w.lo() + tile_len;
    long long margin_hi = w.hi() - tile_len;
    for (long long l = margin_lo; l < margin_hi; ++l) {
        if (!covered[static_cast<std::size_t>(l - w.lo())] && w.at(l) != spacer)
            ++out.spacer_violations;
    }

    long long eligible = j_hi - j_lo + 1;
    if (eligible > 0)
        out.density = make_rat(to_int(static_cast<long long>(out.skeleton.size())), to_int(eligible));
    out.coverage = make_rat(to_int(static_cast<long long>(out.skeleton.size()) * tile_len),
                            to_int(w.hi() - w.lo()));
    return out;
}

std::string TilingReport::to_json() const {
    std::ostringstream os;
    os << "{\"skeleton_size\":" << skeleton.size()
       << ",\"density\":" << density.get_d()
       << ",\"overlap_violations\":" << overlap_violations
       << ",\"tile_mismatches\":" << tile_mismatches
       << ",\"spacer_violations\":" << spacer_violations
       << ",\"coverage\":" << coverage.get_d() << "}";
    return os.str();
}

}  // namespace qslab
