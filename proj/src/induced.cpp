#include "qslab/induced.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qslab/errors.hpp"

namespace qslab {

namespace {

int eval_local(const Rule& rule, const std::vector<int>& tuple) {
    if (std::holds_alternative<LinearRule>(rule)) {
        const auto& lin = std::get<LinearRule>(rule);
        int acc = 0, i = 0;
        for (const auto& [o, c] : lin.coeffs()) acc += c * tuple[static_cast<std::size_t>(i++)];
        return acc % lin.prime();
    }
    const auto& gen = std::get<GeneralRule>(rule);
    std::vector<std::uint8_t> word(tuple.size());
    for (std::size_t i = 0; i < tuple.size(); ++i)
        word[i] = static_cast<std::uint8_t>(tuple[i]);
    return gen.apply(word);
}

// direct evaluation of the image label at a single point
int image_label_at(const Rule& rule, const IntervalPartition& p, const TorusPoint& u) {
    auto nbhd = rule_neighbourhood(rule);
    std::vector<int> tuple(nbhd.size());
    for (std::size_t i = 0; i < nbhd.size(); ++i)
        tuple[i] = p.label_at(u.rotate(-nbhd[i]));
    return eval_local(rule, tuple);
}

// Parity sweep for boolean linear rules: cell 1 of the image is the
// symmetric difference of the translates of cell 1.  Coincident toggle
// points cancel in pairs, which is exactly the boundary cancellation
// that keeps the chopping counts at 2^nu rather than the crude bound.
IntervalPartition induced_blca(const LinearRule& rule, const IntervalPartition& p) {
    const Angle& angle = p.angle();
    std::vector<TorusPoint> toggles;
    const auto& arcs = p.arcs();
    if (!p.is_trivial()) {
        for (std::size_t i = 0; i < arcs.size(); ++i) {
            if (arcs[i].label != 1) continue;
            const TorusPoint& start = arcs[i].start;
            const TorusPoint& end = arcs[(i + 1) % arcs.size()].start;
            for (const auto& [b, c] : rule.coeffs()) {
                toggles.push_back(start.rotate(b));
                toggles.push_back(end.rotate(b));
            }
        }
    }
    std::sort(toggles.begin(), toggles.end(), [&](const TorusPoint& a, const TorusPoint& b) {
        if (a == b) return false;
        return compare(a, b, angle) == Ordering::Less;
    });
    std::vector<TorusPoint> bd;
    for (std::size_t i = 0; i < toggles.size();) {
        std::size_t j = i;
        while (j < toggles.size() && toggles[j] == toggles[i]) ++j;
        if ((j - i) % 2 == 1) bd.push_back(toggles[i]);
        i = j;
    }
    Rule r{rule};
    if (bd.empty()) {
        int label = image_label_at(r, p, TorusPoint::zero());
        return IntervalPartition::trivial(angle, 2, label);
    }
    int first = image_label_at(r, p, bd[0]);
    std::vector<Arc> out;
    out.reserve(bd.size());
    for (std::size_t i = 0; i < bd.size(); ++i)
        out.push_back(Arc{bd[i], (i % 2 == 0) ? first : 1 - first});
    return IntervalPartition::from_arcs(angle, 2, std::move(out));
}

}  // namespace

IntervalPartition induced_map(const Rule& rule, const IntervalPartition& p) {
    if (rule_alphabet(rule) != p.alphabet())
        throw std::invalid_argument("rule alphabet does not match partition alphabet");

    if (std::holds_alternative<LinearRule>(rule)) {
        const auto& lin = std::get<LinearRule>(rule);
        if (lin.prime() == 2) return induced_blca(lin, p);
    }

    auto nbhd = rule_neighbourhood(rule);
    std::vector<IntervalPartition> copies;
    copies.reserve(nbhd.size());
    for (long long b : nbhd) copies.push_back(p.rotate(TorusPoint::multiple(b)));
    RefineResult r = refine(copies);

    const auto& arcs = r.refined.arcs();
    std::vector<Arc> out;
    out.reserve(arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i)
        out.push_back(Arc{arcs[i].start, eval_local(rule, r.tuples[i])});
    if (r.refined.is_trivial())
        return IntervalPartition::trivial(p.angle(), p.alphabet(), out[0].label);
    return IntervalPartition::from_arcs(p.angle(), p.alphabet(), std::move(out));
}

IntervalPartition induced_iterate(const Rule& rule, const IntervalPartition& p,
                                  unsigned long long n, IterStrategy strategy) {
    if (n == 0) return p;
    if (strategy == IterStrategy::Power) {
        if (std::holds_alternative<LinearRule>(rule))
            return induced_map(Rule{power(std::get<LinearRule>(rule), n)}, p);
        strategy = IterStrategy::Step;  // general rules have no closed-form power
    }
    IntervalPartition cur = p;
    for (unsigned long long i = 0; i < n; ++i) cur = induced_map(rule, cur);
    return cur;
}

ChoppingSeries chopping_stats(const Rule& rule, const IntervalPartition& p, unsigned N,
                              std::size_t arc_budget) {
    ChoppingSeries out;
    out.counts.reserve(N + 1);
    out.counts.push_back(p.boundary_count());

    // powers of GF(2) rules stay bit-packed; other rules step, so dense
    // polynomial degrees never blow up
    const bool powerable = std::holds_alternative<LinearRule>(rule) &&
                           std::get<LinearRule>(rule).prime() == 2;
    IntervalPartition cur = p;
    for (unsigned n = 1; n <= N; ++n) {
        if (powerable) {
            cur = induced_map(Rule{power(std::get<LinearRule>(rule), n)}, p);
        } else {
            cur = induced_map(rule, cur);
        }
        if (cur.arcs().size() > arc_budget)
            throw ArcBudgetExceeded("chopping_stats: arc count " +
                                    std::to_string(cur.arcs().size()) + " exceeds budget");
        out.counts.push_back(cur.boundary_count());
    }

    double acc = 0;
    out.averages.assign(N + 1, 0.0);
    for (unsigned n = 1; n <= N; ++n) {
        acc += static_cast<double>(out.counts[n - 1]);
        out.averages[n] = acc / n;
    }
    if (N >= 2 && out.averages[N] > 0)
        out.exponent_log_ratio = std::log(out.averages[N]) / std::log(double(N));

    // least-squares slope of log counts against log n
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (unsigned n = 1; n <= N; ++n) {
        if (out.counts[n] == 0) continue;
        double x = std::log(double(n)), y = std::log(double(out.counts[n]));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    if (m >= 2) {
        double denom = double(m) * sxx - sx * sx;
        if (denom != 0) out.exponent_lsq = (double(m) * sxy - sx * sy) / denom;
    }
    return out;
}

std::string ChoppingSeries::to_csv() const {
    std::ostringstream os;
    os << "n,count,A(n),exponent_estimate\n";
    for (std::size_t n = 0; n < counts.size(); ++n) {
        os << n << "," << counts[n] << ",";
        if (n >= 1) os << averages[n];
        os << ",";
        if (n >= 2 && averages[n] > 0) os << std::log(averages[n]) / std::log(double(n));
        os << "\n";
    }
    return os.str();
}

LipschitzWitness lipschitz_witness(const Rule& rule, const IntervalPartition& p,
                                   const IntervalPartition& q) {
    IntervalPartition ip = induced_map(rule, p);
    IntervalPartition iq = induced_map(rule, q);
    LipschitzWitness out;
    out.lhs = sym_diff_distance(ip, iq, 48);
    Int a(rule_alphabet(rule));
    std::size_t b = rule_neighbourhood(rule).size();
    Int factor = 2 * Int(b);
    for (std::size_t i = 0; i < b; ++i) factor *= a;
    SymLen d = sym_diff_len(p, q);
    SymLen scaled(d.z * factor, d.q * Rat(factor));
    out.rhs = scaled.eval(p.angle(), 48);
    return out;
}

std::optional<TorusPoint> rotation_conjugacy_test(const IntervalPartition& p,
                                                  const IntervalPartition& q) {
    if (p.alphabet() != q.alphabet() || !(p.angle() == q.angle())) return std::nullopt;
    if (p.is_trivial() || q.is_trivial()) {
        if (p == q) return TorusPoint::zero();
        return std::nullopt;
    }
    if (p.boundary_count() != q.boundary_count()) return std::nullopt;
    const TorusPoint& anchor = q.arcs()[0].start;
    for (const Arc& a : p.arcs()) {
        TorusPoint t = anchor.sub(a.start);
        if (p.rotate(t) == q) return t;
    }
    return std::nullopt;
}

}  // namespace qslab
