#include "qslab/partition.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "qslab/errors.hpp"

namespace qslab {

RatInterval SymLen::eval(const Angle& angle, unsigned k) const {
    if (sgn(z) == 0) return RatInterval::exact(q);
    unsigned zbits = static_cast<unsigned>(mpz_sizeinbase(z.get_mpz_t(), 2));
    RatInterval ia = angle.eval(k + zbits + 1);
    return ia * Rat(z) + q;
}

std::optional<Surd> SymLen::exact(const Angle& angle) const {
    auto shadow = angle.exact_value();
    if (!shadow) return std::nullopt;
    return *shadow * Rat(z) + q;
}

int sym_sign(const SymLen& v, const Angle& angle, unsigned budget_bits) {
    if (sgn(v.z) == 0) return sgn(v.q);
    if (auto s = v.exact(angle)) return s->sign();
    for (unsigned k = 64; k <= budget_bits; k *= 2) {
        RatInterval iv = v.eval(angle, k);
        if (sgn(iv.lo) > 0) return 1;
        if (sgn(iv.hi) < 0) return -1;
    }
    throw PrecisionExhausted("sym_sign: interval failed to separate from zero");
}

namespace {

// Boundary point decorated with its exact floor, so circle positions can
// be ordered and subtracted symbolically without further wrapping.
struct NormPoint {
    TorusPoint pt;
    Int fl;  // floor(z*a + q)

    // normalized symbolic position: value in [0,1)
    SymLen pos() const { return SymLen(to_int(pt.z), pt.q - Rat(fl)); }
};

Int certified_floor(const TorusPoint& p, const Angle& angle) {
    if (p.z == 0) {
        Int f;
        mpz_fdiv_q(f.get_mpz_t(), p.q.get_num().get_mpz_t(), p.q.get_den().get_mpz_t());
        return f;
    }
    if (auto shadow = angle.exact_value()) {
        Surd v = *shadow * to_rat(p.z) + p.q;
        return Int(v.floor());
    }
    unsigned prec = 64;
    for (int round = 0; round < 64; ++round) {
        RatInterval v = eval_linear(p.z, p.q, angle, prec);
        Int flo, fhi;
        mpz_fdiv_q(flo.get_mpz_t(), v.lo.get_num().get_mpz_t(), v.lo.get_den().get_mpz_t());
        mpz_fdiv_q(fhi.get_mpz_t(), v.hi.get_num().get_mpz_t(), v.hi.get_den().get_mpz_t());
        if (flo == fhi) return flo;
        prec *= 2;
    }
    throw PrecisionExhausted("certified_floor");
}

NormPoint normalize(const TorusPoint& p, const Angle& angle) {
    return NormPoint{p, certified_floor(p, angle)};
}

// strict order of normalized circle positions
bool norm_less(const NormPoint& a, const NormPoint& b, const Angle& angle) {
    if (a.pt == b.pt) return false;
    SymLen d = b.pos() - a.pos();
    return sym_sign(d, angle) > 0;
}

}  // namespace

IntervalPartition IntervalPartition::from_arcs(Angle angle, int alphabet,
                                               std::vector<Arc> arcs) {
    if (alphabet < 1) throw std::invalid_argument("alphabet size must be >= 1");
    if (arcs.empty()) throw std::invalid_argument("partition needs at least one arc");
    for (const Arc& a : arcs)
        if (a.label < 0 || a.label >= alphabet)
            throw std::invalid_argument("arc label out of range");

    std::vector<std::pair<NormPoint, int>> pts;
    pts.reserve(arcs.size());
    for (const Arc& a : arcs) pts.push_back({normalize(a.start, angle), a.label});
    std::sort(pts.begin(), pts.end(),
              [&](const auto& x, const auto& y) { return norm_less(x.first, y.first, angle); });
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        if (pts[i].first.pt == pts[i + 1].first.pt)
            throw std::invalid_argument("duplicate arc start");

    // canonical merge of equal-label neighbours, circularly
    std::vector<Arc> merged;
    for (const auto& [np, label] : pts) {
        if (!merged.empty() && merged.back().label == label) continue;
        merged.push_back(Arc{np.pt, label});
    }
    while (merged.size() > 1 && merged.front().label == merged.back().label)
        merged.erase(merged.begin());

    IntervalPartition out;
    out.angle_ = std::move(angle);
    out.alphabet_ = alphabet;
    if (merged.size() == 1) {
        out.arcs_ = {Arc{TorusPoint::zero(), merged.front().label}};
    } else {
        out.arcs_ = std::move(merged);
    }
    return out;
}

IntervalPartition IntervalPartition::trivial(Angle angle, int alphabet, int label) {
    return from_arcs(std::move(angle), alphabet, {Arc{TorusPoint::zero(), label}});
}

IntervalPartition IntervalPartition::sturmian(Angle angle) {
    std::vector<Arc> arcs{Arc{TorusPoint::zero(), 1}, Arc{TorusPoint::multiple(1), 0}};
    return from_arcs(std::move(angle), 2, std::move(arcs));
}

IntervalPartition IntervalPartition::halves(Angle angle) {
    std::vector<Arc> arcs{Arc{TorusPoint::zero(), 1},
                          Arc{TorusPoint::rational(Rat(1, 2)), 0}};
    return from_arcs(std::move(angle), 2, std::move(arcs));
}

BoundarySet IntervalPartition::boundary() const {
    if (is_trivial()) return {};
    std::vector<TorusPoint> out;
    out.reserve(arcs_.size());
    for (const Arc& a : arcs_) out.push_back(a.start);
    return out;
}

int IntervalPartition::label_at(const TorusPoint& t) const {
    if (is_trivial()) return arcs_[0].label;
    // last start <= t, circularly; t before the first start wraps to the last arc
    std::size_t lo = 0, hi = arcs_.size();
    if (compare(t, arcs_[0].start, angle_) == Ordering::Less) return arcs_.back().label;
    // binary search for the last i with start_i <= t
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (compare(arcs_[mid].start, t, angle_) != Ordering::Greater)
            lo = mid;
        else
            hi = mid;
    }
    return arcs_[lo].label;
}

IntervalPartition IntervalPartition::rotate(const TorusPoint& t) const {
    std::vector<Arc> arcs = arcs_;
    for (Arc& a : arcs) a.start = a.start.add(t);
    return from_arcs(angle_, alphabet_, std::move(arcs));
}

IntervalPartition IntervalPartition::with_alphabet(int alphabet) const {
    return from_arcs(angle_, alphabet, arcs_);
}

std::vector<SymLen> IntervalPartition::cell_measures() const {
    std::vector<SymLen> out(static_cast<std::size_t>(alphabet_));
    if (is_trivial()) {
        out[static_cast<std::size_t>(arcs_[0].label)] = SymLen(Int(0), Rat(1));
        return out;
    }
    std::vector<NormPoint> nps;
    nps.reserve(arcs_.size());
    for (const Arc& a : arcs_) nps.push_back(normalize(a.start, angle_));
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
        std::size_t j = (i + 1) % arcs_.size();
        SymLen len = nps[j].pos() - nps[i].pos();
        if (j == 0) len += SymLen(Int(0), Rat(1));  // wrap
        out[static_cast<std::size_t>(arcs_[i].label)] += len;
    }
    return out;
}

SymLen IntervalPartition::cell_measure(int label) const {
    return cell_measures()[static_cast<std::size_t>(label)];
}

SymLen total_measure(const IntervalPartition& p) {
    SymLen total;
    for (const SymLen& m : p.cell_measures()) total += m;
    return total;
}

bool IntervalPartition::operator==(const IntervalPartition& o) const {
    if (!(angle_ == o.angle_) || alphabet_ != o.alphabet_ || arcs_.size() != o.arcs_.size())
        return false;
    for (std::size_t i = 0; i < arcs_.size(); ++i)
        if (arcs_[i].label != o.arcs_[i].label || arcs_[i].start != o.arcs_[i].start)
            return false;
    return true;
}

std::string IntervalPartition::to_text() const {
    std::ostringstream os;
    os << angle_.to_text() << " | ";
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
        if (i) os << ", ";
        os << arcs_[i].start.to_text() << ":" << arcs_[i].label;
    }
    return os.str();
}

IntervalPartition IntervalPartition::from_text(const std::string& text, int alphabet) {
    auto bar = text.find(" | ");
    if (bar == std::string::npos) throw ParseError("bad partition: " + text);
    Angle angle = Angle::from_text(text.substr(0, bar));
    std::string body = text.substr(bar + 3);
    std::vector<Arc> arcs;
    std::istringstream is(body);
    std::string tok;
    int max_label = 0;
    while (std::getline(is, tok, ',')) {
        auto b = tok.find_first_not_of(' ');
        tok = tok.substr(b);
        auto colon = tok.rfind(':');
        if (colon == std::string::npos) throw ParseError("bad arc: " + tok);
        Arc a;
        a.start = TorusPoint::from_text(tok.substr(0, colon));
        a.label = std::stoi(tok.substr(colon + 1));
        max_label = std::max(max_label, a.label);
        arcs.push_back(std::move(a));
    }
    int A = alphabet > 0 ? alphabet : max_label + 1;
    return from_arcs(std::move(angle), A, std::move(arcs));
}

RefineResult refine(const std::vector<IntervalPartition>& parts) {
    if (parts.empty()) throw std::invalid_argument("refine needs at least one partition");
    const Angle& angle = parts[0].angle();
    for (const auto& p : parts)
        if (!(p.angle() == angle)) throw std::invalid_argument("refine: mixed angles");

    struct Event {
        NormPoint np;
        std::vector<std::pair<std::size_t, std::size_t>> hits;  // (partition, arc index)
    };
    std::vector<Event> events;
    for (std::size_t j = 0; j < parts.size(); ++j) {
        if (parts[j].is_trivial()) continue;
        const auto& arcs = parts[j].arcs();
        for (std::size_t i = 0; i < arcs.size(); ++i)
            events.push_back(Event{normalize(arcs[i].start, angle), {{j, i}}});
    }

    RefineResult out;
    if (events.empty()) {
        // all inputs trivial: one arc, one tuple
        std::vector<int> tuple;
        for (const auto& p : parts) tuple.push_back(p.arcs()[0].label);
        out.tuples = {tuple};
        out.refined = IntervalPartition::from_arcs(angle, 1, {Arc{TorusPoint::zero(), 0}});
        return out;
    }

    std::sort(events.begin(), events.end(),
              [&](const Event& a, const Event& b) { return norm_less(a.np, b.np, angle); });
    std::vector<Event> merged;
    for (auto& e : events) {
        if (!merged.empty() && merged.back().np.pt == e.np.pt) {
            merged.back().hits.push_back(e.hits[0]);
        } else {
            merged.push_back(std::move(e));
        }
    }

    // current arc of each input on the segment starting at each event:
    // initialized from the final state of a full sweep (labels change only
    // at that input's own boundary events)
    const std::size_t m = merged.size();
    std::vector<int> cur(parts.size(), -1);
    for (std::size_t pass = 0; pass < 2; ++pass) {
        for (std::size_t e = 0; e < m; ++e) {
            for (auto [j, i] : merged[e].hits) cur[j] = parts[j].arcs()[i].label;
            if (pass == 1) {
                std::vector<int> tuple(parts.size());
                for (std::size_t j = 0; j < parts.size(); ++j) {
                    tuple[j] = parts[j].is_trivial() ? parts[j].arcs()[0].label : cur[j];
                }
                out.tuples.push_back(std::move(tuple));
            }
        }
        if (pass == 1) break;
        // after pass 0, cur holds each input's label just before merged[0]
    }

    std::map<std::vector<int>, int> tuple_ids;
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> distinct;
    arcs.reserve(m);
    for (std::size_t e = 0; e < m; ++e) {
        auto [it, inserted] = tuple_ids.try_emplace(out.tuples[e],
                                                    static_cast<int>(distinct.size()));
        if (inserted) distinct.push_back(out.tuples[e]);
        arcs.push_back(Arc{merged[e].np.pt, it->second});
    }
    out.refined = IntervalPartition::from_arcs(angle, static_cast<int>(distinct.size()),
                                               std::move(arcs));
    // adjacent tuples always differ in the coordinate whose boundary fired,
    // so the canonical merge cannot have dropped arcs
    return out;
}

SymLen sym_diff_len(const IntervalPartition& p, const IntervalPartition& q) {
    if (!(p.angle() == q.angle())) throw std::invalid_argument("sym_diff: mixed angles");
    if (p.alphabet() != q.alphabet()) throw std::invalid_argument("sym_diff: mixed alphabets");
    const Angle& angle = p.angle();
    RefineResult r = refine({p, q});
    const auto& arcs = r.refined.arcs();
    if (r.refined.is_trivial()) {
        const auto& t = r.tuples[0];
        return t[0] == t[1] ? SymLen() : SymLen(Int(0), Rat(2));
    }
    std::vector<NormPoint> nps;
    nps.reserve(arcs.size());
    for (const Arc& a : arcs) nps.push_back(normalize(a.start, angle));
    SymLen differing;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        const auto& tuple = r.tuples[i];
        if (tuple[0] == tuple[1]) continue;
        std::size_t j = (i + 1) % arcs.size();
        SymLen len = nps[j].pos() - nps[i].pos();
        if (j == 0) len += SymLen(Int(0), Rat(1));
        differing += len;
    }
    return differing * 2;
}

RatInterval sym_diff_distance(const IntervalPartition& p, const IntervalPartition& q,
                              unsigned k) {
    return sym_diff_len(p, q).eval(p.angle(), k);
}

SymLen joint_cell_measure(const IntervalPartition& p, const IntervalPartition& q,
                          int label_p, int label_q) {
    const Angle& angle = p.angle();
    RefineResult r = refine({p, q});
    if (r.refined.is_trivial()) {
        const auto& t = r.tuples[0];
        return (t[0] == label_p && t[1] == label_q) ? SymLen(Int(0), Rat(1)) : SymLen();
    }
    const auto& arcs = r.refined.arcs();
    std::vector<NormPoint> nps;
    nps.reserve(arcs.size());
    for (const Arc& a : arcs) nps.push_back(normalize(a.start, angle));
    SymLen total;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        const auto& tuple = r.tuples[i];
        if (tuple[0] != label_p || tuple[1] != label_q) continue;
        std::size_t j = (i + 1) % arcs.size();
        SymLen len = nps[j].pos() - nps[i].pos();
        if (j == 0) len += SymLen(Int(0), Rat(1));
        total += len;
    }
    return total;
}

std::pair<bool, std::optional<TorusPoint>> is_simple(const IntervalPartition& p) {
    if (p.is_trivial()) throw std::invalid_argument("is_simple: trivial partition");
    auto bd = p.boundary();
    // a symmetry permutes the boundary, so it maps bd[0] to some bd[i]
    for (std::size_t i = 1; i < bd.size(); ++i) {
        TorusPoint t = bd[i].sub(bd[0]);
        if (p.rotate(t) == p) return {false, t};
    }
    return {true, std::nullopt};
}

bool is_primitive(const IntervalPartition& p) {
    auto bd = p.boundary();
    // an s-local symmetry with s = b_i - b_j lands in Z*a + (Q \ {0})
    // exactly when two boundary points carry different rational offsets
    for (std::size_t i = 1; i < bd.size(); ++i)
        if (bd[i].q != bd[0].q) return false;
    return true;
}

BoundarySet transversal_boundary(const IntervalPartition& p) {
    auto bd = p.boundary();
    BoundarySet out;
    for (std::size_t i = 0; i < bd.size(); ++i) {
        bool alone = true;
        for (std::size_t j = 0; j < bd.size(); ++j) {
            if (i != j && bd[i].q == bd[j].q) { alone = false; break; }
        }
        if (alone) out.push_back(bd[i]);
    }
    return out;
}

}  // namespace qslab
