#include "qslab/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qslab/errors.hpp"

namespace qslab {

TorusPoint TowerSpec::base_end() const {
    if (!delta.z.fits_slong_p()) throw std::logic_error("tower delta z out of range");
    return TorusPoint(delta.z.get_si(), delta.q);
}

std::string TowerSpec::to_json() const {
    std::ostringstream os;
    os << "{\"half_height\":" << half_height
       << ",\"delta\":" << delta.approx(angle)
       << ",\"achieved_epsilon\":" << achieved_epsilon
       << ",\"angle\":\"" << angle.to_text() << "\"}";
    return os.str();
}

namespace {

Int floor_of_multiple(long long j, const Angle& angle) {
    if (auto shadow = angle.exact_value()) {
        Surd v = *shadow * to_rat(j);
        return Int(v.floor());
    }
    unsigned prec = 64;
    for (int round = 0; round < 64; ++round) {
        RatInterval v = eval_linear(j, Rat(0), angle, prec);
        Int flo, fhi;
        mpz_fdiv_q(flo.get_mpz_t(), v.lo.get_num().get_mpz_t(), v.lo.get_den().get_mpz_t());
        mpz_fdiv_q(fhi.get_mpz_t(), v.hi.get_num().get_mpz_t(), v.hi.get_den().get_mpz_t());
        if (flo == fhi) return flo;
        prec *= 2;
    }
    throw PrecisionExhausted("floor_of_multiple");
}

// ||j a||: min(frac(j a), 1 - frac(j a)), exact
SymLen norm_of_multiple(long long j, const Angle& angle) {
    Int fl = floor_of_multiple(j, angle);
    SymLen frac(to_int(j), -Rat(fl));
    SymLen comp(to_int(-j), Rat(fl) + 1);
    return sym_sign(frac - comp, angle) < 0 ? frac : comp;
}

}  // namespace

TowerSpec build_tower(const Angle& angle, long long half_height, const Rat& eps_target) {
    if (half_height < 1) throw std::invalid_argument("tower height must be >= 1");
    if (eps_target <= 0 || eps_target >= 1)
        throw std::invalid_argument("epsilon target must lie in (0,1)");
    const long long span = 2 * half_height;

    SymLen best;
    bool have = false;
    for (long long j = 1; j < span; ++j) {
        SymLen nj = norm_of_multiple(j, angle);
        if (!have || sym_sign(nj - best, angle) < 0) {
            best = nj;
            have = true;
        }
    }

    TowerSpec spec{angle, half_height, best, 1.0};
    // achieved epsilon: 1 - 2N * delta
    SymLen covered = best * span;
    SymLen achieved = SymLen(Int(0), Rat(1)) - covered;
    spec.achieved_epsilon = achieved.approx(angle);
    // success iff achieved <= eps_target, decided exactly
    SymLen slack = covered - SymLen(Int(0), Rat(1) - eps_target);
    if (sym_sign(slack, angle) < 0)
        throw EpsilonUnreachable(
            "tower of height " + std::to_string(span) + " only reaches epsilon " +
                std::to_string(spec.achieved_epsilon) +
                "; pick a height matching a continued-fraction denominator of the angle "
                "(e.g. high_partial_quotient(M) with M = 2N)",
            spec.achieved_epsilon);
    return spec;
}

bool verify_tower_disjoint(const TowerSpec& tower) {
    const Angle& angle = tower.angle;
    const long long N = tower.half_height;
    // levels [b a, b a + delta): disjoint iff ||(b1-b2) a|| >= delta for
    // all distinct pairs; check the difference set directly
    for (long long d = 1; d < 2 * N; ++d) {
        SymLen nd = norm_of_multiple(d, angle);
        if (sym_sign(nd - tower.delta, angle) < 0) return false;
    }
    return true;
}

long long choose_tower_height(const Angle& angle, const Rat& eps_target,
                              long long max_half_height) {
    // scan with doubles: coverage(N) = 2N * min_{j<2N} ||j a||
    double a = angle.approx();
    double prefmin = 1.0;
    long long best_n = 0;
    double best_cov = -1;
    const double target = 1.0 - eps_target.get_d();
    for (long long j = 1; j < 2 * max_half_height; ++j) {
        double fj = std::fmod(a * double(j), 1.0);
        double nj = std::min(fj, 1.0 - fj);
        prefmin = std::min(prefmin, nj);
        if (j % 2 == 1) {
            long long n = (j + 1) / 2;  // 2N = j + 1
            double cov = double(j + 1) * prefmin;
            if (cov > best_cov) {
                best_cov = cov;
                best_n = n;
            }
        }
    }
    if (best_cov >= target) return best_n;
    throw EpsilonUnreachable("no tower height up to " + std::to_string(max_half_height) +
                                 " reaches the target epsilon for this angle",
                             1.0 - best_cov);
}

IntervalPartition paint(const TowerSpec& tower, const SymbolWindow& word, int spacer) {
    const long long N = tower.half_height;
    if (word.lo() != -N || word.hi() != N)
        throw std::invalid_argument("paint: word must be indexed by [-N, N)");
    int alphabet = word.alphabet;
    if (spacer < 0 || spacer >= alphabet) throw std::invalid_argument("paint: bad spacer");

    const Angle& angle = tower.angle;
    const TorusPoint dend = tower.base_end();

    // segment labels: level starts paint their word symbol, level ends
    // fall back to spacer unless another level starts there
    struct Ev {
        TorusPoint pt;
        int start_label;  // -1 for plain end events
    };
    std::vector<Ev> evs;
    evs.reserve(static_cast<std::size_t>(4 * N));
    for (long long b = -N; b < N; ++b) {
        evs.push_back(Ev{TorusPoint::multiple(b), word.at(b)});
        evs.push_back(Ev{dend.rotate(b), -1});
    }
    std::sort(evs.begin(), evs.end(), [&](const Ev& a, const Ev& b) {
        if (a.pt == b.pt) return a.start_label > b.start_label;  // starts first
        return compare(a.pt, b.pt, angle) == Ordering::Less;
    });
    std::vector<Arc> arcs;
    for (std::size_t i = 0; i < evs.size();) {
        std::size_t j = i;
        int label = -1;
        while (j < evs.size() && evs[j].pt == evs[i].pt) {
            label = std::max(label, evs[j].start_label);
            ++j;
        }
        arcs.push_back(Arc{evs[i].pt, label >= 0 ? label : spacer});
        i = j;
    }
    return IntervalPartition::from_arcs(angle, alphabet, std::move(arcs));
}

bool DirichletSft::admissible(const SymbolWindow& w) const {
    return count_violations(w) == 0;
}

std::size_t DirichletSft::count_violations(const SymbolWindow& w) const {
    // fixed points of majority-of-3: every maximal run has length >= 2;
    // runs touching the window edge may continue outside and are exempt
    std::size_t violations = 0;
    const auto& s = w.symbols;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i]) ++j;
        bool interior = (i > 0) && (j < s.size());
        if (interior && j - i < 2) ++violations;
        i = j;
    }
    return violations;
}

SymbolWindow dirichlet_extension(const DirichletSft& sft, const SymbolWindow& core) {
    if (!sft.admissible(core))
        throw CoreNotAdmissible("dirichlet_extension: core has an interior run of length 1");
    const int V = sft.valence;
    SymbolWindow out;
    out.alphabet = core.alphabet;
    out.origin = core.origin - V;
    out.symbols.assign(core.symbols.size() + 2 * static_cast<std::size_t>(V),
                       static_cast<std::uint8_t>(sft.spacer));
    std::copy(core.symbols.begin(), core.symbols.end(), out.symbols.begin() + V);

    // a non-spacer edge run of length 1 would become an interior
    // singleton once flanked by spacer; flip it to the spacer
    auto& s = out.symbols;
    std::size_t lo = static_cast<std::size_t>(V);
    std::size_t hi = lo + core.symbols.size();
    if (core.symbols.size() >= 1) {
        if (s[lo] != sft.spacer && (core.symbols.size() == 1 || s[lo + 1] != s[lo]))
            s[lo] = static_cast<std::uint8_t>(sft.spacer);
        if (s[hi - 1] != sft.spacer && (core.symbols.size() == 1 || s[hi - 2] != s[hi - 1]))
            s[hi - 1] = static_cast<std::uint8_t>(sft.spacer);
    }
    if (!sft.admissible(out))
        throw CoreNotAdmissible("dirichlet_extension: seam fix failed");
    return out;
}

QsSftPoint qs_point_in_sft(const DirichletSft& sft, const Angle& angle, const Rat& eps,
                           long long max_half_height) {
    long long N = choose_tower_height(angle, eps, max_half_height);
    const int V = sft.valence;
    if (2 * N < 2 * V + 6) throw EpsilonUnreachable("tower too short for a nonconstant word", 1);
    TowerSpec tower = build_tower(angle, N, eps);

    // nonconstant admissible core: a centered pair of 1s in a sea of spacer
    SymbolWindow core;
    core.alphabet = sft.alphabet;
    core.origin = -(N - V);
    core.symbols.assign(static_cast<std::size_t>(2 * (N - V)),
                        static_cast<std::uint8_t>(sft.spacer));
    std::size_t mid = core.symbols.size() / 2;
    core.symbols[mid] = 1;
    core.symbols[mid + 1] = 1;

    SymbolWindow word = dirichlet_extension(sft, core);
    IntervalPartition painted = paint(tower, word, sft.spacer);

    // base point strictly inside J = [0, delta)
    RatInterval div = tower.delta.eval(angle, 20);
    unsigned k = 20;
    while (div.lo <= 0) div = tower.delta.eval(angle, k *= 2);
    TorusPoint t = TorusPoint::rational(div.lo / 2);
    return QsSftPoint{painted, t, word};
}

PreimageResult surjective_preimage_partition(const LinearRule& rule,
                                             const IntervalPartition& target,
                                             const Rat& eps, long long max_half_height) {
    if (rule.prime() != 2 || !(rule == LinearRule::one_plus_x()))
        throw PreimageFailed("only the 1 + x preimage solver ships");
    if (eps <= 0) throw std::invalid_argument("eps must be positive");
    const Angle& angle = target.angle();

    if (target.is_trivial()) {
        // Phi_T fixes the trivial partition exactly
        PreimageResult out{target, RatInterval::exact(Rat(0)), 0.0};
        return out;
    }

    Rat tower_eps = eps / 4;
    long long N = choose_tower_height(angle, tower_eps, max_half_height);
    TowerSpec tower = build_tower(angle, N, tower_eps);

    // read the tower word off the target: level b takes the target's
    // label at the level's base orbit point
    SymbolWindow word;
    word.alphabet = 2;
    word.origin = -N;
    word.symbols.assign(static_cast<std::size_t>(2 * N), 0);
    for (long long b = -N; b < N; ++b)
        word.at(b) = static_cast<std::uint8_t>(target.label_at(TorusPoint::multiple(b)));

    // prefix-sum preimage: w_b = q_b + q_{b-1}, free initial bit 0
    SymbolWindow pre;
    pre.alphabet = 2;
    pre.origin = -N;
    pre.symbols.assign(word.symbols.size(), 0);
    std::uint8_t prev = 0;
    for (long long b = -N; b < N; ++b) {
        std::uint8_t qb = (b == -N) ? 0 : static_cast<std::uint8_t>((word.at(b) + prev) & 1);
        pre.at(b) = qb;
        prev = qb;
    }

    IntervalPartition q_eps = paint(tower, pre, 0);
    IntervalPartition image = induced_map(Rule{rule}, q_eps);
    PreimageResult out;
    out.preimage = q_eps;
    out.certified_distance = sym_diff_distance(image, target, 24);
    out.tower_epsilon = tower.achieved_epsilon;
    if (!(out.certified_distance.hi < eps))
        throw EpsilonUnreachable("certified image distance " +
                                     std::to_string(out.certified_distance.hi_d()) +
                                     " did not beat eps",
                                 out.certified_distance.hi_d());
    return out;
}

}  // namespace qslab
