#include "qslab/rule.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace qslab {

namespace {

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

// Bit-packed GF(2) polynomial over a shifted index range.  Bit i of the
// word array is the coefficient of x^(base + i).
struct Gf2Poly {
    long long base = 0;
    std::vector<std::uint64_t> words;  // little-endian bit order

    static Gf2Poly from_offsets(const std::vector<long long>& offs) {
        Gf2Poly p;
        if (offs.empty()) return p;
        long long lo = *std::min_element(offs.begin(), offs.end());
        long long hi = *std::max_element(offs.begin(), offs.end());
        p.base = lo;
        p.words.assign(static_cast<std::size_t>((hi - lo) / 64 + 1), 0);
        for (long long o : offs) {
            long long i = o - lo;
            p.words[static_cast<std::size_t>(i >> 6)] ^= (1ULL << (i & 63));
        }
        return p;
    }

    std::vector<long long> offsets() const {
        std::vector<long long> out;
        for (std::size_t w = 0; w < words.size(); ++w) {
            std::uint64_t bits = words[w];
            while (bits) {
                int b = std::countr_zero(bits);
                bits &= bits - 1;
                out.push_back(base + static_cast<long long>(w) * 64 + b);
            }
        }
        return out;
    }

    // carry-less square: spread bits, doubling every exponent
    Gf2Poly square() const {
        Gf2Poly out;
        out.base = base * 2;
        out.words.assign(words.size() * 2, 0);
        for (std::size_t w = 0; w < words.size(); ++w) {
            std::uint64_t lo = words[w] & 0xffffffffULL;
            std::uint64_t hi = words[w] >> 32;
            out.words[2 * w] = spread(lo);
            out.words[2 * w + 1] = spread(hi);
        }
        return out;
    }

    static std::uint64_t spread(std::uint64_t x) {
        x = (x | (x << 16)) & 0x0000ffff0000ffffULL;
        x = (x | (x << 8)) & 0x00ff00ff00ff00ffULL;
        x = (x | (x << 4)) & 0x0f0f0f0f0f0f0f0fULL;
        x = (x | (x << 2)) & 0x3333333333333333ULL;
        x = (x | (x << 1)) & 0x5555555555555555ULL;
        return x;
    }

    // xor-accumulate (other << shift bits), offsets in exponent space
    static Gf2Poly mul(const Gf2Poly& a, const Gf2Poly& b) {
        auto offs_b = b.offsets();
        Gf2Poly out;
        if (a.words.empty() || offs_b.empty()) return out;
        long long nbits = static_cast<long long>(a.words.size()) * 64;
        out.base = a.base + b.base;
        long long span = (offs_b.back() - b.base) + nbits;
        out.words.assign(static_cast<std::size_t>(span / 64 + 2), 0);
        for (long long ob : offs_b) {
            long long sh = ob - b.base;
            std::size_t word_sh = static_cast<std::size_t>(sh >> 6);
            int bit_sh = static_cast<int>(sh & 63);
            for (std::size_t w = 0; w < a.words.size(); ++w) {
                std::uint64_t v = a.words[w];
                if (!v) continue;
                out.words[w + word_sh] ^= (v << bit_sh);
                if (bit_sh) out.words[w + word_sh + 1] ^= (v >> (64 - bit_sh));
            }
        }
        return out;
    }
};

std::map<long long, int> mul_sparse(const std::map<long long, int>& a,
                                    const std::map<long long, int>& b, int p) {
    std::map<long long, int> out;
    for (const auto& [oa, ca] : a) {
        for (const auto& [ob, cb] : b) {
            long long o = oa + ob;
            int c = (out.count(o) ? out[o] : 0) + ca * cb;
            c %= p;
            if (c == 0)
                out.erase(o);
            else
                out[o] = c;
        }
    }
    return out;
}

}  // namespace

LinearRule::LinearRule(int p, std::map<long long, int> coeffs) : p_(p) {
    if (!is_prime(p)) throw std::invalid_argument("rule modulus must be prime");
    for (auto& [o, c] : coeffs) {
        int v = ((c % p) + p) % p;
        if (v != 0) coeffs_[o] = v;
    }
    if (coeffs_.empty()) throw std::invalid_argument("rule needs a nonempty neighbourhood");
}

std::vector<long long> LinearRule::neighbourhood() const {
    std::vector<long long> out;
    out.reserve(coeffs_.size());
    for (const auto& [o, c] : coeffs_) out.push_back(o);
    return out;
}

LinearRule multiply(const LinearRule& a, const LinearRule& b) {
    if (a.prime() != b.prime()) throw std::invalid_argument("mixed moduli");
    auto prod = mul_sparse(a.coeffs(), b.coeffs(), a.prime());
    if (prod.empty()) throw std::logic_error("rule product vanished");
    return LinearRule(a.prime(), std::move(prod));
}

LinearRule power(const LinearRule& rule, unsigned long long n) {
    const int p = rule.prime();
    if (n == 0) return LinearRule::identity(p);
    if (p == 2) {
        long long span = rule.max_offset() - rule.min_offset();
        bool huge = span > 0 && n > (1ULL << 26) / static_cast<unsigned long long>(span);
        if (huge) {
            // Frobenius product over the set bits of n keeps giant sparse
            // powers (e.g. exponents that are powers of two) sparse
            std::vector<long long> acc{0};
            for (int bit = 0; bit < 64; ++bit) {
                if (!((n >> bit) & 1)) continue;
                std::vector<long long> next;
                next.reserve(acc.size() * rule.support_size());
                for (const auto& [b, c] : rule.coeffs())
                    for (long long o : acc) next.push_back(o + b * (1LL << bit));
                std::sort(next.begin(), next.end());
                acc.clear();
                for (std::size_t i = 0; i < next.size();) {
                    std::size_t j = i;
                    while (j < next.size() && next[j] == next[i]) ++j;
                    if ((j - i) % 2 == 1) acc.push_back(next[i]);
                    i = j;
                }
            }
            std::map<long long, int> coeffs;
            for (long long o : acc) coeffs[o] = 1;
            return LinearRule(2, std::move(coeffs));
        }
        // square-and-multiply, msb first, on bit-packed coefficients
        Gf2Poly base = Gf2Poly::from_offsets(rule.neighbourhood());
        unsigned long long m = n;
        int top = 63 - std::countl_zero(m);
        Gf2Poly acc = base;
        for (int bit = top - 1; bit >= 0; --bit) {
            acc = acc.square();
            if ((m >> bit) & 1) acc = Gf2Poly::mul(acc, base);
        }
        std::map<long long, int> coeffs;
        for (long long o : acc.offsets()) coeffs[o] = 1;
        return LinearRule(2, std::move(coeffs));
    }
    // Frobenius factorization: Phi^n = prod_i (Phi^{p^i})^{n_i} with
    // Phi^{p^i} = sum phi_b x^{b p^i}
    std::map<long long, int> acc{{0, 1}};
    unsigned long long m = n;
    long long pw = 1;
    while (m > 0) {
        int digit = static_cast<int>(m % static_cast<unsigned long long>(p));
        if (digit > 0) {
            std::map<long long, int> frob;
            for (const auto& [o, c] : rule.coeffs()) frob[o * pw] = c;
            for (int i = 0; i < digit; ++i) acc = mul_sparse(acc, frob, p);
        }
        m /= static_cast<unsigned long long>(p);
        pw *= p;
    }
    return LinearRule(p, std::move(acc));
}

int lucas_binom(unsigned long long N, unsigned long long n, int p) {
    auto small_binom = [p](int a, int b) {
        if (b > a) return 0;
        long long r = 1;
        for (int i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
        return static_cast<int>(r % p);
    };
    long long result = 1;
    while (N > 0 || n > 0) {
        int Ni = static_cast<int>(N % static_cast<unsigned long long>(p));
        int ni = static_cast<int>(n % static_cast<unsigned long long>(p));
        result = result * small_binom(Ni, ni) % p;
        if (result == 0) return 0;
        N /= static_cast<unsigned long long>(p);
        n /= static_cast<unsigned long long>(p);
    }
    return static_cast<int>(result);
}

int nu(unsigned long long n) { return std::popcount(n); }

int trace(const LinearRule& rule) {
    int t = 0;
    for (const auto& [o, c] : rule.coeffs()) t = (t + c) % rule.prime();
    return t;
}

std::string LinearRule::to_text() const {
    std::ostringstream os;
    os << "lin:p=" << p_ << ":";
    bool first = true;
    for (const auto& [o, c] : coeffs_) {
        if (!first) os << "+";
        first = false;
        if (o == 0) {
            os << c;
        } else {
            if (c != 1) os << c;
            os << "x^" << o;
        }
    }
    return os.str();
}

LinearRule LinearRule::from_text(const std::string& text) {
    if (text.rfind("lin:p=", 0) != 0) throw ParseError("bad linear rule: " + text);
    auto colon = text.find(':', 6);
    if (colon == std::string::npos) throw ParseError("bad linear rule: " + text);
    int p = std::stoi(text.substr(6, colon - 6));
    std::string body = text.substr(colon + 1);
    std::map<long long, int> coeffs;
    std::istringstream is(body);
    std::string term;
    while (std::getline(is, term, '+')) {
        if (term.empty()) throw ParseError("empty term in rule: " + text);
        auto x = term.find('x');
        int c = 1;
        long long o = 0;
        if (x == std::string::npos) {
            c = std::stoi(term);
        } else {
            if (x > 0) c = std::stoi(term.substr(0, x));
            if (x + 1 < term.size() && term[x + 1] == '^')
                o = std::stoll(term.substr(x + 2));
            else if (x + 1 == term.size())
                o = 1;
            else
                throw ParseError("bad term in rule: " + term);
        }
        coeffs[o] = (coeffs.count(o) ? coeffs[o] : 0) + c;
    }
    return LinearRule(p, std::move(coeffs));
}

GeneralRule::GeneralRule(int alphabet, std::vector<long long> neighbourhood,
                         std::vector<std::uint8_t> table)
    : alphabet_(alphabet), nbhd_(std::move(neighbourhood)), table_(std::move(table)) {
    if (alphabet_ < 1 || alphabet_ > 255) throw std::invalid_argument("bad alphabet size");
    if (nbhd_.empty()) throw std::invalid_argument("rule needs a nonempty neighbourhood");
    double size = 1;
    for (std::size_t i = 0; i < nbhd_.size(); ++i) size *= alphabet_;
    if (size > double(1 << 24)) throw std::invalid_argument("rule table too large (> 2^24)");
    if (table_.size() != static_cast<std::size_t>(size))
        throw std::invalid_argument("rule table has the wrong size");
    for (std::uint8_t v : table_)
        if (v >= alphabet_) throw std::invalid_argument("rule table entry out of range");
}

GeneralRule GeneralRule::majority3() {
    std::vector<std::uint8_t> table(8);
    for (int i = 0; i < 8; ++i) {
        int ones = (i & 1) + ((i >> 1) & 1) + ((i >> 2) & 1);
        table[static_cast<std::size_t>(i)] = ones >= 2 ? 1 : 0;
    }
    return GeneralRule(2, {-1, 0, 1}, std::move(table));
}

long long GeneralRule::min_offset() const {
    return *std::min_element(nbhd_.begin(), nbhd_.end());
}
long long GeneralRule::max_offset() const {
    return *std::max_element(nbhd_.begin(), nbhd_.end());
}

std::uint8_t GeneralRule::apply(const std::vector<std::uint8_t>& word) const {
    std::size_t idx = 0, mul = 1;
    for (std::size_t i = 0; i < nbhd_.size(); ++i) {
        idx += word[i] * mul;
        mul *= static_cast<std::size_t>(alphabet_);
    }
    return table_[idx];
}

std::string GeneralRule::to_text() const {
    static const char* hexdig = "0123456789abcdef";
    std::ostringstream os;
    os << "gen:A=" << alphabet_ << ":B=[";
    for (std::size_t i = 0; i < nbhd_.size(); ++i) {
        if (i) os << ",";
        os << nbhd_[i];
    }
    os << "]:table=";
    for (std::uint8_t v : table_) os << hexdig[v & 0xf];
    return os.str();
}

GeneralRule GeneralRule::from_text(const std::string& text) {
    if (text.rfind("gen:A=", 0) != 0) throw ParseError("bad general rule: " + text);
    auto c1 = text.find(':', 4);
    int A = std::stoi(text.substr(6, c1 - 6));
    if (text.substr(c1 + 1, 3) != "B=[") throw ParseError("bad general rule: " + text);
    auto close = text.find(']', c1);
    std::string blist = text.substr(c1 + 4, close - c1 - 4);
    std::vector<long long> nbhd;
    std::istringstream is(blist);
    std::string tok;
    while (std::getline(is, tok, ',')) nbhd.push_back(std::stoll(tok));
    auto teq = text.find(":table=", close);
    if (teq == std::string::npos) throw ParseError("bad general rule: " + text);
    std::string hex = text.substr(teq + 7);
    std::vector<std::uint8_t> table;
    table.reserve(hex.size());
    for (char ch : hex) {
        int v = (ch >= '0' && ch <= '9') ? ch - '0'
              : (ch >= 'a' && ch <= 'f') ? ch - 'a' + 10
                                         : -1;
        if (v < 0 || v >= A) throw ParseError("bad table digit in rule: " + text);
        table.push_back(static_cast<std::uint8_t>(v));
    }
    return GeneralRule(A, std::move(nbhd), std::move(table));
}

Rule rule_from_text(const std::string& text) {
    if (text.rfind("lin:", 0) == 0) return LinearRule::from_text(text);
    if (text.rfind("gen:", 0) == 0) return GeneralRule::from_text(text);
    throw ParseError("unrecognized rule: " + text);
}

std::string rule_to_text(const Rule& rule) {
    return std::visit([](const auto& r) { return r.to_text(); }, rule);
}

int rule_alphabet(const Rule& rule) {
    if (std::holds_alternative<LinearRule>(rule)) return std::get<LinearRule>(rule).prime();
    return std::get<GeneralRule>(rule).alphabet();
}

std::vector<long long> rule_neighbourhood(const Rule& rule) {
    if (std::holds_alternative<LinearRule>(rule))
        return std::get<LinearRule>(rule).neighbourhood();
    return std::get<GeneralRule>(rule).neighbourhood();
}

namespace {

SymbolWindow apply_linear(const LinearRule& rule, const SymbolWindow& w) {
    long long out_lo = w.lo() + rule.max_offset();
    long long out_hi = w.hi() + rule.min_offset();
    if (out_hi <= out_lo)
        throw WindowTooSmall("window of size " + std::to_string(w.symbols.size()) +
                             " cannot absorb the rule span");
    SymbolWindow out;
    out.origin = out_lo;
    out.alphabet = rule.prime();
    std::size_t n = static_cast<std::size_t>(out_hi - out_lo);
    out.symbols.assign(n, 0);

    if (rule.prime() == 2) {
        // bit-parallel: pack, xor shifted copies, unpack
        std::size_t in_n = w.symbols.size();
        std::size_t words = in_n / 64 + 2;
        std::vector<std::uint64_t> in_bits(words, 0), out_bits(words, 0);
        for (std::size_t i = 0; i < in_n; ++i)
            if (w.symbols[i]) in_bits[i >> 6] |= (1ULL << (i & 63));
        for (const auto& [o, c] : rule.coeffs()) {
            // out[l] += in[l - o]; in input-array coordinates the source
            // index for out cell j (at absolute out_lo + j) is
            // (out_lo + j - o) - w.lo()
            long long base = out_lo - o - w.lo();
            std::size_t word_sh = static_cast<std::size_t>(base >> 6);
            int bit_sh = static_cast<int>(base & 63);
            for (std::size_t j = 0; j < words; ++j) {
                std::size_t src = j + word_sh;
                std::uint64_t v = src < words ? in_bits[src] : 0;
                std::uint64_t nxt = src + 1 < words ? in_bits[src + 1] : 0;
                std::uint64_t val = bit_sh ? (v >> bit_sh) | (nxt << (64 - bit_sh)) : v;
                out_bits[j] ^= val;
            }
        }
        for (std::size_t j = 0; j < n; ++j)
            out.symbols[j] = (out_bits[j >> 6] >> (j & 63)) & 1;
        return out;
    }

    for (std::size_t j = 0; j < n; ++j) {
        long long cell = out_lo + static_cast<long long>(j);
        int acc = 0;
        for (const auto& [o, c] : rule.coeffs())
            acc += c * w.at(cell - o);
        out.symbols[j] = static_cast<std::uint8_t>(acc % rule.prime());
    }
    return out;
}

SymbolWindow apply_general(const GeneralRule& rule, const SymbolWindow& w) {
    long long out_lo = w.lo() + rule.max_offset();
    long long out_hi = w.hi() + rule.min_offset();
    if (out_hi <= out_lo)
        throw WindowTooSmall("window of size " + std::to_string(w.symbols.size()) +
                             " cannot absorb the rule span");
    SymbolWindow out;
    out.origin = out_lo;
    out.alphabet = rule.alphabet();
    std::size_t n = static_cast<std::size_t>(out_hi - out_lo);
    out.symbols.assign(n, 0);
    std::vector<std::uint8_t> word(rule.neighbourhood().size());
    for (std::size_t j = 0; j < n; ++j) {
        long long cell = out_lo + static_cast<long long>(j);
        for (std::size_t i = 0; i < word.size(); ++i)
            word[i] = w.at(cell - rule.neighbourhood()[i]);
        out.symbols[j] = rule.apply(word);
    }
    return out;
}

}  // namespace

SymbolWindow apply_window(const Rule& rule, const SymbolWindow& w) {
    if (std::holds_alternative<LinearRule>(rule))
        return apply_linear(std::get<LinearRule>(rule), w);
    return apply_general(std::get<GeneralRule>(rule), w);
}

SymbolWindow apply_window_n(const Rule& rule, const SymbolWindow& w, unsigned n) {
    SymbolWindow cur = w;
    for (unsigned i = 0; i < n; ++i) cur = apply_window(rule, cur);
    return cur;
}

std::string SymbolWindow::to_text() const {
    std::ostringstream os;
    os << "w:A=" << alphabet << ":o=" << origin << ":";
    std::size_t i = 0;
    bool first = true;
    while (i < symbols.size()) {
        std::size_t j = i;
        while (j < symbols.size() && symbols[j] == symbols[i]) ++j;
        if (!first) os << ",";
        first = false;
        os << int(symbols[i]) << "x" << (j - i);
        i = j;
    }
    return os.str();
}

SymbolWindow SymbolWindow::from_text(const std::string& text) {
    if (text.rfind("w:A=", 0) != 0) throw ParseError("bad window: " + text);
    auto c1 = text.find(':', 2);
    auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos || text.substr(c1 + 1, 2) != "o=")
        throw ParseError("bad window: " + text);
    SymbolWindow out;
    out.alphabet = std::stoi(text.substr(4, c1 - 4));
    out.origin = std::stoll(text.substr(c1 + 3, c2 - c1 - 3));
    std::string body = text.substr(c2 + 1);
    std::istringstream is(body);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        auto x = tok.find('x');
        if (x == std::string::npos) throw ParseError("bad run in window: " + tok);
        int sym = std::stoi(tok.substr(0, x));
        std::size_t count = std::stoul(tok.substr(x + 1));
        out.symbols.insert(out.symbols.end(), count, static_cast<std::uint8_t>(sym));
    }
    if (out.symbols.empty()) throw ParseError("empty window: " + text);
    return out;
}

}  // namespace qslab
