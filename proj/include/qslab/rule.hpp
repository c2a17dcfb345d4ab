#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qslab/errors.hpp"

namespace qslab {

// Finite block of symbols with an origin offset; cell l is defined for
// l in [origin, origin + size).
struct SymbolWindow {
    long long origin = 0;
    std::vector<std::uint8_t> symbols;
    int alphabet = 2;

    long long lo() const { return origin; }
    long long hi() const { return origin + static_cast<long long>(symbols.size()); }
    std::uint8_t at(long long cell) const {
        return symbols[static_cast<std::size_t>(cell - origin)];
    }
    std::uint8_t& at(long long cell) {
        return symbols[static_cast<std::size_t>(cell - origin)];
    }

    bool operator==(const SymbolWindow& o) const {
        return origin == o.origin && alphabet == o.alphabet && symbols == o.symbols;
    }

    // run-length encoded with origin header, e.g. "w:A=2:o=-3:1x4,0x2,1x1"
    std::string to_text() const;
    static SymbolWindow from_text(const std::string& text);
};

// Linear CA local map over Z/p as a sparse polynomial in the shift:
// out_l = sum_b phi_b * in_{l-b}  (mod p).
class LinearRule {
public:
    LinearRule(int p, std::map<long long, int> coeffs);

    static LinearRule identity(int p) { return LinearRule(p, {{0, 1}}); }
    // 1 + x over Z/p
    static LinearRule one_plus_x(int p = 2) { return LinearRule(p, {{0, 1}, {1, 1}}); }
    static LinearRule shift_by(int p, long long v) { return LinearRule(p, {{v, 1}}); }

    int prime() const { return p_; }
    const std::map<long long, int>& coeffs() const { return coeffs_; }
    std::vector<long long> neighbourhood() const;
    long long min_offset() const { return coeffs_.begin()->first; }
    long long max_offset() const { return coeffs_.rbegin()->first; }
    std::size_t support_size() const { return coeffs_.size(); }

    bool operator==(const LinearRule& o) const { return p_ == o.p_ && coeffs_ == o.coeffs_; }

    std::string to_text() const;
    static LinearRule from_text(const std::string& text);

private:
    int p_;
    std::map<long long, int> coeffs_;  // no zero coefficients stored
};

// (sum phi_b x^b)^n reduced mod p.  n = 0 gives the identity rule.
// p = 2 runs bit-packed square-and-multiply; odd p goes through the
// base-p Frobenius factorization, so huge Frobenius powers stay sparse.
LinearRule power(const LinearRule& rule, unsigned long long n);

LinearRule multiply(const LinearRule& a, const LinearRule& b);

// binomial(N, n) mod p via base-p digits
int lucas_binom(unsigned long long N, unsigned long long n, int p);

// number of 1s in the binary expansion
int nu(unsigned long long n);

// sum of coefficients mod p
int trace(const LinearRule& rule);

// General lookup rule: neighbourhood offsets plus a total table over
// alphabet^|B| words.  Table index of a word c is
// sum_i c_{B[i]} * A^i. Tables are capped at 2^24 entries.
class GeneralRule {
public:
    GeneralRule(int alphabet, std::vector<long long> neighbourhood,
                std::vector<std::uint8_t> table);

    static GeneralRule majority3();

    int alphabet() const { return alphabet_; }
    const std::vector<long long>& neighbourhood() const { return nbhd_; }
    const std::vector<std::uint8_t>& table() const { return table_; }
    long long min_offset() const;
    long long max_offset() const;

    std::uint8_t apply(const std::vector<std::uint8_t>& word) const;

    std::string to_text() const;
    static GeneralRule from_text(const std::string& text);

private:
    int alphabet_;
    std::vector<long long> nbhd_;
    std::vector<std::uint8_t> table_;
};

using Rule = std::variant<LinearRule, GeneralRule>;

Rule rule_from_text(const std::string& text);
std::string rule_to_text(const Rule& rule);
int rule_alphabet(const Rule& rule);
std::vector<long long> rule_neighbourhood(const Rule& rule);

// One application of the rule; the output window is shrunk so every
// output cell has its full neighbourhood inside the input:
// [lo + max(B), hi + min(B)).  Bit-parallel for p = 2 linear rules.
SymbolWindow apply_window(const Rule& rule, const SymbolWindow& w);
SymbolWindow apply_window_n(const Rule& rule, const SymbolWindow& w, unsigned n);

}  // namespace qslab
