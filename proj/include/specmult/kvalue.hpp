#pragma once

// The v-periodic points of the compact group K = ∏ Z/2Z.  A KValue is a
// bi-infinite bit sequence a with a_i = word[i mod period], stored in
// canonical form: `period` is the least period, so it can be read
// directly as m_a.  Characters of K are GroupElements; the pairing is
// the parity of the overlap, valued in {+1, -1}.

#include "specmult/group.hpp"
#include "specmult/numbers.hpp"

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace specmult {

class KValue {
public:
    /// The zero point (period 1, word "0").
    KValue() : word_(1, 0) {}

    /// From a bit word of length >= 1; reduces to least period.
    explicit KValue(std::vector<std::uint8_t> bits) : word_(std::move(bits)) {
        if (word_.empty()) throw std::invalid_argument("KValue: empty word");
        canonicalize();
    }
    /// From a string of '0'/'1'.
    explicit KValue(const std::string& bits) {
        for (char c : bits) {
            if (c != '0' && c != '1') throw std::invalid_argument("KValue: bad bit char");
            word_.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        if (word_.empty()) throw std::invalid_argument("KValue: empty word");
        canonicalize();
    }

    static KValue zero() { return KValue(); }

    std::int64_t period() const { return static_cast<std::int64_t>(word_.size()); }
    const std::vector<std::uint8_t>& word() const { return word_; }
    bool is_zero() const { return word_.size() == 1 && word_[0] == 0; }

    /// Bit at absolute position i (mathematical mod for negative i).
    int bit(std::int64_t i) const {
        std::int64_t m = period();
        std::int64_t r = i % m;
        if (r < 0) r += m;
        return word_[static_cast<std::size_t>(r)];
    }

    bool operator==(const KValue& o) const { return word_ == o.word_; }
    bool operator!=(const KValue& o) const { return !(*this == o); }
    bool operator<(const KValue& o) const {
        if (word_.size() != o.word_.size()) return word_.size() < o.word_.size();
        return word_ < o.word_;
    }

    /// Pointwise addition mod 2: operands are lifted to the lcm of the
    /// periods, added bitwise, and the result reduced to least period.
    KValue operator+(const KValue& o) const {
        std::int64_t m = std::lcm(period(), o.period());
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(m));
        for (std::int64_t i = 0; i < m; ++i)
            bits[static_cast<std::size_t>(i)] =
                static_cast<std::uint8_t>(bit(i) ^ o.bit(i));
        return KValue(std::move(bits));
    }

    std::string word_str() const {
        std::string s;
        for (auto b : word_) s += static_cast<char>('0' + b);
        return s;
    }

private:
    void canonicalize() {
        // Least period of the bi-infinite sequence divides the word length.
        std::int64_t m = period();
        for (std::int64_t d = 1; d < m; ++d) {
            if (m % d != 0) continue;
            bool ok = true;
            for (std::int64_t i = d; i < m && ok; ++i)
                ok = (word_[static_cast<std::size_t>(i)] ==
                      word_[static_cast<std::size_t>(i % d)]);
            if (ok) {
                word_.resize(static_cast<std::size_t>(d));
                return;
            }
        }
    }

    std::vector<std::uint8_t> word_;
};

/// v acting on K: (v(a))_i = a_{i+1}, i.e. the word rotated left by i.
/// Least period is preserved, so no re-canonicalization happens.
inline KValue shift(const KValue& a, std::int64_t i) {
    std::int64_t m = a.period();
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(m));
    for (std::int64_t j = 0; j < m; ++j)
        bits[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(a.bit(j + i));
    return KValue(std::move(bits));
}

/// Character pairing: chi(a) = (-1)^(sum of a over supp chi).
/// Multiplicative in both arguments.
inline int char_eval(const GroupElement& chi, const KValue& a) {
    int parity = 0;
    for (std::int64_t p : chi.support()) parity ^= a.bit(p);
    return parity ? -1 : +1;
}

/// Orbit average l_chi(a) = m_a^{-1} * sum_{i=0}^{m_a-1} chi(v^i(a)),
/// an exact rational in [-1, 1] with denominator dividing m_a.
inline Rat l_value(const GroupElement& chi, const KValue& a) {
    std::int64_t m = a.period();
    std::int64_t sum = 0;
    for (std::int64_t i = 0; i < m; ++i) {
        int parity = 0;
        for (std::int64_t p : chi.support()) parity ^= a.bit(p + i);
        sum += parity ? -1 : +1;
    }
    return Rat(sum, m);
}

/// m_{a,b}: least common positive v-period of a and b.
inline std::int64_t common_period(const KValue& a, const KValue& b) {
    return std::lcm(a.period(), b.period());
}

/// Deterministic search for a periodic point separating two characters
/// by their orbit averages: least period first, then lexicographic word
/// order.  Returns nullopt when the period cap is exhausted.
///
/// Callers must ensure chi and xi are not shift-translates (translates
/// have equal l-values for every a, so the search cannot succeed).
inline std::optional<KValue> find_separating_point(const GroupElement& chi,
                                                   const GroupElement& xi,
                                                   std::int64_t period_cap) {
    if (are_shift_translates(chi, xi))
        throw std::invalid_argument(
            "find_separating_point: chi and xi are shift-translates");
    for (std::int64_t m = 1; m <= period_cap; ++m) {
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(m), 0);
        // All words of length m in lexicographic order.
        while (true) {
            KValue a(bits);
            if (a.period() == m && l_value(chi, a) != l_value(xi, a)) return a;
            std::int64_t j = m - 1;
            while (j >= 0 && bits[static_cast<std::size_t>(j)] == 1) {
                bits[static_cast<std::size_t>(j)] = 0;
                --j;
            }
            if (j < 0) break;
            bits[static_cast<std::size_t>(j)] = 1;
        }
    }
    return std::nullopt;
}

}  // namespace specmult
