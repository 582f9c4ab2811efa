#pragma once

// Arithmetic of the countable group G = ⊕_{-∞}^{+∞} Z/2Z.  An element is
// its finite support (positions carrying bit 1), kept sorted and unique.
// The same type doubles as a character of the compact dual: the pairing
// with a periodic point is the parity of the overlap (see kvalue.hpp).

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace specmult {

class GroupElement {
public:
    GroupElement() = default;
    GroupElement(std::initializer_list<std::int64_t> positions)
        : support_(positions) {
        normalize();
    }
    explicit GroupElement(std::vector<std::int64_t> positions)
        : support_(std::move(positions)) {
        normalize();
    }

    const std::vector<std::int64_t>& support() const { return support_; }
    bool is_zero() const { return support_.empty(); }
    std::size_t weight() const { return support_.size(); }

    bool operator==(const GroupElement& o) const { return support_ == o.support_; }
    bool operator!=(const GroupElement& o) const { return !(*this == o); }
    bool operator<(const GroupElement& o) const { return support_ < o.support_; }

    /// Group addition: symmetric difference of supports (2-torsion).
    GroupElement operator+(const GroupElement& o) const {
        std::vector<std::int64_t> out;
        std::set_symmetric_difference(support_.begin(), support_.end(),
                                      o.support_.begin(), o.support_.end(),
                                      std::back_inserter(out));
        GroupElement r;
        r.support_ = std::move(out);
        return r;
    }

    std::string str() const {
        std::string s = "{";
        for (std::size_t i = 0; i < support_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(support_[i]);
        }
        return s + "}";
    }

private:
    void normalize() {
        std::sort(support_.begin(), support_.end());
        support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
    }

    std::vector<std::int64_t> support_;
};

/// The shift automorphism v iterated i times.  Convention (fixed once,
/// used everywhere): v reads (v(g))_j = g_{j+1}, so supports translate
/// by -1 under v and by -i under shift(g, i).  shift(shift(g,i),-i) = g.
inline GroupElement shift(const GroupElement& g, std::int64_t i) {
    std::vector<std::int64_t> out;
    out.reserve(g.support().size());
    for (std::int64_t p : g.support()) out.push_back(p - i);
    return GroupElement(std::move(out));
}

/// True when g2 = v^i(g1) for some i, i.e. the supports are translates.
/// Shift-translate characters have identical orbit averages, so callers
/// use this to enforce the find_separating_point precondition.
inline bool are_shift_translates(const GroupElement& g1, const GroupElement& g2) {
    if (g1.weight() != g2.weight()) return false;
    if (g1.is_zero()) return true;
    const auto& a = g1.support();
    const auto& b = g2.support();
    std::int64_t off = a.front() - b.front();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] - b[i] != off) return false;
    return true;
}

}  // namespace specmult
