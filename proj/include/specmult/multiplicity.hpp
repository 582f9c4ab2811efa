#pragma once

// Multiplicity-set algebra: the main prediction E ∪ {2}, the character
// orbit decomposition that realizes it at finite scale, and the product
// formula for k-fold Cartesian powers.
//
// Duality bookkeeping, fixed once: K = dual(G) and the skew-product's
// character group dual(K/H) is identified with the original subgroup
// H ⊂ G (the annihilator pairing).  So the characters enumerated by the
// decomposition are exactly the H-elements of the block system, and a
// shift-orbit of size n_p contributes the multiplicity value n_p.

#include "specmult/blocks.hpp"
#include "specmult/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace specmult {

struct MultiplicitySet {
    std::vector<std::int64_t> values;  // sorted distinct
    // per value, the generating rules ("chi=0 component",
    // "character-orbit of size k", "product-formula term ...")
    std::map<std::int64_t, std::vector<std::string>> provenance;

    bool operator==(const MultiplicitySet& o) const { return values == o.values; }

    void add(std::int64_t v, std::string rule) {
        if (!std::binary_search(values.begin(), values.end(), v)) {
            values.insert(std::upper_bound(values.begin(), values.end(), v), v);
        }
        provenance[v].push_back(std::move(rule));
    }
};

/// The main prediction: E ∪ {2}.  2 comes from the chi = 0 component
/// (the Cartesian square has homogeneous multiplicity 2); each e in E
/// from the character orbits of size e.
inline MultiplicitySet predicted_main(const std::vector<std::int64_t>& E) {
    if (E.empty()) throw ConfigError("E_EMPTY", "E must be nonempty");
    MultiplicitySet s;
    s.add(2, "chi=0 component");
    for (std::int64_t e : E) {
        if (e < 1) throw ConfigError("E_INVALID", "E elements must be positive");
        s.add(e, "character-orbit of size " + std::to_string(e));
    }
    return s;
}

/// Finite-window realization: enumerate the nonzero H-elements with
/// support size <= p_max as characters of K/H, group them into shift
/// orbits, and record each orbit's size through the orbit-count oracle.
/// chi = 0 contributes {2}.
inline MultiplicitySet orbit_decomposition(const BlockSystem& sys, std::size_t p_max,
                                           std::size_t combination_cap = 20000) {
    if (p_max > sys.steps())
        throw ConfigError("PMAX_WINDOW", "orbit_decomposition: p_max exceeds built steps");
    MultiplicitySet s;
    s.add(2, "chi=0 component");
    auto [elements, truncated] = sys.enumerate_H(p_max, combination_cap);
    if (truncated)
        throw CapError("COMBO_CAP", "H-element enumeration truncated; raise the cap");
    std::set<std::vector<std::int64_t>> seen_orbits;
    for (const auto& supp : elements) {
        std::vector<std::int64_t> key(supp);
        std::int64_t base = key.front();
        for (auto& v : key) v -= base;  // canonical orbit representative
        if (!seen_orbits.insert(key).second) continue;
        std::int64_t size = sys.orbit_count(GroupElement(supp));
        s.add(size, "character-orbit of " + GroupElement(supp).str() + " (size " +
                        std::to_string(size) + ")");
    }
    return s;
}

/// Multiplicities of the k-fold product system:
/// {k+1, (k+1)k, ..., (k+1)!} ∪ {k, k(k-1), ..., k!} · E.
inline MultiplicitySet product_formula(std::int64_t k, const std::vector<std::int64_t>& E) {
    if (k < 1) throw ConfigError("K_RANGE", "product_formula: k must be >= 1");
    if (E.empty()) throw ConfigError("E_EMPTY", "E must be nonempty");
    MultiplicitySet s;
    std::int64_t chain = k + 1;
    for (std::int64_t j = k; j >= 1; --j) {
        s.add(chain, "falling-factorial chain from k+1: " + std::to_string(chain));
        chain *= j;
    }
    chain = k;
    for (std::int64_t j = k - 1; j >= 0; --j) {
        for (std::int64_t e : E)
            s.add(chain * e, "scaled chain term " + std::to_string(chain) + " * " +
                                 std::to_string(e));
        if (j >= 1) chain *= j;
    }
    return s;
}

}  // namespace specmult
