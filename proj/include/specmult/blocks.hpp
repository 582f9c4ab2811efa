#pragma once

// Inductive construction of the block family {A_i} defining the subgroup
// H of G, with membership and orbit-counting oracles.  Step 1 places the
// n_1 singletons {3^0}, ..., {3^(n_1-1)}; Step k+1 enumerates the
// (k+1)-basic subsets of the existing blocks (subsets of total
// cardinality k+1 that contain every block they meet) and appends
// n_{k+1}-1 translated copies of each, far enough out that
// 2*max(A_i) < min(A_{i+1}) holds between consecutive blocks.
//
// The central finite-scale theorem: a nonzero union of complete blocks
// with support of size p has exactly n_p translates inside A.

#include "specmult/errors.hpp"
#include "specmult/group.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace specmult {

/// Enumeration n_1, n_2, ... of the target set E, round-robin so every
/// element recurs, reordered so that n_1 != 1.
class TargetSequence {
public:
    explicit TargetSequence(std::vector<std::int64_t> enumeration)
        : order_(std::move(enumeration)) {
        if (order_.empty()) throw ConfigError("E_EMPTY", "E must be nonempty");
        for (auto v : order_)
            if (v < 1) throw ConfigError("E_INVALID", "E elements must be positive");
        source_set_.assign(order_.begin(), order_.end());
        std::sort(source_set_.begin(), source_set_.end());
        source_set_.erase(std::unique(source_set_.begin(), source_set_.end()),
                          source_set_.end());
        // Put a non-1 element first when one exists.
        if (order_.front() == 1) {
            for (std::size_t i = 1; i < order_.size(); ++i) {
                if (order_[i] != 1) {
                    std::swap(order_[0], order_[i]);
                    break;
                }
            }
        }
    }

    bool is_trivial() const { return source_set_.size() == 1 && source_set_[0] == 1; }

    /// n_k, 1-based.
    std::int64_t n(std::size_t k) const { return order_[(k - 1) % order_.size()]; }

    const std::vector<std::int64_t>& source_set() const { return source_set_; }
    const std::vector<std::int64_t>& enumeration_order() const { return order_; }

private:
    std::vector<std::int64_t> order_;
    std::vector<std::int64_t> source_set_;
};

struct BlockBuildCaps {
    std::size_t max_blocks = 100000;
    std::size_t max_basics_per_step = 50000;
    // Magnitude guard: offsets double per placement, so elements must stay
    // well inside int64 range.
    std::int64_t max_element = std::int64_t(1) << 60;
    int max_stride_retries = 16;
};

class BlockSystem {
public:
    using Block = std::vector<std::int64_t>;

    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<std::size_t>& step_boundaries() const { return step_boundaries_; }
    const std::vector<std::int64_t>& offsets_used() const { return offsets_used_; }
    const TargetSequence& target() const { return target_; }
    std::size_t steps() const { return step_boundaries_.size(); }

    /// True iff supp(g) is a (possibly empty) union of complete blocks.
    bool is_in_H(const GroupElement& g) const {
        std::set<std::size_t> needed;
        for (std::int64_t p : g.support()) {
            auto it = element_block_.find(p);
            if (it == element_block_.end()) return false;
            needed.insert(it->second);
        }
        std::size_t total = 0;
        for (std::size_t bi : needed) total += blocks_[bi].size();
        return total == g.weight();
    }

    /// #{i in Z : v^i(g) in H}.  Any translate of supp(g) inside A must
    /// place min(supp) at some element of A, so the scan anchors there.
    std::int64_t orbit_count(const GroupElement& g) const {
        if (g.is_zero())
            throw ConfigError("ORBIT_ZERO", "orbit_count: g must be nonzero");
        if (!is_in_H(g))
            throw ConfigError("ORBIT_NOT_IN_H", "orbit_count: g must lie in H");
        if (g.weight() > steps())
            throw ConfigError("ORBIT_WINDOW",
                              "orbit_count: system built with steps < |supp(g)|; "
                              "counts would be incomplete");
        return count_translates(g.support());
    }

    /// Unchecked translate scan used internally and by verify_L.
    std::int64_t count_translates(const std::vector<std::int64_t>& supp) const {
        std::int64_t count = 0;
        std::int64_t lead = supp.front();
        for (const auto& [elem, bi] : element_block_) {
            std::int64_t off = lead - elem;  // shift amount i
            bool ok = true;
            std::set<std::size_t> needed;
            std::size_t total = 0;
            for (std::int64_t p : supp) {
                auto it = element_block_.find(p - off);
                if (it == element_block_.end()) {
                    ok = false;
                    break;
                }
                if (needed.insert(it->second).second) total += blocks_[it->second].size();
            }
            if (ok && total == supp.size()) ++count;
        }
        return count;
    }

    /// All nonzero H-elements with support size <= p_max, as sorted
    /// supports, enumerated deterministically (blocks in index order).
    /// Stops after `cap` elements; the bool reports truncation.
    std::pair<std::vector<std::vector<std::int64_t>>, bool>
    enumerate_H(std::size_t p_max, std::size_t cap) const {
        std::vector<std::vector<std::int64_t>> out;
        bool truncated = false;
        std::vector<std::size_t> chosen;
        std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t next,
                                                                std::size_t budget) {
            if (truncated) return;
            if (!chosen.empty()) {
                if (out.size() >= cap) {
                    truncated = true;
                    return;
                }
                std::vector<std::int64_t> supp;
                for (std::size_t bi : chosen)
                    supp.insert(supp.end(), blocks_[bi].begin(), blocks_[bi].end());
                std::sort(supp.begin(), supp.end());
                out.push_back(std::move(supp));
            }
            for (std::size_t bi = next; bi < blocks_.size(); ++bi) {
                if (blocks_[bi].size() > budget) continue;
                chosen.push_back(bi);
                rec(bi + 1, budget - blocks_[bi].size());
                chosen.pop_back();
            }
        };
        rec(0, p_max);
        return {std::move(out), truncated};
    }

    static BlockSystem build(const TargetSequence& target, std::size_t steps,
                             const BlockBuildCaps& caps = {});

    /// Restore from parsed fields (used by the JSON loader); re-checks the
    /// separation invariant.
    static BlockSystem restore(TargetSequence target, std::vector<Block> blocks,
                               std::vector<std::size_t> step_boundaries,
                               std::vector<std::int64_t> offsets_used) {
        BlockSystem sys(std::move(target));
        sys.blocks_ = std::move(blocks);
        sys.step_boundaries_ = std::move(step_boundaries);
        sys.offsets_used_ = std::move(offsets_used);
        for (std::size_t bi = 0; bi < sys.blocks_.size(); ++bi)
            for (std::int64_t e : sys.blocks_[bi]) sys.element_block_[e] = bi;
        sys.assert_separation();
        return sys;
    }

private:
    explicit BlockSystem(TargetSequence target) : target_(std::move(target)) {}

    void append_block(Block b) {
        std::sort(b.begin(), b.end());
        std::size_t bi = blocks_.size();
        for (std::int64_t e : b) element_block_[e] = bi;
        blocks_.push_back(std::move(b));
    }

    void assert_separation() const {
        for (std::size_t i = 0; i + 1 < blocks_.size(); ++i) {
            if (!(2 * blocks_[i].back() < blocks_[i + 1].front()))
                throw VerificationError(
                    "SEPARATION",
                    "block separation 2*max(A_i) < min(A_{i+1}) violated at i=" +
                        std::to_string(i + 1));
        }
        // Disjointness, asserted independently of separation.
        std::size_t total = 0;
        for (const auto& b : blocks_) total += b.size();
        if (total != element_block_.size())
            throw VerificationError("DISJOINT", "blocks are not pairwise disjoint");
    }

    TargetSequence target_;
    std::vector<Block> blocks_;
    std::vector<std::size_t> step_boundaries_;
    std::vector<std::int64_t> offsets_used_;
    std::map<std::int64_t, std::size_t> element_block_;
};

inline BlockSystem BlockSystem::build(const TargetSequence& target, std::size_t steps,
                                      const BlockBuildCaps& caps) {
    if (target.is_trivial())
        throw ConfigError("E_TRIVIAL",
                          "E = {1} has no block construction; use the multiplicity "
                          "predictor directly");
    if (steps < 1) throw ConfigError("STEPS", "steps must be >= 1");

    BlockSystem sys(target);

    // Step 1: singletons at powers of 3.
    std::int64_t n1 = target.n(1);
    std::int64_t pos = 1;
    for (std::int64_t i = 0; i < n1; ++i) {
        sys.append_block({pos});
        if (pos > caps.max_element / 3)
            throw CapError("ELEMENT_CAP", "block elements exceed magnitude cap");
        pos *= 3;
    }
    sys.step_boundaries_.push_back(sys.blocks_.size());

    for (std::size_t k = 1; k < steps; ++k) {
        std::size_t existing = sys.blocks_.size();
        std::size_t card = k + 1;

        // (k+1)-basic subsets: unions of complete blocks with total
        // cardinality k+1, ordered by their sorted element tuple.
        std::vector<Block> basics;
        std::vector<std::size_t> chosen;
        std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t next,
                                                                std::size_t budget) {
            if (budget == 0) {
                Block b;
                for (std::size_t bi : chosen)
                    b.insert(b.end(), sys.blocks_[bi].begin(), sys.blocks_[bi].end());
                std::sort(b.begin(), b.end());
                basics.push_back(std::move(b));
                return;
            }
            if (basics.size() > caps.max_basics_per_step)
                throw CapError("BASICS_CAP", "basic-subset count exceeds cap");
            for (std::size_t bi = next; bi < existing; ++bi) {
                if (sys.blocks_[bi].size() > budget) continue;
                chosen.push_back(bi);
                rec(bi + 1, budget - sys.blocks_[bi].size());
                chosen.pop_back();
            }
        };
        rec(0, card);
        std::sort(basics.begin(), basics.end());

        std::int64_t copies = target.n(k + 1) - 1;
        if (sys.blocks_.size() + basics.size() * static_cast<std::size_t>(copies) >
            caps.max_blocks)
            throw CapError("BLOCK_CAP", "block count cap exceeded at step " +
                                            std::to_string(k + 1));

        // Place copies; the stride doubles and the step rebuilds if the
        // translate scan finds an accidental extra translate.
        std::int64_t stride = 2;
        for (int attempt = 0;; ++attempt) {
            if (attempt > caps.max_stride_retries)
                throw CapError("STRIDE_RETRIES",
                               "offset stride retries exhausted at step " +
                                   std::to_string(k + 1));
            std::size_t rollback_blocks = sys.blocks_.size();
            std::size_t rollback_offsets = sys.offsets_used_.size();
            for (const Block& b : basics) {
                for (std::int64_t c = 0; c < copies; ++c) {
                    std::int64_t max_so_far = sys.blocks_.back().back();
                    if (max_so_far > caps.max_element / (stride + 1))
                        throw CapError("ELEMENT_CAP",
                                       "block elements exceed magnitude cap");
                    std::int64_t offset = stride * max_so_far + 2 - b.front();
                    Block nb;
                    nb.reserve(b.size());
                    for (std::int64_t e : b) nb.push_back(e + offset);
                    sys.offsets_used_.push_back(offset);
                    sys.append_block(std::move(nb));
                }
            }
            bool clean = true;
            for (const Block& b : basics) {
                if (sys.count_translates(b) != target.n(k + 1)) {
                    clean = false;
                    break;
                }
            }
            if (clean) break;
            // Roll the step back and retry with a doubled stride.
            for (std::size_t bi = rollback_blocks; bi < sys.blocks_.size(); ++bi)
                for (std::int64_t e : sys.blocks_[bi]) sys.element_block_.erase(e);
            sys.blocks_.resize(rollback_blocks);
            sys.offsets_used_.resize(rollback_offsets);
            stride *= 2;
        }
        sys.step_boundaries_.push_back(sys.blocks_.size());
    }

    sys.assert_separation();
    return sys;
}

/// One row of the finite-scale orbit-count verification.
struct OrbitCheckRow {
    std::vector<std::int64_t> support;
    std::int64_t p = 0;
    std::int64_t count = 0;
    std::int64_t expected = 0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<OrbitCheckRow> rows;
    bool truncated = false;
    bool all_pass = true;
    std::vector<std::int64_t> realized_values;  // sorted distinct counts
    bool realized_subset_of_E = true;
    bool realized_covers_prefix = true;

    bool pass() const {
        return all_pass && realized_subset_of_E && realized_covers_prefix;
    }
};

/// Checks orbit_count(g) == n_{|supp g|} for every nonzero H-element with
/// support size <= p_max.  The realized count set must be a subset of E
/// and must cover {n_1, ..., n_{p_max}}.
inline VerifyReport verify_L(const BlockSystem& sys, std::size_t p_max,
                             std::size_t combination_cap = 20000) {
    if (p_max > sys.steps())
        throw ConfigError("PMAX_WINDOW", "verify_L: p_max exceeds built steps");
    VerifyReport rep;
    auto [elements, truncated] = sys.enumerate_H(p_max, combination_cap);
    rep.truncated = truncated;
    std::set<std::int64_t> realized;
    for (auto& supp : elements) {
        OrbitCheckRow row;
        row.p = static_cast<std::int64_t>(supp.size());
        row.count = sys.count_translates(supp);
        row.expected = sys.target().n(static_cast<std::size_t>(row.p));
        row.pass = row.count == row.expected;
        row.support = std::move(supp);
        realized.insert(row.count);
        if (!row.pass) rep.all_pass = false;
        rep.rows.push_back(std::move(row));
    }
    rep.realized_values.assign(realized.begin(), realized.end());
    const auto& e = sys.target().source_set();
    for (auto v : rep.realized_values)
        if (!std::binary_search(e.begin(), e.end(), v)) rep.realized_subset_of_E = false;
    for (std::size_t p = 1; p <= p_max; ++p)
        if (!realized.count(sys.target().n(p))) rep.realized_covers_prefix = false;
    return rep;
}

}  // namespace specmult
