#pragma once

// Concrete level maps alpha_t : C_t -> K realizing the equivariance and
// frequency conditions, plus the cocycle they generate on the tail
// relation.
//
// Recipe (case I, label a, parameter n, previous height h): on the base
// window t in [0, nm) set alpha(h t) to the running sum of increments
// v^i(a), each repeated n times; extend v-equivariantly to the n^2
// copies: alpha(h(t + j nm)) = v^j(alpha(h t)).  The z-shift is exactly
// the window shift, so equivariance holds on all of C ∩ (C - z) by
// construction.  Increment classes are tallied positionally; the copy
// boundary increments (whose values need not be any v^i(a)) are excluded
// from every class.
//
// Recipe (case II, label (a,b)): walk the base block D in increasing
// order; h-steps take increments v^i(a), (h+1)-steps take v^i(b), each
// repeated n times; the single seam step between the two parts of D is
// assigned b and excluded from the classes; extend v-equivariantly along
// the n^2 z-copies.  The a-classes pair columns at distance h, the
// b-classes at distance h+1, matching the identity / adjoint split of
// the h_n-power expansion.

#include "specmult/cf.hpp"
#include "specmult/errors.hpp"
#include "specmult/kvalue.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace specmult {

struct FreqRow {
    char e = 'a';  // which label component the class belongs to
    long i = 0;    // shift index of the increment v^i(e)
    Int count;
    Rat freq;
    Rat target;
    Rat deviation;
    Rat bound;
    bool ok = false;
};

class CocycleTable {
public:
    long index() const { return index_; }
    const std::map<Int, KValue>& values() const { return values_; }
    const std::vector<std::vector<Int>>& class_a() const { return class_a_; }
    const std::vector<std::vector<Int>>& class_b() const { return class_b_; }
    const std::vector<FreqRow>& freq_rows() const { return freq_rows_; }

    const KValue& value(const Int& c) const {
        auto it = values_.find(c);
        if (it == values_.end())
            throw ConfigError("COCYCLE_DOMAIN", "cocycle value requested off C");
        return it->second;
    }

    /// #{c in C ∩ (C - z) : alpha(c + z) = v(alpha(c))}.
    std::int64_t equivariant_count(const CfLevel& lv) const {
        std::int64_t k = 0;
        for (const Int& c : lv.C) {
            if (!lv.contains_column(c + lv.z)) continue;
            if (value(c + lv.z) == shift(value(c), 1)) ++k;
        }
        return k;
    }

    static CocycleTable assign_case_I(const CfLevel& lv, const KValue& a);
    static CocycleTable assign_case_II(const CfLevel& lv, const KValue& a,
                                       const KValue& b);

    /// Build the table dictated by the level's own label.
    static CocycleTable assign(const CfLevel& lv) {
        if (lv.lcase == LevelCase::I) return assign_case_I(lv, lv.label.a);
        if (lv.lcase == LevelCase::II) return assign_case_II(lv, lv.label.a, lv.label.b);
        throw ConfigError("RAW_LEVEL", "raw levels need from_raw tables");
    }

    /// Free-form table for hand-built systems; only the domain is checked.
    static CocycleTable from_raw(const CfLevel& lv, std::map<Int, KValue> values) {
        CocycleTable t;
        t.index_ = lv.index;
        t.values_ = std::move(values);
        for (const Int& c : lv.C)
            if (!t.values_.count(c))
                throw ConfigError("COCYCLE_DOMAIN", "raw table misses a column");
        if (t.values_.size() != lv.C.size())
            throw ConfigError("COCYCLE_DOMAIN", "raw table has extra keys");
        return t;
    }

    /// Test hook: overwrite one value (mutation sentinels in the suite).
    void corrupt(const Int& c, KValue v) { values_[c] = std::move(v); }

private:
    void tally_classes(const CfLevel& lv, std::int64_t m, bool has_b);

    long index_ = 0;
    std::map<Int, KValue> values_;
    std::vector<std::vector<Int>> class_a_;
    std::vector<std::vector<Int>> class_b_;
    std::vector<FreqRow> freq_rows_;
};

inline void CocycleTable::tally_classes(const CfLevel& lv, std::int64_t m, bool has_b) {
    const Int csize = lv.c_size();
    const Rat bound(2, Int(lv.param) * m);
    const Rat target = has_b ? Rat(1, 2 * m) : Rat(1, m);
    auto tally = [&](char e, const std::vector<std::vector<Int>>& classes) {
        for (long i = 0; i < m; ++i) {
            FreqRow row;
            row.e = e;
            row.i = i;
            row.count = Int(classes[static_cast<std::size_t>(i)].size());
            row.freq = Rat(row.count, csize);
            row.target = target;
            row.deviation = row.freq >= target ? row.freq - target : target - row.freq;
            row.bound = bound;
            row.ok = row.deviation < bound;
            if (!row.ok)
                throw VerificationError(
                    "FREQ_BOUND", "tower " + std::to_string(lv.index) +
                                      ": class frequency deviation not below bound");
            freq_rows_.push_back(std::move(row));
        }
    };
    tally('a', class_a_);
    if (has_b) tally('b', class_b_);
}

inline CocycleTable CocycleTable::assign_case_I(const CfLevel& lv, const KValue& a) {
    if (lv.lcase != LevelCase::I)
        throw ConfigError("CASE", "assign_case_I needs a case [I] level");
    CocycleTable t;
    t.index_ = lv.index;
    const std::int64_t m = a.period();
    const std::int64_t n = lv.param;
    const std::int64_t nm = n * m;
    const Int& h = lv.h_prev;
    const std::int64_t copies = to_long(lv.r / nm);  // n^2

    // Base window values.
    std::vector<KValue> base(static_cast<std::size_t>(nm));
    base[0] = KValue::zero();
    for (std::int64_t tt = 1; tt < nm; ++tt)
        base[static_cast<std::size_t>(tt)] =
            base[static_cast<std::size_t>(tt - 1)] + shift(a, (tt - 1) / n);
    // Equivariant extension over the copies.
    for (std::int64_t j = 0; j < copies; ++j)
        for (std::int64_t tt = 0; tt < nm; ++tt)
            t.values_[h * Int(tt + j * nm)] = shift(base[static_cast<std::size_t>(tt)], j);

    // Positional increment classes; copy-boundary increments excluded.
    t.class_a_.assign(static_cast<std::size_t>(m), {});
    for (std::int64_t s = 1; s < to_long(lv.r); ++s) {
        std::int64_t tt = s % nm;
        if (tt == 0) continue;  // boundary between copies
        std::int64_t j = s / nm;
        std::int64_t i = (j + (tt - 1) / n) % m;
        t.class_a_[static_cast<std::size_t>(i)].push_back(h * Int(s));
    }

    // Exact checks: the class relation and equivariance on C ∩ (C - z).
    for (std::int64_t i = 0; i < m; ++i)
        for (const Int& c : t.class_a_[static_cast<std::size_t>(i)])
            if (t.value(c) != t.value(c - h) + shift(a, i))
                throw VerificationError("A2_RELATION", "class increment mismatch");
    if (t.equivariant_count(lv) != lv.shift_intersection_count())
        throw VerificationError("A1", "equivariance fails on C ∩ (C - z)");

    t.tally_classes(lv, m, /*has_b=*/false);
    return t;
}

inline CocycleTable CocycleTable::assign_case_II(const CfLevel& lv, const KValue& a,
                                                 const KValue& b) {
    if (lv.lcase != LevelCase::II)
        throw ConfigError("CASE", "assign_case_II needs a case [II] level");
    CocycleTable t;
    t.index_ = lv.index;
    const std::int64_t m = common_period(a, b);
    const std::int64_t n = lv.param;
    const std::int64_t nm = n * m;
    const std::int64_t dsize = 2 * nm;
    const std::int64_t copies = to_long(lv.copy_count);  // n^2

    // Walk D in increasing order; the seam step (first part -> second
    // part) is assigned b and later excluded from the classes.
    std::vector<KValue> dvals(static_cast<std::size_t>(dsize));
    dvals[0] = KValue::zero();
    for (std::int64_t k = 1; k < dsize; ++k) {
        KValue inc;
        if (k <= nm - 1)
            inc = shift(a, (k - 1) / n);
        else if (k == nm)
            inc = b;  // seam
        else
            inc = shift(b, (k - nm - 1) / n);
        dvals[static_cast<std::size_t>(k)] = dvals[static_cast<std::size_t>(k - 1)] + inc;
    }
    for (std::int64_t j = 0; j < copies; ++j)
        for (std::int64_t k = 0; k < dsize; ++k)
            t.values_[lv.D[static_cast<std::size_t>(k)] + Int(j) * lv.z] =
                shift(dvals[static_cast<std::size_t>(k)], j);

    t.class_a_.assign(static_cast<std::size_t>(m), {});
    t.class_b_.assign(static_cast<std::size_t>(m), {});
    for (std::int64_t j = 0; j < copies; ++j) {
        for (std::int64_t k = 1; k < dsize; ++k) {
            if (k == nm) continue;  // seam
            Int c = lv.D[static_cast<std::size_t>(k)] + Int(j) * lv.z;
            if (k <= nm - 1)
                t.class_a_[static_cast<std::size_t>((j + (k - 1) / n) % m)].push_back(c);
            else
                t.class_b_[static_cast<std::size_t>((j + (k - nm - 1) / n) % m)]
                    .push_back(c);
        }
    }

    const Int& h = lv.h_prev;
    for (std::int64_t i = 0; i < m; ++i) {
        for (const Int& c : t.class_a_[static_cast<std::size_t>(i)])
            if (t.value(c) != t.value(c - h) + shift(a, i))
                throw VerificationError("A4_RELATION", "a-class increment mismatch");
        for (const Int& c : t.class_b_[static_cast<std::size_t>(i)])
            if (t.value(c) != t.value(c - h - 1) + shift(b, i))
                throw VerificationError("A4_RELATION", "b-class increment mismatch");
    }
    if (t.equivariant_count(lv) != lv.shift_intersection_count())
        throw VerificationError("A3", "equivariance fails on C ∩ (C - z)");

    t.tally_classes(lv, m, /*has_b=*/true);
    return t;
}

/// Tables for every level of a recipe-built system.
inline std::vector<CocycleTable> assign_all(const CfSystem& sys) {
    std::vector<CocycleTable> out;
    for (long t = 1; t <= sys.depth(); ++t) out.push_back(CocycleTable::assign(sys.level(t)));
    return out;
}

// ---------------------------------------------------------------------
// The cocycle word of a level, and the cocycle between points.

/// Sum of alpha_k over the column coordinates of level f in tower N.
/// Coordinates below the minimal depth are projected to zero, matching
/// the cocycle's extension through pi (alpha_k(0) = 0 for every table
/// built here, and pi discards the residual level).
inline KValue cocycle_word(const CfSystem& sys, const std::vector<CocycleTable>& tables,
                           const Int& f, long N) {
    auto d = sys.decompose(f, N);
    KValue w;
    for (long k = d.min_depth + 1; k <= N; ++k)
        w = w + tables[static_cast<std::size_t>(k - 1)].value(
                    d.coords[static_cast<std::size_t>(k - 1)]);
    return w;
}

/// alpha(x, y) for tail-equivalent points: the sum of per-level value
/// differences of their zero-padded coordinate strings.  In the
/// 2-torsion group K the difference is the sum.
inline KValue cocycle_between(const CfSystem& sys, const std::vector<CocycleTable>& tables,
                              const Point& x, const Point& y) {
    long L = sys.depth();
    Point ex = embed_to(sys, x, L);
    Point ey = embed_to(sys, y, L);
    return cocycle_word(sys, tables, ex.f, L) + cocycle_word(sys, tables, ey.f, L);
}

// ---------------------------------------------------------------------
// Summability report: the exact per-level identities feeding the
// cohomology lemma's hypotheses.

struct SummabilityRow {
    long index = 0;
    long param = 0;
    Int c_size;
    std::int64_t intersection = 0;  // #(C ∩ (C - z))
    std::int64_t c_circ = 0;        // equivariant subset of the intersection
    Rat sym_diff_ratio;             // must equal 2 / param^2
    Rat summand;                    // 1 - c_circ/#C, must equal 1 / param^2
    bool a1_on_all = false;         // c_circ == intersection
    bool sym_ok = false;
    bool summand_ok = false;
    Rat partial_sym_sum;            // running sum of sym_diff_ratio
    Rat partial_summand_sum;        // running sum of summand
    bool pass() const { return a1_on_all && sym_ok && summand_ok; }
};

struct SummabilityReport {
    std::vector<SummabilityRow> rows;
    bool all_pass = true;
};

inline SummabilityReport summability_report(const CfSystem& sys,
                                            const std::vector<CocycleTable>& tables) {
    if (tables.size() != static_cast<std::size_t>(sys.depth()))
        throw ConfigError("TABLES", "need one table per built level");
    SummabilityReport rep;
    Rat sym_sum = 0, summand_sum = 0;
    for (long t = 1; t <= sys.depth(); ++t) {
        const CfLevel& lv = sys.level(t);
        if (lv.lcase == LevelCase::Raw)
            throw ConfigError("RAW_LEVEL", "summability needs recipe levels");
        const CocycleTable& tab = tables[static_cast<std::size_t>(t - 1)];
        SummabilityRow row;
        row.index = t;
        row.param = lv.param;
        row.c_size = lv.c_size();
        row.intersection = lv.shift_intersection_count();
        row.c_circ = tab.equivariant_count(lv);
        row.sym_diff_ratio = lv.symmetric_difference_ratio();
        row.summand = Rat(row.c_size - row.c_circ, row.c_size);
        row.a1_on_all = row.c_circ == row.intersection;
        Rat p2(Int(lv.param) * lv.param);
        row.sym_ok = row.sym_diff_ratio == Rat(2) / p2;
        row.summand_ok = row.summand == Rat(1) / p2;
        sym_sum += row.sym_diff_ratio;
        summand_sum += row.summand;
        row.partial_sym_sum = sym_sum;
        row.partial_summand_sum = summand_sum;
        if (!row.pass()) rep.all_pass = false;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

/// Partial sum of the reference series sum_{n=1..k} 2/n^2.
inline Rat two_over_n_squared_partial_sum(long k) {
    Rat s = 0;
    for (long n = 1; n <= k; ++n) s += Rat(2, Int(n) * n);
    return s;
}

}  // namespace specmult
