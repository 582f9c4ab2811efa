#pragma once

// The (C,F) construction.  A CfSystem is a finite chain of towers: tower t
// has height h_t and embeds into tower t+1 through the column offset set
// C_{t+1} (here stored on the level record for tower t+1 itself).  Levels
// are built by the two case recipes
//
//   [I]  (single a):   z = m n h,  r = n^3 m,  C = h*{0..r-1},  h' = r h
//   [II] (pair (a,b)): z = m n (2h+1),  r = 2 n^3 m,
//        D = h*{0..nm-1} ⊔ ((h+1)*{1..nm} + h(nm-1)),
//        C = D + z*{0..n^2-1},  h' = r h + r/2
//
// where h is the previous height, n the formula parameter of the level and
// m the (common) least v-period of the label.  Tower t >= 2 uses n = t-1;
// the bootstrap tower t = 1 is built from h_0 = 1 with n = 1.
//
// Exact structural facts relied on downstream, asserted at build time:
// consecutive column gaps are h (case I) or in {h, h+1} (case II), and
// max(F + C) = h' - 1 (the towers are flush at the top).

#include "specmult/errors.hpp"
#include "specmult/kvalue.hpp"
#include "specmult/numbers.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace specmult {

/// Schedule label: a single periodic point a, or a pair (a, b).
struct Label {
    bool is_pair = true;
    KValue a;
    KValue b;

    static Label single(KValue v) { return Label{false, std::move(v), KValue()}; }
    static Label pair(KValue x, KValue y) { return Label{true, std::move(x), std::move(y)}; }

    /// m_a, or m_{a,b} = lcm for pairs.
    std::int64_t period() const {
        return is_pair ? common_period(a, b) : a.period();
    }

    bool operator==(const Label& o) const {
        return is_pair == o.is_pair && a == o.a && (!is_pair || b == o.b);
    }

    std::string str() const {
        if (is_pair) return "pair(" + a.word_str() + "|" + b.word_str() + ")";
        return "single(" + a.word_str() + ")";
    }
};

/// Finite materialization of the partition of level indices into label
/// classes: labels cycle round-robin (pairs first, then singles, each in
/// the given order), so every label recurs about n_max / #labels times.
class Schedule {
public:
    Schedule(std::vector<KValue> singles, std::vector<std::pair<KValue, KValue>> pairs,
             long n_max)
        : singles_(std::move(singles)), pairs_(std::move(pairs)), n_max_(n_max) {
        for (const auto& [x, y] : pairs_)
            cycle_.push_back(Label::pair(x, y));
        for (const auto& s : singles_) cycle_.push_back(Label::single(s));
        if (cycle_.empty()) throw ConfigError("SCHEDULE_EMPTY", "no schedule labels");
    }

    /// Label of tower index t (1-based).
    const Label& assignment(long t) const {
        return cycle_[static_cast<std::size_t>((t - 1) % static_cast<long>(cycle_.size()))];
    }

    long n_max() const { return n_max_; }
    const std::vector<Label>& cycle() const { return cycle_; }
    const std::vector<KValue>& singles() const { return singles_; }
    const std::vector<std::pair<KValue, KValue>>& pairs() const { return pairs_; }

private:
    std::vector<KValue> singles_;
    std::vector<std::pair<KValue, KValue>> pairs_;
    long n_max_ = 0;
    std::vector<Label> cycle_;
};

/// Weak mixing and the chi = 0 limit both need the (0,0) class, so the
/// planner requires it up front.
inline Schedule plan_schedule(std::vector<KValue> singles,
                              std::vector<std::pair<KValue, KValue>> pairs, long n_max) {
    bool has00 = false;
    for (const auto& [x, y] : pairs)
        if (x.is_zero() && y.is_zero()) has00 = true;
    if (!has00)
        throw ConfigError("SCHEDULE_NO_00", "schedule pairs must contain (0,0)");
    return Schedule(std::move(singles), std::move(pairs), n_max);
}

enum class LevelCase { I, II, Raw };

inline std::string level_case_str(LevelCase c) {
    switch (c) {
        case LevelCase::I: return "I";
        case LevelCase::II: return "II";
        default: return "raw";
    }
}

/// One tower transition: everything needed to go from tower index-1 to
/// tower index.
struct CfLevel {
    long index = 0;   // tower index t (C = C_t, h_next = h_t)
    long param = 0;   // formula parameter n
    Label label;
    LevelCase lcase = LevelCase::Raw;
    Int z;            // z_t
    Int r;            // r parameter; equals #C for recipe levels
    std::vector<Int> C;  // sorted column offsets, min = 0
    Int h_prev;       // h_{t-1}
    Int h_next;       // h_t
    Int top_padding;  // h_next - max(C) - h_prev (0 for both recipes)
    Int spacer_count; // h_next - h_prev * #C (uncovered levels)

    // Case II decomposition kept for compact serialization.
    std::vector<Int> D;
    Int copy_count = 0;  // n^2 for case II

    std::int64_t c_size() const { return static_cast<std::int64_t>(C.size()); }

    bool contains_column(const Int& c) const {
        return std::binary_search(C.begin(), C.end(), c);
    }

    /// #(C ∩ (C - z)).
    std::int64_t shift_intersection_count() const {
        std::int64_t k = 0;
        for (const Int& c : C)
            if (contains_column(c + z)) ++k;
        return k;
    }

    /// #(C Δ (C - z)) / #C as an exact rational.
    Rat symmetric_difference_ratio() const {
        std::int64_t inter = shift_intersection_count();
        return Rat(2 * (c_size() - inter), c_size());
    }
};

/// Builds one level by the case recipes.  `param` is the formula
/// parameter n >= 1; `index` only tags the result.
inline CfLevel build_level(const Int& h_prev, long param, const Label& label,
                           long index = 0) {
    if (param < 1) throw ConfigError("PARAM", "build_level: parameter n must be >= 1");
    if (h_prev < 1) throw ConfigError("HPREV", "build_level: h must be >= 1");
    CfLevel lv;
    lv.index = index;
    lv.param = param;
    lv.label = label;
    const Int n = param;
    const Int m = label.period();
    lv.h_prev = h_prev;
    if (!label.is_pair) {
        lv.lcase = LevelCase::I;
        lv.z = m * n * h_prev;
        lv.r = n * n * n * m;
        if (lv.r < 2)
            throw ConfigError("C_TOO_SMALL",
                              "case [I] with n = 1 and period-1 label yields #C = 1; "
                              "schedule a pair label first");
        for (Int t = 0; t < lv.r; ++t) lv.C.push_back(h_prev * t);
        lv.h_next = lv.r * h_prev;
    } else {
        lv.lcase = LevelCase::II;
        lv.z = m * n * (2 * h_prev + 1);
        lv.r = 2 * n * n * n * m;
        const Int nm = n * m;
        for (Int t = 0; t < nm; ++t) lv.D.push_back(h_prev * t);
        for (Int k = 1; k <= nm; ++k)
            lv.D.push_back((h_prev + 1) * k + h_prev * (nm - 1));
        lv.copy_count = n * n;
        for (Int j = 0; j < lv.copy_count; ++j)
            for (const Int& d : lv.D) lv.C.push_back(d + j * lv.z);
        std::sort(lv.C.begin(), lv.C.end());
        lv.h_next = lv.r * h_prev + lv.r / 2;
    }
    // Structural invariants, asserted exactly before the level is used.
    if (lv.C.front() != 0)
        throw VerificationError("C_MIN", "level " + std::to_string(index) + ": min C != 0");
    if (Int(lv.c_size()) != lv.r)
        throw VerificationError("C_SIZE", "level " + std::to_string(index) + ": #C != r");
    for (std::size_t i = 0; i + 1 < lv.C.size(); ++i) {
        Int gap = lv.C[i + 1] - lv.C[i];
        if (gap < h_prev)
            throw VerificationError("C_DISJOINT",
                                    "level " + std::to_string(index) +
                                        ": column overlap (gap < h)");
        if (gap > h_prev + 1)
            throw VerificationError("C_GAP",
                                    "level " + std::to_string(index) +
                                        ": recipe gap outside {h, h+1}");
    }
    if (lv.C.back() + h_prev > lv.h_next)
        throw VerificationError("C_FIT", "level " + std::to_string(index) +
                                             ": F + C exceeds F_next");
    lv.top_padding = lv.h_next - lv.C.back() - h_prev;
    if (lv.top_padding != 0)
        throw VerificationError("C_FLUSH", "level " + std::to_string(index) +
                                               ": max(F + C) != h_next - 1");
    lv.spacer_count = lv.h_next - h_prev * lv.c_size();
    // Finite-measure certificate: the height/columns ratio is exactly 1
    // (case I) or 1 + 1/(2 h_prev) (case II).
    Rat ratio = Rat(lv.h_next, lv.h_prev * lv.c_size());
    Rat expect = lv.lcase == LevelCase::I ? Rat(1) : Rat(1) + Rat(1, 2 * lv.h_prev);
    if (ratio != expect)
        throw VerificationError("RATIO", "level " + std::to_string(index) +
                                             ": height ratio mismatch");
    return lv;
}

class CfSystem {
public:
    /// Builds towers 1..n_max along the schedule.  Tower 1 bootstraps
    /// from h_0 = 1 with parameter 1; tower t >= 2 uses parameter t-1.
    static CfSystem build(const Schedule& schedule, long n_max,
                          const Int& h_cap = Int(1) << 128) {
        if (n_max < 1) throw ConfigError("NMAX", "n_max must be >= 1");
        CfSystem sys;
        Int h = 1;
        for (long t = 1; t <= n_max; ++t) {
            long param = t == 1 ? 1 : t - 1;
            const Label& lb = schedule.assignment(t);
            CfLevel lv = build_level(h, param, lb, t);
            if (lv.h_next > h_cap)
                throw CapError("H_CAP", "tower height exceeds --max-h at tower " +
                                            std::to_string(t));
            h = lv.h_next;
            sys.levels_.push_back(std::move(lv));
            sys.schedule_.push_back(lb);
        }
        sys.assume_complete_ = false;
        return sys;
    }

    /// Hand-built systems (toys, goldens).  Validates the structural
    /// bullets but imposes no case recipe; requires 0 in every C so the
    /// canonical zero tail machinery applies.  Raw systems are treated
    /// as measure-exact (extended by ratio-1 levels).
    static CfSystem from_raw(std::vector<std::pair<std::vector<Int>, Int>> levels) {
        CfSystem sys;
        Int h = 1;
        long t = 1;
        for (auto& [c, h_next] : levels) {
            CfLevel lv;
            lv.index = t;
            lv.param = t;
            lv.lcase = LevelCase::Raw;
            lv.label = Label::pair(KValue::zero(), KValue::zero());
            lv.C = std::move(c);
            std::sort(lv.C.begin(), lv.C.end());
            lv.h_prev = h;
            lv.h_next = h_next;
            if (lv.C.size() < 2)
                throw ConfigError("C_TOO_SMALL", "raw level needs #C > 1");
            if (lv.C.front() != 0)
                throw ConfigError("C_MIN", "raw level needs 0 in C");
            for (std::size_t i = 0; i + 1 < lv.C.size(); ++i)
                if (lv.C[i + 1] - lv.C[i] < h)
                    throw ConfigError("C_DISJOINT", "raw level columns overlap");
            if (lv.C.back() + h > h_next)
                throw ConfigError("C_FIT", "raw level F + C exceeds F_next");
            lv.z = 0;
            lv.r = lv.c_size();
            lv.top_padding = h_next - lv.C.back() - h;
            lv.spacer_count = h_next - h * lv.c_size();
            h = h_next;
            sys.levels_.push_back(std::move(lv));
            sys.schedule_.push_back(sys.levels_.back().label);
            ++t;
        }
        if (sys.levels_.empty()) throw ConfigError("EMPTY", "no raw levels");
        sys.assume_complete_ = true;
        return sys;
    }

    static CfSystem restore(std::vector<CfLevel> levels, bool assume_complete) {
        CfSystem sys;
        sys.levels_ = std::move(levels);
        for (const auto& lv : sys.levels_) sys.schedule_.push_back(lv.label);
        sys.assume_complete_ = assume_complete;
        return sys;
    }

    long depth() const { return static_cast<long>(levels_.size()); }
    const std::vector<CfLevel>& levels() const { return levels_; }

    /// Level record for tower t (1-based).
    const CfLevel& level(long t) const {
        if (t < 1 || t > depth())
            throw ConfigError("LEVEL_RANGE", "tower index out of built range");
        return levels_[static_cast<std::size_t>(t - 1)];
    }

    /// h_t, with h_0 = 1.
    Int h(long t) const {
        if (t == 0) return 1;
        return level(t).h_next;
    }

    bool assume_complete() const { return assume_complete_; }
    const Label& label_of(long t) const { return level(t).label; }

    /// Product of #C_k for N < k <= L.
    Int column_product(long N, long L) const {
        Int p = 1;
        for (long k = N + 1; k <= L; ++k) p *= level(k).c_size();
        return p;
    }

    /// Certified upper bound B_L >= 1 on mu-conditioned-at-L over true mu:
    /// the built ratios above L times a closed-form bound for the unbuilt
    /// tail (every future level has ratio <= 1 + 1/(2 h) and heights at
    /// least double, so the tail product is <= 2h_D / (2h_D - 1)).
    Rat tail_factor(long L) const {
        Rat b = 1;
        for (long k = L + 1; k <= depth(); ++k) {
            const CfLevel& lv = level(k);
            b *= Rat(lv.h_next, lv.h_prev * lv.c_size());
        }
        if (!assume_complete_) {
            Int hd = h(depth());
            b *= Rat(2 * hd, 2 * hd - 1);
        }
        return b;
    }

    /// mu of one tower-L level, as a certified interval.
    Interval level_mass(long L) const {
        Rat cond(Int(1), h(L));
        return Interval(cond / tail_factor(L), cond, L);
    }

    /// mu([A]_N) conditioned at L >= N: the conditioned value is
    /// |A| * prod(#C_k, N < k <= L) / h_L exactly; the lower endpoint
    /// divides out the certified tail factor.
    Interval measure_cylinder(const std::vector<Int>& A, long N, long L) const {
        if (N > L || L > depth())
            throw ConfigError("COND_RANGE", "need N <= L <= built depth");
        Int hN = h(N);
        for (const Int& f : A)
            if (f < 0 || f >= hN)
                throw ConfigError("CYL_RANGE", "cylinder set not inside F_N");
        Rat cond(Int(A.size()) * column_product(N, L), h(L));
        return Interval(cond / tail_factor(L), cond, L);
    }

    /// Top-down decomposition of a tower-N level f into column coordinates:
    /// coords[k] = c_k for min_depth < k <= N; the residual level at
    /// min_depth is not further decomposable (a spacer) unless
    /// min_depth = 0, where the residual is 0.
    struct Decomposition {
        long min_depth = 0;
        Int residual;            // level inside F_{min_depth}
        std::vector<Int> coords; // coords[k - 1] = c_k, valid for k > min_depth
    };

    Decomposition decompose(Int f, long N) const {
        if (f < 0 || f >= h(N))
            throw ConfigError("LEVEL_RANGE", "decompose: level outside F_N");
        Decomposition d;
        d.coords.assign(static_cast<std::size_t>(N), Int(0));
        for (long k = N; k >= 1; --k) {
            const CfLevel& lv = level(k);
            auto it = std::upper_bound(lv.C.begin(), lv.C.end(), f);
            if (it == lv.C.begin()) {
                d.min_depth = k;
                d.residual = f;
                return d;
            }
            Int c = *(it - 1);
            if (f - c >= lv.h_prev) {
                d.min_depth = k;
                d.residual = f;
                return d;
            }
            d.coords[static_cast<std::size_t>(k - 1)] = c;
            f -= c;
        }
        d.min_depth = 0;
        d.residual = 0;
        return d;
    }

    bool is_spacer(const Int& f, long N) const {
        if (N == 0) return false;
        const CfLevel& lv = level(N);
        auto it = std::upper_bound(lv.C.begin(), lv.C.end(), f);
        if (it == lv.C.begin()) return true;
        return f - *(it - 1) >= lv.h_prev;
    }

private:
    CfSystem() = default;
    std::vector<CfLevel> levels_;
    std::vector<Label> schedule_;
    bool assume_complete_ = false;
};

// ---------------------------------------------------------------------
// Structural validation report (the four bullets, per level).

struct CfLevelCheck {
    long index = 0;
    bool c_size_ok = false;       // #C > 1
    bool fit_ok = false;          // F + C inside F_next
    bool disjoint_ok = false;     // columns pairwise disjoint
    Rat ratio;                    // h_next / (h_prev * #C)
    bool ratio_ok = false;        // matches the recipe value exactly
    bool flush = false;           // max(F + C) == h_next - 1
    Rat sym_diff_ratio;           // #(C Δ (C-z)) / #C
    bool pass() const { return c_size_ok && fit_ok && disjoint_ok && ratio_ok; }
};

struct CfValidationReport {
    std::vector<CfLevelCheck> levels;
    Rat ratio_product{1};     // prod of built ratios (exact)
    Rat bound_with_tail{1};   // ratio_product * closed-form tail bound
    bool all_pass = true;
};

inline CfValidationReport validate(const CfSystem& sys) {
    CfValidationReport rep;
    for (long t = 1; t <= sys.depth(); ++t) {
        const CfLevel& lv = sys.level(t);
        CfLevelCheck ck;
        ck.index = t;
        ck.c_size_ok = lv.c_size() > 1;
        ck.fit_ok = lv.C.front() >= 0 && lv.C.back() + lv.h_prev <= lv.h_next;
        ck.disjoint_ok = true;
        for (std::size_t i = 0; i + 1 < lv.C.size(); ++i)
            if (lv.C[i + 1] - lv.C[i] < lv.h_prev) ck.disjoint_ok = false;
        ck.ratio = Rat(lv.h_next, lv.h_prev * lv.c_size());
        if (lv.lcase == LevelCase::I)
            ck.ratio_ok = ck.ratio == 1;
        else if (lv.lcase == LevelCase::II)
            ck.ratio_ok = ck.ratio == Rat(1) + Rat(1, 2 * lv.h_prev);
        else
            ck.ratio_ok = ck.ratio >= 1;
        ck.flush = lv.C.back() + lv.h_prev == lv.h_next;
        ck.sym_diff_ratio =
            lv.lcase == LevelCase::Raw ? Rat(0) : lv.symmetric_difference_ratio();
        rep.ratio_product *= ck.ratio;
        if (!ck.pass()) rep.all_pass = false;
        rep.levels.push_back(std::move(ck));
    }
    rep.bound_with_tail = rep.ratio_product;
    if (!sys.assume_complete() && sys.depth() > 0) {
        Int hd = sys.h(sys.depth());
        rep.bound_with_tail *= Rat(2 * hd, 2 * hd - 1);
    }
    return rep;
}

// ---------------------------------------------------------------------
// Point-level dynamics, used by the oracle side of the engine tests.

/// A point of X expressed at some tower depth: the level f inside F_depth
/// plus materialized coordinates c_{depth+1}, ..., c_{depth+#tail};
/// beyond those the canonical extension is c_k = 0 (0 lies in every C_k).
struct Point {
    long depth = 0;
    Int f;
    std::vector<Int> tail;
};

inline Point make_point(const CfSystem& sys, long depth, Int f, std::vector<Int> tail = {}) {
    if (depth < 0 || depth > sys.depth())
        throw ConfigError("POINT_DEPTH", "point depth outside built system");
    if (f < 0 || f >= sys.h(depth))
        throw ConfigError("POINT_LEVEL", "point level outside F_depth");
    for (std::size_t i = 0; i < tail.size(); ++i) {
        long k = depth + 1 + static_cast<long>(i);
        if (k > sys.depth())
            throw ConfigError("POINT_TAIL", "point tail beyond built depth");
        if (!sys.level(k).contains_column(tail[i]))
            throw ConfigError("POINT_TAIL", "tail coordinate not in C_k");
    }
    return Point{depth, std::move(f), std::move(tail)};
}

/// Coordinate c_k of a point for k > depth (canonical zeros beyond the
/// materialized tail).
inline Int point_coord(const Point& x, long k) {
    long idx = k - x.depth - 1;
    if (idx < 0) throw ConfigError("COORD", "coordinate below point depth");
    if (idx >= static_cast<long>(x.tail.size())) return 0;
    return x.tail[static_cast<std::size_t>(idx)];
}

/// Re-expresses x at a deeper tower via the embedding
/// (f, c_{m+1}, rest) -> (f + c_{m+1}, rest).
inline Point embed_to(const CfSystem& sys, Point x, long new_depth) {
    while (x.depth < new_depth) {
        Int c = point_coord(x, x.depth + 1);
        x.f += c;
        if (!x.tail.empty()) x.tail.erase(x.tail.begin());
        ++x.depth;
    }
    (void)sys;
    return x;
}

inline bool points_equal(const CfSystem& sys, const Point& a, const Point& b) {
    long d = std::max(a.depth, b.depth);
    Point ea = embed_to(sys, a, d);
    Point eb = embed_to(sys, b, d);
    if (ea.f != eb.f) return false;
    std::size_t n = std::max(ea.tail.size(), eb.tail.size());
    for (std::size_t i = 0; i < n; ++i) {
        Int ca = i < ea.tail.size() ? ea.tail[i] : Int(0);
        Int cb = i < eb.tail.size() ? eb.tail[i] : Int(0);
        if (ca != cb) return false;
    }
    return true;
}

/// T iterated `steps` times (negative allowed), with automatic depth
/// promotion at tower tops.  Returns nullopt when a promotion would need
/// a coordinate beyond the built depth: the caller deepens the system.
inline std::optional<Point> apply_T(const CfSystem& sys, Point x, Int steps,
                                    const Int& step_cap = 1000000) {
    if (boost::multiprecision::abs(steps) > step_cap)
        throw CapError("STEP_CAP", "apply_T: |steps| exceeds cap");
    while (steps != 0) {
        if (steps > 0) {
            while (x.f == sys.h(x.depth) - 1) {
                if (x.depth >= sys.depth()) return std::nullopt;
                x = embed_to(sys, std::move(x), x.depth + 1);
            }
            x.f += 1;
            --steps;
        } else {
            while (x.f == 0) {
                if (x.depth >= sys.depth()) return std::nullopt;
                x = embed_to(sys, std::move(x), x.depth + 1);
            }
            x.f -= 1;
            ++steps;
        }
    }
    return x;
}

/// The point of tower-L level f whose tail is the canonical zero
/// extension, expressed at its minimal depth.
inline Point point_at_level(const CfSystem& sys, long L, const Int& f) {
    auto d = sys.decompose(f, L);
    std::vector<Int> tail(d.coords.begin() + d.min_depth, d.coords.begin() + L);
    return Point{d.min_depth, d.residual, std::move(tail)};
}

/// S_zbar per the tower-shift formula: x at depth m with
/// f < h_m - (z_1 + ... + z_m) and every materialized coordinate in
/// C_k ∩ (C_k - z_k) maps to (z_1+...+z_m + f, z_{m+1}+c_{m+1}, ...).
/// Coordinates are shifted through the built depth; nullopt when x is
/// outside the natural domain at its expressed depth.
inline std::optional<Point> s_z_apply(const CfSystem& sys, const Point& x) {
    long m = x.depth;
    Int zsum = 0;
    for (long k = 1; k <= m; ++k) zsum += sys.level(k).z;
    if (!(x.f < sys.h(m) - zsum)) return std::nullopt;
    std::vector<Int> tail;
    for (long k = m + 1; k <= sys.depth(); ++k) {
        Int c = point_coord(x, k);
        const CfLevel& lv = sys.level(k);
        if (!lv.contains_column(c) || !lv.contains_column(c + lv.z)) return std::nullopt;
        tail.push_back(c + lv.z);
    }
    return Point{m, x.f + zsum, std::move(tail)};
}

}  // namespace specmult
