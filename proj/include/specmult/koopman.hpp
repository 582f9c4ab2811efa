#pragma once

// Exact matrix elements of powers of the twisted operators
// U_chi g(x) = chi(alpha(Tx, x)) g(Tx), and the weak-limit traces they
// feed.  Two engines:
//
//  * inner_product — generic power m, enumerates the tower-L level sets
//    of the cylinders.  Exponential in depth, used for toy systems and
//    as the oracle cross-check target.
//
//  * hn_power_element — the h_n power only, O(#C_{n+1}).  Within tower
//    n+1 the step T^{h_n} moves a point of column c, tower-n level f, to
//    column c + h_n at the same level (columns at gap h_n), to column
//    c + h_n + 1 at level f-1 (gap h_n + 1; level 0 lands on a spacer),
//    or out of certainty for the single top column.  The cocycle phase
//    along the move is the table increment, so matrix elements reduce
//    to phase-weighted column pair counts times exact level masses.
//
// Everything is exact rational; uncertainty (tower-top leakage, measure
// truncation) widens the returned interval, never the center.

#include "specmult/cf.hpp"
#include "specmult/cocycle.hpp"
#include "specmult/errors.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace specmult {

struct InnerProductQuery {
    GroupElement chi;
    Int power;           // m; negative powers delegate to the adjoint
    std::vector<Int> A;  // subset of F_N
    std::vector<Int> B;  // subset of F_N
    long N = 0;
    long L = 0;          // conditioning level, N <= L <= depth
};

namespace detail {

inline void check_cylinder(const CfSystem& sys, const std::vector<Int>& A, long N) {
    Int hN = sys.h(N);
    for (const Int& f : A)
        if (f < 0 || f >= hN)
            throw ConfigError("CYL_RANGE", "cylinder set not inside F_N");
}

/// Expands A + C_{N+1} + ... + C_L (all sums distinct by disjointness).
inline std::vector<Int> level_set(const CfSystem& sys, std::vector<Int> s, long N, long L,
                                  std::size_t cap) {
    std::sort(s.begin(), s.end());
    for (long k = N + 1; k <= L; ++k) {
        const auto& C = sys.level(k).C;
        if (s.size() * C.size() > cap)
            throw CapError("ENUM_CAP",
                           "level-set enumeration exceeds cap; use hn_power_element");
        std::vector<Int> next;
        next.reserve(s.size() * C.size());
        for (const Int& c : C)
            for (const Int& f : s) next.push_back(f + c);
        std::sort(next.begin(), next.end());
        s = std::move(next);
    }
    return s;
}

}  // namespace detail

/// Generic engine: <U_chi^m 1_[A]_N, 1_[B]_N> conditioned at L.
inline Interval inner_product(const CfSystem& sys, const std::vector<CocycleTable>& tables,
                              const InnerProductQuery& q, std::size_t enumeration_cap = 200000) {
    if (q.N > q.L || q.L > sys.depth())
        throw ConfigError("COND_RANGE", "need N <= L <= built depth");
    detail::check_cylinder(sys, q.A, q.N);
    detail::check_cylinder(sys, q.B, q.N);
    if (q.power < 0) {
        // <U^m f, g> = <f, U^-m g> and all our matrix elements are real.
        InnerProductQuery r{q.chi, -q.power, q.B, q.A, q.N, q.L};
        return inner_product(sys, tables, r, enumeration_cap);
    }
    std::vector<Int> SA = detail::level_set(sys, q.A, q.N, q.L, enumeration_cap);
    std::vector<Int> SB = detail::level_set(sys, q.B, q.N, q.L, enumeration_cap);
    Int hL = sys.h(q.L);
    std::map<Int, int> phase_memo;
    auto phase = [&](const Int& f) {
        auto it = phase_memo.find(f);
        if (it != phase_memo.end()) return it->second;
        int p = char_eval(q.chi, cocycle_word(sys, tables, f, q.L));
        phase_memo.emplace(f, p);
        return p;
    };
    Int certain = 0, leak = 0;
    for (const Int& f : SB) {
        Int g = f + q.power;
        if (g >= hL) {
            ++leak;
            continue;
        }
        if (std::binary_search(SA.begin(), SA.end(), g))
            certain += phase(g) * phase(f);
    }
    return phase_mass_interval(certain, leak, sys.level_mass(q.L));
}

// ---------------------------------------------------------------------
// Chain phase data: the tower-N column offsets within tower L form the
// direct sum W = C_{N+1} + ... + C_L.  For the adjoint and the h_n
// engine we need, per character, the phase-weighted count of offset
// pairs at distance exactly h_N:
//
//   T_L = sum over (w, w + h_N) in W^2 of chi(word(w + h_N) - word(w)).
//
// Pairs either share every coordinate above some level (in-column,
// #C-fold of the shorter chain) or straddle a column boundary, which
// forces the lower offset flush against the column top; hence the
// recursion below, tracking whether the flush offset exists and its word.

struct ChainPhase {
    Int W{1};          // |C_{N+1}| * ... * |C_L|
    Int T{0};          // phase-weighted h_N-adjacency sum
    bool flush = true; // h_L - h_N is an offset of the chain
    KValue flushword;  // its cocycle word
};

inline ChainPhase compute_chain(const CfSystem& sys, const std::vector<CocycleTable>& tables,
                                const GroupElement& chi, long N, long L) {
    ChainPhase ch;
    for (long k = N + 1; k <= L; ++k) {
        const CfLevel& lv = sys.level(k);
        const CocycleTable& tab = tables[static_cast<std::size_t>(k - 1)];
        Int P = 0;
        for (const Int& c : lv.C) {
            Int cc = c + lv.h_prev;
            if (lv.contains_column(cc))
                P += char_eval(chi, tab.value(cc) + tab.value(c));
        }
        Int T_next = Int(lv.c_size()) * ch.T;
        if (ch.flush) T_next += Int(char_eval(chi, ch.flushword)) * P;
        ch.T = T_next;
        ch.W *= lv.c_size();
        bool flush_here = lv.C.back() + lv.h_prev == lv.h_next;
        if (ch.flush && flush_here)
            ch.flushword = ch.flushword + tab.value(lv.C.back());
        ch.flush = ch.flush && flush_here;
    }
    return ch;
}

/// Detail of an exact matrix-element computation (exposed for tests and
/// the error-budget assertions).
struct MatrixElement {
    Interval value;
    Int certain{0};    // integer phase sum multiplying the level mass
    Int leak{0};       // number of level masses of unresolved contribution
    Rat cond_mass{0};  // conditioned single-level mass (upper endpoint)
    Rat conditioned() const { return Rat(certain) * cond_mass; }
};

namespace detail {

inline MatrixElement assemble(const Int& certain, const Int& leak, const Interval& mass) {
    MatrixElement me;
    me.certain = certain;
    me.leak = leak;
    me.cond_mass = mass.hi;
    me.value = phase_mass_interval(certain, leak, mass);
    return me;
}

/// Phase of a single T-step from tower-N level b-1 to b.
inline int step_phase(const CfSystem& sys, const std::vector<CocycleTable>& tables,
                      const GroupElement& chi, long N, const Int& b) {
    return char_eval(chi, cocycle_word(sys, tables, b, N) +
                              cocycle_word(sys, tables, b - 1, N));
}

}  // namespace detail

/// <U_chi^* 1_[A]_N, 1_[B]_N> conditioned at L, computed exactly from the
/// chain data: interior steps stay inside a tower-N column; the only
/// cross-column pairs are the h_N-adjacent chain offsets; the single
/// tower-L bottom level leaks.
inline MatrixElement ustar_inner(const CfSystem& sys, const std::vector<CocycleTable>& tables,
                                 const GroupElement& chi, const std::vector<Int>& A,
                                 const std::vector<Int>& B, long N, long L) {
    if (N > L || L > sys.depth())
        throw ConfigError("COND_RANGE", "need N <= L <= built depth");
    detail::check_cylinder(sys, A, N);
    detail::check_cylinder(sys, B, N);
    std::set<Int> As(A.begin(), A.end()), Bs(B.begin(), B.end());
    ChainPhase ch = compute_chain(sys, tables, chi, N, L);
    Int instep = 0;
    for (const Int& b : Bs)
        if (b >= 1 && As.count(b - 1)) instep += detail::step_phase(sys, tables, chi, N, b);
    Int certain = ch.W * instep;
    Int hN = sys.h(N);
    if (Bs.count(0) && As.count(hN - 1)) {
        int top = char_eval(chi, cocycle_word(sys, tables, hN - 1, N));
        certain += Int(top) * ch.T;
    }
    Int leak = Bs.count(0) ? 1 : 0;
    return detail::assemble(certain, leak, sys.level_mass(L));
}

/// The h_n-power engine: <U_chi^{h_n} 1_[A]_N, 1_[B]_N> conditioned at
/// n+1, for recipe-built level n+1 (column gaps in {h_n, h_n+1}).
struct HnPowerDetail {
    MatrixElement element;
    Int a_sum{0};        // phases over columns paired at gap h_n
    Int b_sum{0};        // phases over columns paired at gap h_n + 1
    Int unpaired{0};     // columns with neither partner (tower top)
    Int W{1};            // refinement factor |C_{N+1}..C_n|
};

inline HnPowerDetail hn_power_element(const CfSystem& sys,
                                      const std::vector<CocycleTable>& tables,
                                      const GroupElement& chi, long n,
                                      const std::vector<Int>& A, const std::vector<Int>& B,
                                      long N) {
    if (n + 1 > sys.depth())
        throw ConfigError("DEPTH", "hn_power_element: tower n+1 not built");
    if (N > n) throw ConfigError("CYL_LEVEL", "hn_power_element: need N <= n");
    const CfLevel& lv = sys.level(n + 1);
    if (lv.lcase == LevelCase::Raw)
        throw ConfigError("RAW_LEVEL", "hn_power_element needs a recipe level n+1");
    detail::check_cylinder(sys, A, N);
    detail::check_cylinder(sys, B, N);
    const CocycleTable& tab = tables[static_cast<std::size_t>(n)];
    const Int& h = lv.h_prev;

    HnPowerDetail d;
    for (const Int& c : lv.C) {
        if (lv.contains_column(c + h))
            d.a_sum += char_eval(chi, tab.value(c + h) + tab.value(c));
        else if (lv.contains_column(c + h + 1))
            d.b_sum += char_eval(chi, tab.value(c + h + 1) + tab.value(c));
        else
            d.unpaired += 1;
    }

    std::set<Int> As(A.begin(), A.end()), Bs(B.begin(), B.end());
    ChainPhase ch = compute_chain(sys, tables, chi, N, n);
    d.W = ch.W;
    Int inter = 0;
    for (const Int& f : As)
        if (Bs.count(f)) ++inter;
    Int certain = d.a_sum * inter * ch.W;

    // The gap-(h+1) pairs realize the adjoint's step structure at the
    // refined level: tower-n level f of [B] maps to f-1, which lies in
    // [A] by the same in-column / flush-cross split as ustar_inner.
    Int instep = 0;
    for (const Int& b : Bs)
        if (b >= 1 && As.count(b - 1)) instep += detail::step_phase(sys, tables, chi, N, b);
    Int b_inner = ch.W * instep;
    Int hN = sys.h(N);
    if (Bs.count(0) && As.count(hN - 1)) {
        int top = char_eval(chi, cocycle_word(sys, tables, hN - 1, N));
        b_inner += Int(top) * ch.T;
    }
    certain += d.b_sum * b_inner;

    Int leak = d.unpaired * Int(Bs.size()) * ch.W;
    d.element = detail::assemble(certain, leak, sys.level_mass(n + 1));
    return d;
}

// ---------------------------------------------------------------------
// Weak-limit traces against the predicted limit operators.

struct TraceRow {
    long n = 0;
    Int h_n;
    Interval achieved;
    Rat predicted;            // conditioned predicted value (exact, deterministic)
    Interval predicted_range; // predicted with its own certified slack
    Rat err_bound;            // worst case across both intervals
    Rat scale;                // conditioned mu([B]) at level n+1
};

struct WeakLimitTrace {
    GroupElement chi;
    Label label;
    long N = 0;
    std::vector<Int> A, B;
    std::vector<TraceRow> rows;

    /// err <= bound_num / n for all rows with n in [n_lo, n_hi].
    bool bound_ok(const Rat& bound_num, long n_lo, long n_hi) const {
        for (const auto& r : rows)
            if (r.n >= n_lo && r.n <= n_hi && !(r.err_bound <= bound_num / Rat(r.n)))
                return false;
        return true;
    }

    /// Strict endpoint improvement: the error at the largest n is below
    /// the error at the smallest (requires at least two rows).
    bool endpoint_decrease_ok() const {
        if (rows.size() < 2) return false;
        return rows.back().err_bound < rows.front().err_bound;
    }
};

/// Runs the trace for the scheduled levels `ns` (each must carry `label`
/// at tower n+1).  Predictions follow the two limit formulas:
/// l_chi(a) * <1_A, 1_B> for singles, and
/// 0.5 (l_chi(a) <1_A,1_B> + l_chi(b) <U* 1_A, 1_B>) for pairs.
inline WeakLimitTrace weak_limit_trace(const CfSystem& sys,
                                       const std::vector<CocycleTable>& tables,
                                       const GroupElement& chi, const Label& label,
                                       const std::vector<Int>& A, const std::vector<Int>& B,
                                       long N, const std::vector<long>& ns) {
    WeakLimitTrace tr;
    tr.chi = chi;
    tr.label = label;
    tr.N = N;
    tr.A = A;
    tr.B = B;
    for (long n : ns) {
        if (n + 1 > sys.depth())
            throw ConfigError("DEPTH", "trace level beyond built depth");
        if (!(sys.label_of(n + 1) == label))
            throw ConfigError("SCHEDULE_MISMATCH",
                              "tower " + std::to_string(n + 1) +
                                  " does not carry the requested label");
        HnPowerDetail hn = hn_power_element(sys, tables, chi, n, A, B, N);

        std::vector<Int> AB;
        for (const Int& f : A)
            if (std::find(B.begin(), B.end(), f) != B.end()) AB.push_back(f);
        Interval meas = sys.measure_cylinder(AB, N, n + 1);
        Rat cond_meas = meas.hi;

        Interval predicted_range;
        Rat predicted;
        if (!label.is_pair) {
            Rat l = l_value(chi, label.a);
            predicted_range = meas.scaled(l);
            predicted = l * cond_meas;
        } else {
            Rat la = l_value(chi, label.a);
            Rat lb = l_value(chi, label.b);
            MatrixElement us = ustar_inner(sys, tables, chi, A, B, N, n + 1);
            predicted_range = meas.scaled(la / 2) + us.value.scaled(lb / 2);
            predicted = la / 2 * cond_meas + lb / 2 * Rat(us.certain) * us.cond_mass;
        }

        TraceRow row;
        row.n = n;
        row.h_n = sys.h(n);
        row.achieved = hn.element.value;
        row.predicted = predicted;
        row.predicted_range = predicted_range;
        row.err_bound = hn.element.value.worst_case_distance(predicted_range);
        row.scale = sys.measure_cylinder(B, N, n + 1).hi;

        // Reported-width budget: the achieved width comes only from the
        // unpaired columns and the measure truncation.
        const CfLevel& lv = sys.level(n + 1);
        Rat trunc_frac = Rat(1) - Rat(1) / sys.tail_factor(n + 1);
        Rat budget =
            row.scale * (Rat(3) * trunc_frac + Rat(2 * hn.unpaired, lv.c_size()));
        if (row.achieved.width() > budget)
            throw VerificationError("WIDTH_BUDGET",
                                    "achieved interval width exceeds closed-form budget");
        tr.rows.push_back(std::move(row));
    }
    return tr;
}

// ---------------------------------------------------------------------
// Premise suite: the finite-scale evidence consumed by the cited
// spectral lemmas.  The spectral conclusions themselves (homogeneity,
// simplicity, singularity) are infinite-dimensional and are only cited.

struct ClaimBEvidence {
    GroupElement chi;
    KValue witness;
    Rat l_val;               // l_chi(witness), != 1
    bool witness_scheduled;  // (0, witness) is a scheduled pair
    std::optional<WeakLimitTrace> trace_base;  // chi = 0 along (0, witness)
    std::optional<WeakLimitTrace> trace_chi;   // chi along (0, witness)
};

struct ClaimCEvidence {
    GroupElement chi, xi;
    bool translates = false;
    std::int64_t shift_by = 0;
};

struct ClaimDEvidence {
    GroupElement chi, xi;
    KValue witness;
    Rat l_chi, l_xi;         // differ
    bool witness_scheduled;  // witness is a scheduled single
    std::optional<WeakLimitTrace> trace_chi;  // along N_witness
    std::optional<WeakLimitTrace> trace_xi;
};

struct PremiseReport {
    std::optional<WeakLimitTrace> claim_a;  // chi = 0 along (0,0)
    std::vector<ClaimBEvidence> claim_b;
    std::vector<ClaimCEvidence> claim_c;
    std::vector<ClaimDEvidence> claim_d;
    bool summability_pass = false;
    std::string disclaimer =
        "spectral conclusions (homogeneous multiplicity 2, simplicity, unitary "
        "equivalence along shift orbits, mutual singularity) are cited results; "
        "this report verifies their finite-scale premises only";
};

/// Scheduled trace levels for a label: all built n >= n_min with the
/// label at tower n+1.
inline std::vector<long> scheduled_ns(const CfSystem& sys, const Label& label, long n_min) {
    std::vector<long> ns;
    for (long n = n_min; n + 1 <= sys.depth(); ++n)
        if (sys.label_of(n + 1) == label) ns.push_back(n);
    return ns;
}

inline PremiseReport premise_suite(const CfSystem& sys,
                                   const std::vector<CocycleTable>& tables,
                                   const Schedule& schedule,
                                   const std::vector<GroupElement>& characters,
                                   const std::vector<Int>& A, const std::vector<Int>& B,
                                   long N, long n_min, std::int64_t period_cap = 16) {
    PremiseReport rep;
    const GroupElement zero;

    auto run_trace = [&](const GroupElement& chi, const Label& lb)
        -> std::optional<WeakLimitTrace> {
        auto ns = scheduled_ns(sys, lb, n_min);
        if (ns.empty()) return std::nullopt;
        return weak_limit_trace(sys, tables, chi, lb, A, B, N, ns);
    };

    Label l00 = Label::pair(KValue::zero(), KValue::zero());
    rep.claim_a = run_trace(zero, l00);

    rep.summability_pass = summability_report(sys, tables).all_pass;

    for (const auto& chi : characters) {
        if (chi.is_zero()) continue;
        // Witness with l_chi(a) != 1: prefer scheduled (0, a) pairs, then
        // scheduled singles, then the deterministic general search.
        ClaimBEvidence ev;
        ev.chi = chi;
        bool found = false;
        for (const auto& [x, y] : schedule.pairs()) {
            if (x.is_zero() && l_value(chi, y) != 1) {
                ev.witness = y;
                ev.witness_scheduled = true;
                found = true;
                break;
            }
        }
        if (!found) {
            for (const auto& s : schedule.singles()) {
                if (l_value(chi, s) != 1) {
                    ev.witness = s;
                    ev.witness_scheduled = false;
                    found = true;
                    break;
                }
            }
        }
        if (!found) {
            auto w = find_separating_point(chi, zero, period_cap);
            if (!w)
                throw VerificationError("WITNESS", "no separating point for chi within cap");
            ev.witness = *w;
            ev.witness_scheduled = false;
        }
        ev.l_val = l_value(chi, ev.witness);
        if (ev.witness_scheduled) {
            Label lb = Label::pair(KValue::zero(), ev.witness);
            ev.trace_base = run_trace(zero, lb);
            ev.trace_chi = run_trace(chi, lb);
        }
        rep.claim_b.push_back(std::move(ev));
    }

    for (std::size_t i = 0; i < characters.size(); ++i) {
        for (std::size_t j = i + 1; j < characters.size(); ++j) {
            const GroupElement& chi = characters[i];
            const GroupElement& xi = characters[j];
            if (chi.is_zero() || xi.is_zero()) continue;
            if (are_shift_translates(chi, xi)) {
                ClaimCEvidence ev;
                ev.chi = chi;
                ev.xi = xi;
                ev.translates = true;
                ev.shift_by = chi.support().front() - xi.support().front();
                rep.claim_c.push_back(std::move(ev));
            } else {
                ClaimDEvidence ev;
                ev.chi = chi;
                ev.xi = xi;
                bool found = false;
                for (const auto& s : schedule.singles()) {
                    if (l_value(chi, s) != l_value(xi, s)) {
                        ev.witness = s;
                        ev.witness_scheduled = true;
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    auto w = find_separating_point(chi, xi, period_cap);
                    if (!w)
                        throw VerificationError("WITNESS",
                                                "no separating point for (chi, xi)");
                    ev.witness = *w;
                    ev.witness_scheduled = false;
                }
                ev.l_chi = l_value(chi, ev.witness);
                ev.l_xi = l_value(xi, ev.witness);
                if (ev.witness_scheduled) {
                    Label lb = Label::single(ev.witness);
                    ev.trace_chi = run_trace(chi, lb);
                    ev.trace_xi = run_trace(xi, lb);
                }
                rep.claim_d.push_back(std::move(ev));
            }
        }
    }
    return rep;
}

}  // namespace specmult
