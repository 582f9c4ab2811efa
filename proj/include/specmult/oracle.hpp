#pragma once

// Brute-force cross-check of the matrix-element engines on hand-built
// toy systems: every tower-L level is simulated point-wise through the
// actual dynamics (apply_T with depth promotion) and the cocycle phases
// are tallied independently of the level-set calculus the engines use.

#include "specmult/koopman.hpp"

#include <random>
#include <string>
#include <vector>

namespace specmult {

struct ToySystem {
    std::string name;
    CfSystem sys;
    std::vector<CocycleTable> tables;
};

/// Three fixed toys with h_L <= 500 and free-form cocycle tables.
inline std::vector<ToySystem> builtin_toys() {
    auto words = std::vector<std::string>{"0", "1", "10", "01", "110", "100", "0101", "0011"};
    auto make_tables = [&](const CfSystem& sys, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::vector<CocycleTable> tabs;
        for (long t = 1; t <= sys.depth(); ++t) {
            std::map<Int, KValue> vals;
            for (const Int& c : sys.level(t).C)
                vals[c] = c == 0 ? KValue::zero()
                                 : KValue(words[rng() % words.size()]);
            tabs.push_back(CocycleTable::from_raw(sys.level(t), std::move(vals)));
        }
        return tabs;
    };
    std::vector<ToySystem> toys;
    {
        auto sys = CfSystem::from_raw({{{Int(0), Int(2), Int(5)}, Int(8)},
                                       {{Int(0), Int(8), Int(17), Int(30)}, Int(40)}});
        auto tabs = make_tables(sys, 101);
        toys.push_back({"toy-40", std::move(sys), std::move(tabs)});
    }
    {
        auto sys = CfSystem::from_raw(
            {{{Int(0), Int(3)}, Int(7)},
             {{Int(0), Int(7), Int(15)}, Int(23)},
             {{Int(0), Int(23), Int(47), Int(71), Int(100)}, Int(124)}});
        auto tabs = make_tables(sys, 202);
        toys.push_back({"toy-124", std::move(sys), std::move(tabs)});
    }
    {
        auto sys = CfSystem::from_raw(
            {{{Int(0), Int(1)}, Int(2)},
             {{Int(0), Int(2), Int(4), Int(7), Int(11)}, Int(18)},
             {{Int(0), Int(18), Int(40), Int(62), Int(90), Int(120), Int(155), Int(190),
               Int(230), Int(270), Int(311), Int(355), Int(400), Int(450)},
              Int(500)}});
        auto tabs = make_tables(sys, 303);
        toys.push_back({"toy-500", std::move(sys), std::move(tabs)});
    }
    return toys;
}

/// Conditioned brute-force value of <U_chi^m 1_[A]_N, 1_[B]_N> at the
/// full built depth: enumerates every tower-L level, walks the orbit
/// point-wise, and tallies the cocycle phase.  Levels whose orbit leaves
/// the built tower are skipped (they sit inside the engine's certified
/// slack).
inline Rat brute_force_inner_product(const CfSystem& sys,
                                     const std::vector<CocycleTable>& tables,
                                     const GroupElement& chi, const Int& power,
                                     const std::vector<Int>& A, const std::vector<Int>& B,
                                     long N) {
    long L = sys.depth();
    std::vector<Int> SA = A, SB = B;
    for (long k = N + 1; k <= L; ++k) {
        std::vector<Int> next;
        for (const Int& c : sys.level(k).C) {
            for (const Int& f : SA) next.push_back(f + c);
        }
        SA = next;
        next.clear();
        for (const Int& c : sys.level(k).C) {
            for (const Int& f : SB) next.push_back(f + c);
        }
        SB = std::move(next);
    }
    std::sort(SA.begin(), SA.end());
    std::sort(SB.begin(), SB.end());
    Int hL = sys.h(L);
    Int sum = 0;
    for (const Int& f : SB) {
        Int g = f + power;
        if (g < 0 || g >= hL) continue;
        Point x = point_at_level(sys, L, f);
        auto y = apply_T(sys, x, power);
        if (!y) continue;
        Point ye = embed_to(sys, *y, L);
        if (ye.f != g)
            throw VerificationError("ORACLE_DYNAMICS",
                                    "point simulation disagrees with level arithmetic");
        if (!std::binary_search(SA.begin(), SA.end(), g)) continue;
        sum += char_eval(chi, cocycle_between(sys, tables, *y, x));
    }
    return Rat(sum, hL);
}

struct OracleQueryResult {
    std::string toy;
    GroupElement chi;
    Int power;
    long N = 0;
    Rat oracle_value;
    Interval engine;
    bool contained = false;
};

struct OracleReport {
    std::vector<OracleQueryResult> queries;
    std::int64_t violations = 0;
    bool pass() const { return violations == 0 && !queries.empty(); }
};

/// Randomized engine-vs-oracle comparison across the built-in toys.
inline OracleReport run_oracle_comparison(std::uint64_t seed, int query_count,
                                          int max_power = 50,
                                          std::size_t enumeration_cap = 2000000) {
    auto toys = builtin_toys();
    std::mt19937_64 rng(seed);
    GroupElement chi_nonzero{0, 2};
    OracleReport rep;
    for (int q = 0; q < query_count; ++q) {
        const ToySystem& toy = toys[static_cast<std::size_t>(q) % toys.size()];
        long depth = toy.sys.depth();
        long N = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(depth));
        Int hN = toy.sys.h(N);
        std::vector<Int> A, B;
        for (Int f = 0; f < hN; ++f) {
            if (rng() % 3 == 0) A.push_back(f);
            if (rng() % 3 == 0) B.push_back(f);
        }
        OracleQueryResult r;
        r.toy = toy.name;
        r.chi = (rng() % 2 == 0) ? GroupElement{} : chi_nonzero;
        r.power = Int(rng() % static_cast<std::uint64_t>(max_power + 1));
        r.N = N;
        InnerProductQuery query{r.chi, r.power, A, B, N, depth};
        r.engine = inner_product(toy.sys, toy.tables, query, enumeration_cap);
        r.oracle_value =
            brute_force_inner_product(toy.sys, toy.tables, r.chi, r.power, A, B, N);
        r.contained = r.engine.contains(r.oracle_value);
        if (!r.contained) ++rep.violations;
        rep.queries.push_back(std::move(r));
    }
    return rep;
}

}  // namespace specmult
