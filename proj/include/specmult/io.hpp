#pragma once

// File formats.  Heights, offsets and columns of (C,F) systems are
// serialized as decimal strings (they outgrow doubles and int64 fast);
// block-system elements stay native integers (the builder caps them well
// inside int64).  Rationals are "p/q" strings.  nlohmann::json keeps
// object keys sorted, so identical inputs dump byte-identically.

#include "specmult/blocks.hpp"
#include "specmult/cf.hpp"
#include "specmult/cocycle.hpp"
#include "specmult/koopman.hpp"
#include "specmult/multiplicity.hpp"
#include "specmult/oracle.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace specmult {

using nlohmann::json;

// ---------------------------------------------------------------- basics

inline json to_json(const GroupElement& g) {
    json a = json::array();
    for (auto p : g.support()) a.push_back(p);
    return a;
}

inline GroupElement group_element_from_json(const json& j) {
    std::vector<std::int64_t> v;
    for (const auto& e : j) v.push_back(e.get<std::int64_t>());
    return GroupElement(std::move(v));
}

inline json to_json(const KValue& a) {
    return json{{"period", a.period()}, {"word", a.word_str()}};
}

inline KValue kvalue_from_json(const json& j) {
    KValue v(j.at("word").get<std::string>());
    if (v.period() != j.at("period").get<std::int64_t>())
        throw ConfigError("KVALUE_PERIOD", "serialized period is not the least period");
    return v;
}

inline json to_json(const Label& l) {
    json j{{"type", l.is_pair ? "pair" : "single"}, {"a", to_json(l.a)}};
    if (l.is_pair) j["b"] = to_json(l.b);
    return j;
}

inline Label label_from_json(const json& j) {
    if (j.at("type") == "pair")
        return Label::pair(kvalue_from_json(j.at("a")), kvalue_from_json(j.at("b")));
    return Label::single(kvalue_from_json(j.at("a")));
}

inline json to_json(const Interval& iv) {
    return json{{"lo", to_string(iv.lo)}, {"hi", to_string(iv.hi)}, {"level", iv.level}};
}

// ----------------------------------------------------------- block system

inline json to_json(const BlockSystem& sys) {
    json blocks = json::array();
    for (const auto& b : sys.blocks()) blocks.push_back(b);
    return json{{"E", sys.target().enumeration_order()},
                {"steps", sys.steps()},
                {"blocks", blocks},
                {"step_boundaries", sys.step_boundaries()},
                {"offsets_used", sys.offsets_used()}};
}

inline BlockSystem block_system_from_json(const json& j) {
    TargetSequence target(j.at("E").get<std::vector<std::int64_t>>());
    std::vector<BlockSystem::Block> blocks;
    for (const auto& b : j.at("blocks")) blocks.push_back(b.get<std::vector<std::int64_t>>());
    return BlockSystem::restore(std::move(target), std::move(blocks),
                                j.at("step_boundaries").get<std::vector<std::size_t>>(),
                                j.at("offsets_used").get<std::vector<std::int64_t>>());
}

inline json to_json(const VerifyReport& rep) {
    json rows = json::array();
    for (const auto& r : rep.rows)
        rows.push_back(json{{"support", r.support},
                            {"p", r.p},
                            {"count", r.count},
                            {"expected", r.expected},
                            {"pass", r.pass}});
    return json{{"rows", rows},
                {"truncated", rep.truncated},
                {"all_pass", rep.all_pass},
                {"realized_values", rep.realized_values},
                {"realized_subset_of_E", rep.realized_subset_of_E},
                {"realized_covers_prefix", rep.realized_covers_prefix},
                {"pass", rep.pass()}};
}

// -------------------------------------------------------------- cf system

inline json to_json(const CfLevel& lv) {
    json j{{"n", lv.index},
           {"param", lv.param},
           {"case", level_case_str(lv.lcase)},
           {"label", to_json(lv.label)},
           {"z", to_string(lv.z)},
           {"r", to_string(lv.r)},
           {"h_prev", to_string(lv.h_prev)},
           {"h_next", to_string(lv.h_next)},
           {"spacer_total", to_string(lv.top_padding)}};
    if (lv.lcase == LevelCase::II) {
        json base = json::array();
        for (const auto& d : lv.D) base.push_back(to_string(d));
        j["C_rle"] = json{{"base", base},
                          {"stride", to_string(lv.z)},
                          {"count", to_string(lv.copy_count)}};
    } else {
        json c = json::array();
        for (const auto& v : lv.C) c.push_back(to_string(v));
        j["C"] = c;
    }
    return j;
}

inline CfLevel cf_level_from_json(const json& j) {
    CfLevel lv;
    lv.index = j.at("n").get<long>();
    lv.param = j.at("param").get<long>();
    std::string cs = j.at("case").get<std::string>();
    lv.lcase = cs == "I" ? LevelCase::I : cs == "II" ? LevelCase::II : LevelCase::Raw;
    lv.label = label_from_json(j.at("label"));
    lv.z = Int(j.at("z").get<std::string>());
    lv.r = Int(j.at("r").get<std::string>());
    lv.h_prev = Int(j.at("h_prev").get<std::string>());
    lv.h_next = Int(j.at("h_next").get<std::string>());
    if (j.contains("C_rle")) {
        const json& rle = j.at("C_rle");
        Int stride(rle.at("stride").get<std::string>());
        Int count(rle.at("count").get<std::string>());
        for (const auto& d : rle.at("base")) lv.D.push_back(Int(d.get<std::string>()));
        lv.copy_count = count;
        for (Int k = 0; k < count; ++k)
            for (const Int& d : lv.D) lv.C.push_back(d + k * stride);
        std::sort(lv.C.begin(), lv.C.end());
    } else {
        for (const auto& c : j.at("C")) lv.C.push_back(Int(c.get<std::string>()));
        std::sort(lv.C.begin(), lv.C.end());
    }
    lv.top_padding = lv.h_next - lv.C.back() - lv.h_prev;
    lv.spacer_count = lv.h_next - lv.h_prev * lv.c_size();
    return lv;
}

inline json to_json(const CfSystem& sys) {
    json levels = json::array();
    for (long t = 1; t <= sys.depth(); ++t) levels.push_back(to_json(sys.level(t)));
    return json{{"levels", levels}, {"assume_complete", sys.assume_complete()}};
}

inline CfSystem cf_system_from_json(const json& j) {
    std::vector<CfLevel> levels;
    for (const auto& l : j.at("levels")) levels.push_back(cf_level_from_json(l));
    return CfSystem::restore(std::move(levels), j.at("assume_complete").get<bool>());
}

inline json to_json(const CfValidationReport& rep) {
    json levels = json::array();
    for (const auto& c : rep.levels)
        levels.push_back(json{{"n", c.index},
                              {"c_size_ok", c.c_size_ok},
                              {"fit_ok", c.fit_ok},
                              {"disjoint_ok", c.disjoint_ok},
                              {"ratio", to_string(c.ratio)},
                              {"ratio_ok", c.ratio_ok},
                              {"flush", c.flush},
                              {"sym_diff_ratio", to_string(c.sym_diff_ratio)},
                              {"pass", c.pass()}});
    return json{{"levels", levels},
                {"ratio_product", to_string(rep.ratio_product)},
                {"bound_with_tail", to_string(rep.bound_with_tail)},
                {"all_pass", rep.all_pass}};
}

// ---------------------------------------------------------------- cocycle

inline json to_json(const CfSystem& sys, const CocycleTable& tab) {
    const CfLevel& lv = sys.level(tab.index());
    json j{{"n", tab.index()}};
    if (lv.lcase == LevelCase::II) {
        json base = json::object();
        for (const Int& d : lv.D) base[to_string(d)] = to_json(tab.value(d));
        j["base_values"] = base;
        j["stride"] = to_string(lv.z);
        j["copies"] = to_string(lv.copy_count);
        j["equivariant_extension"] = true;
    } else {
        json vals = json::object();
        for (const auto& [c, v] : tab.values()) vals[to_string(c)] = to_json(v);
        j["values"] = vals;
    }
    json freqs = json::array();
    for (const auto& f : tab.freq_rows())
        freqs.push_back(json{{"e", std::string(1, f.e)},
                             {"i", f.i},
                             {"count", to_string(f.count)},
                             {"freq", to_string(f.freq)},
                             {"target", to_string(f.target)},
                             {"deviation", to_string(f.deviation)},
                             {"bound", to_string(f.bound)},
                             {"ok", f.ok}});
    j["achieved_freqs"] = freqs;
    return j;
}

inline CocycleTable cocycle_table_from_json(const CfSystem& sys, const json& j) {
    long index = j.at("n").get<long>();
    const CfLevel& lv = sys.level(index);
    std::map<Int, KValue> values;
    if (j.contains("base_values")) {
        Int stride(j.at("stride").get<std::string>());
        Int copies(j.at("copies").get<std::string>());
        for (const auto& [k, v] : j.at("base_values").items()) {
            Int d(k);
            KValue base = kvalue_from_json(v);
            for (Int c = 0; c < copies; ++c) values[d + c * stride] = shift(base, to_long(c));
        }
    } else {
        for (const auto& [k, v] : j.at("values").items()) values[Int(k)] = kvalue_from_json(v);
    }
    return CocycleTable::from_raw(lv, std::move(values));
}

inline json to_json(const SummabilityReport& rep) {
    json rows = json::array();
    for (const auto& r : rep.rows)
        rows.push_back(json{{"n", r.index},
                            {"param", r.param},
                            {"c_size", to_string(r.c_size)},
                            {"intersection", r.intersection},
                            {"c_circ", r.c_circ},
                            {"sym_diff_ratio", to_string(r.sym_diff_ratio)},
                            {"summand", to_string(r.summand)},
                            {"a1_on_all", r.a1_on_all},
                            {"sym_ok", r.sym_ok},
                            {"summand_ok", r.summand_ok},
                            {"partial_sym_sum", to_string(r.partial_sym_sum)},
                            {"partial_summand_sum", to_string(r.partial_summand_sum)},
                            {"pass", r.pass()}});
    return json{{"rows", rows}, {"all_pass", rep.all_pass}};
}

// ----------------------------------------------------------- trace / CSV

inline std::string chi_str(const GroupElement& chi) {
    std::string s = "[";
    const auto& sup = chi.support();
    for (std::size_t i = 0; i < sup.size(); ++i) {
        if (i) s += ";";
        s += std::to_string(sup[i]);
    }
    return s + "]";
}

inline void write_trace_csv(std::ostream& os, const std::vector<WeakLimitTrace>& traces,
                            const std::string& config_hash) {
    os << "# config=" << config_hash << "\n";
    os << "n,h_n,label,chi,achieved_lo,achieved_hi,predicted,err_bound\n";
    for (const auto& tr : traces)
        for (const auto& r : tr.rows)
            os << r.n << "," << to_string(r.h_n) << "," << tr.label.str() << ","
               << chi_str(tr.chi) << "," << to_string(r.achieved.lo) << ","
               << to_string(r.achieved.hi) << "," << to_string(r.predicted) << ","
               << to_string(r.err_bound) << "\n";
}

inline json to_json(const WeakLimitTrace& tr) {
    json rows = json::array();
    for (const auto& r : tr.rows)
        rows.push_back(json{{"n", r.n},
                            {"h_n", to_string(r.h_n)},
                            {"achieved", to_json(r.achieved)},
                            {"predicted", to_string(r.predicted)},
                            {"predicted_range", to_json(r.predicted_range)},
                            {"err_bound", to_string(r.err_bound)},
                            {"scale", to_string(r.scale)}});
    return json{{"chi", to_json(tr.chi)},
                {"label", to_json(tr.label)},
                {"N", tr.N},
                {"rows", rows}};
}

inline json to_json(const PremiseReport& rep) {
    json j;
    j["disclaimer"] = rep.disclaimer;
    json a;
    a["statement"] =
        "weak closure of U_T powers contains 0.5(I + U_T*): trace along the (0,0) class";
    if (rep.claim_a) a["trace"] = to_json(*rep.claim_a);
    j["a"] = a;
    json b = json::array();
    for (const auto& ev : rep.claim_b) {
        json e{{"chi", to_json(ev.chi)},
               {"witness", to_json(ev.witness)},
               {"l_value", to_string(ev.l_val)},
               {"witness_scheduled", ev.witness_scheduled}};
        if (ev.trace_base) e["trace_base"] = to_json(*ev.trace_base);
        if (ev.trace_chi) e["trace_chi"] = to_json(*ev.trace_chi);
        b.push_back(std::move(e));
    }
    j["b"] = json{{"statement",
                   "per nonzero chi: witness a with l_chi(a) != 1 and the paired traces "
                   "along the (0,a) class"},
                  {"evidence", b}};
    json c = json::array();
    for (const auto& ev : rep.claim_c)
        c.push_back(json{{"chi", to_json(ev.chi)},
                         {"xi", to_json(ev.xi)},
                         {"translates", ev.translates},
                         {"shift_by", ev.shift_by}});
    j["c"] = json{{"statement",
                   "shift-translate characters yield unitarily equivalent components; "
                   "certified by translate detection plus the summability report"},
                  {"evidence", c},
                  {"summability_pass", rep.summability_pass}};
    json d = json::array();
    for (const auto& ev : rep.claim_d) {
        json e{{"chi", to_json(ev.chi)},
               {"xi", to_json(ev.xi)},
               {"witness", to_json(ev.witness)},
               {"l_chi", to_string(ev.l_chi)},
               {"l_xi", to_string(ev.l_xi)},
               {"witness_scheduled", ev.witness_scheduled}};
        if (ev.trace_chi) e["trace_chi"] = to_json(*ev.trace_chi);
        if (ev.trace_xi) e["trace_xi"] = to_json(*ev.trace_xi);
        d.push_back(std::move(e));
    }
    j["d"] = json{{"statement",
                   "non-translate characters separated by a witness with "
                   "l_chi(a) != l_xi(a); traces along the single-a class"},
                  {"evidence", d}};
    return j;
}

// ------------------------------------------------------------ multiplicity

inline json to_json(const MultiplicitySet& s) {
    json prov = json::object();
    for (const auto& [v, rules] : s.provenance) prov[std::to_string(v)] = rules;
    return json{{"values", s.values}, {"provenance", prov}};
}

inline json to_json(const OracleReport& rep) {
    json rows = json::array();
    for (const auto& q : rep.queries)
        rows.push_back(json{{"toy", q.toy},
                            {"chi", to_json(q.chi)},
                            {"power", to_string(q.power)},
                            {"N", q.N},
                            {"oracle_value", to_string(q.oracle_value)},
                            {"engine", to_json(q.engine)},
                            {"contained", q.contained}});
    return json{{"queries", rows},
                {"query_count", rep.queries.size()},
                {"violations", rep.violations},
                {"verdict", rep.pass() ? "engines agree" : "violations found"}};
}

// ------------------------------------------------------------------ config

/// FNV-1a 64 over the canonical (sorted-key) dump.
inline std::string config_hash(const json& cfg) {
    std::string s = cfg.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

/// "primes_up_to:N" named pattern, or an explicit array.
inline std::vector<std::int64_t> parse_E(const json& j) {
    if (j.is_array()) {
        auto v = j.get<std::vector<std::int64_t>>();
        if (v.empty()) throw ConfigError("E_EMPTY", "config field E: empty list");
        return v;
    }
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        const std::string prefix = "primes_up_to:";
        if (s.rfind(prefix, 0) == 0) {
            std::int64_t cap = std::stoll(s.substr(prefix.size()));
            std::vector<std::int64_t> primes;
            for (std::int64_t p = 2; p <= cap; ++p) {
                bool is_p = true;
                for (std::int64_t d = 2; d * d <= p; ++d)
                    if (p % d == 0) is_p = false;
                if (is_p) primes.push_back(p);
            }
            if (primes.empty())
                throw ConfigError("E_EMPTY", "config field E: no primes up to cap");
            return primes;
        }
        throw ConfigError("E_PATTERN", "config field E: unknown pattern " + s);
    }
    throw ConfigError("E_TYPE", "config field E: expected list or pattern string");
}

struct RunConfig {
    json raw;
    std::string hash;

    std::vector<std::int64_t> E;
    long steps = 0;
    long p_max = 0;
    std::vector<KValue> singles;
    std::vector<std::pair<KValue, KValue>> pairs;
    long n_max = 0;
    std::vector<GroupElement> characters;
    long trace_N = 1;
    std::vector<Int> trace_A, trace_B;  // empty means all of F_N
    long trace_n_min = 3;
    std::int64_t product_k = 0;  // 0 = skip product formula

    // caps
    Int max_h = Int(1) << 256;
    std::size_t combination_cap = 20000;
    std::size_t enumeration_cap = 2000000;
    std::int64_t period_cap = 16;

    // oracle
    std::uint64_t oracle_seed = 20250810;
    int oracle_queries = 240;
    int oracle_max_power = 50;

    int jobs = 1;
};

inline const json& require_field(const json& cfg, const std::string& name) {
    if (!cfg.contains(name))
        throw ConfigError("CONFIG_MISSING", "missing config field: " + name);
    return cfg.at(name);
}

inline RunConfig parse_config(const json& cfg) {
    if (!cfg.is_object()) throw ConfigError("CONFIG_TYPE", "config must be a JSON object");
    RunConfig rc;
    rc.raw = cfg;
    rc.hash = config_hash(cfg);
    if (cfg.contains("E")) rc.E = parse_E(cfg.at("E"));
    if (cfg.contains("steps")) rc.steps = cfg.at("steps").get<long>();
    if (cfg.contains("p_max")) rc.p_max = cfg.at("p_max").get<long>();
    if (cfg.contains("schedule")) {
        const json& s = cfg.at("schedule");
        if (s.contains("singles"))
            for (const auto& w : s.at("singles")) rc.singles.emplace_back(w.get<std::string>());
        if (s.contains("pairs"))
            for (const auto& p : s.at("pairs"))
                rc.pairs.emplace_back(KValue(p.at(0).get<std::string>()),
                                      KValue(p.at(1).get<std::string>()));
    }
    if (cfg.contains("n_max")) rc.n_max = cfg.at("n_max").get<long>();
    if (cfg.contains("characters"))
        for (const auto& c : cfg.at("characters"))
            rc.characters.push_back(group_element_from_json(c));
    if (cfg.contains("trace")) {
        const json& t = cfg.at("trace");
        if (t.contains("N")) rc.trace_N = t.at("N").get<long>();
        if (t.contains("n_min")) rc.trace_n_min = t.at("n_min").get<long>();
        if (t.contains("A"))
            for (const auto& f : t.at("A")) rc.trace_A.push_back(Int(f.get<std::int64_t>()));
        if (t.contains("B"))
            for (const auto& f : t.at("B")) rc.trace_B.push_back(Int(f.get<std::int64_t>()));
    }
    if (cfg.contains("product_k")) rc.product_k = cfg.at("product_k").get<std::int64_t>();
    if (cfg.contains("caps")) {
        const json& c = cfg.at("caps");
        if (c.contains("max_h")) rc.max_h = Int(c.at("max_h").get<std::string>());
        if (c.contains("combination_cap"))
            rc.combination_cap = c.at("combination_cap").get<std::size_t>();
        if (c.contains("enumeration_cap"))
            rc.enumeration_cap = c.at("enumeration_cap").get<std::size_t>();
        if (c.contains("period_cap")) rc.period_cap = c.at("period_cap").get<std::int64_t>();
        if (rc.combination_cap == 0 || rc.enumeration_cap == 0 || rc.period_cap <= 0)
            throw ConfigError("CAPS", "caps must be positive");
    }
    if (cfg.contains("oracle")) {
        const json& o = cfg.at("oracle");
        if (o.contains("seed")) rc.oracle_seed = o.at("seed").get<std::uint64_t>();
        if (o.contains("queries")) rc.oracle_queries = o.at("queries").get<int>();
        if (o.contains("max_power")) rc.oracle_max_power = o.at("max_power").get<int>();
    }
    if (cfg.contains("jobs")) rc.jobs = cfg.at("jobs").get<int>();
    return rc;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DependencyError("MISSING_FILE", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("BAD_JSON", path + ": " + e.what());
    }
    return j;
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("WRITE_FAIL", "cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace specmult
