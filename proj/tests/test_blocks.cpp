#include "specmult/blocks.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace specmult;

namespace {

BlockSystem build(std::vector<std::int64_t> E, std::size_t steps) {
    return BlockSystem::build(TargetSequence(std::move(E)), steps);
}

}  // namespace

TEST_CASE("step 1 places singletons at powers of 3") {
    auto s2 = build({2}, 1);
    REQUIRE(s2.blocks().size() == 2);
    CHECK(s2.blocks()[0] == BlockSystem::Block{1});
    CHECK(s2.blocks()[1] == BlockSystem::Block{3});
    auto s3 = build({3}, 1);
    REQUIRE(s3.blocks().size() == 3);
    CHECK(s3.blocks()[2] == BlockSystem::Block{9});
}

TEST_CASE("step 2 for E = {2} appends one copy of {1,3}") {
    auto sys = build({2}, 2);
    REQUIRE(sys.blocks().size() == 3);
    // Offset rule: smallest min strictly above 2*3 + 1.
    CHECK(sys.blocks()[2] == (BlockSystem::Block{8, 10}));
    CHECK(sys.step_boundaries() == std::vector<std::size_t>{2, 3});
}

TEST_CASE("target sequence reorders 1 away from the front and recurs") {
    TargetSequence t({1, 4});
    CHECK(t.n(1) == 4);
    CHECK(t.n(2) == 1);
    CHECK(t.n(3) == 4);
    CHECK(t.n(4) == 1);
    CHECK_FALSE(t.is_trivial());
    CHECK(TargetSequence({1, 1}).is_trivial());
}

TEST_CASE("E = {1} is rejected") {
    CHECK_THROWS_AS(build({1}, 1), ConfigError);
    try {
        build({1}, 2);
    } catch (const ConfigError& e) {
        CHECK(e.code() == "E_TRIVIAL");
    }
}

TEST_CASE("separation invariant holds on every build") {
    for (auto E : std::vector<std::vector<std::int64_t>>{{2}, {3}, {2, 3}, {2, 5, 7}}) {
        auto sys = build(E, 3);
        const auto& b = sys.blocks();
        for (std::size_t i = 0; i + 1 < b.size(); ++i)
            REQUIRE(2 * b[i].back() < b[i + 1].front());
        // Blocks created at step k have cardinality k.
        std::size_t step = 0;
        for (std::size_t bi = 0; bi < b.size(); ++bi) {
            while (bi >= sys.step_boundaries()[step]) ++step;
            CHECK(b[bi].size() == step + 1);
        }
    }
}

TEST_CASE("is_in_H") {
    auto sys = build({2}, 1);
    CHECK(sys.is_in_H(GroupElement{}));
    CHECK_FALSE(sys.is_in_H(GroupElement{2}));
    CHECK(sys.is_in_H(GroupElement{1, 3}));
    auto sys2 = build({2}, 2);
    CHECK(sys2.is_in_H(GroupElement{8, 10}));
    CHECK_FALSE(sys2.is_in_H(GroupElement{8}));  // half a block
}

TEST_CASE("orbit_count matches the target values") {
    auto s2 = build({2}, 2);
    CHECK(s2.orbit_count(GroupElement{1}) == 2);
    CHECK(s2.orbit_count(GroupElement{1, 3}) == 2);
    auto s3 = build({3}, 1);
    CHECK(s3.orbit_count(GroupElement{1}) == 3);
    // Preconditions are hard errors, not wrong answers.
    CHECK_THROWS_AS(s2.orbit_count(GroupElement{}), ConfigError);
    CHECK_THROWS_AS(s2.orbit_count(GroupElement{2}), ConfigError);
    auto s1 = build({2}, 1);
    CHECK_THROWS_AS(s1.orbit_count(GroupElement{1, 3}), ConfigError);
}

TEST_CASE("orbit-count theorem at finite scale") {
    for (auto E : std::vector<std::vector<std::int64_t>>{{2}, {3}, {2, 3}}) {
        TargetSequence target(E);
        auto sys = BlockSystem::build(target, 3);
        auto [elements, trunc] = sys.enumerate_H(3, 100000);
        REQUIRE_FALSE(trunc);
        for (const auto& supp : elements) {
            GroupElement g(supp);
            CHECK(sys.orbit_count(g) == target.n(supp.size()));
        }
    }
}

TEST_CASE("translate completeness per basic subset") {
    // Each 2-basic materialized at step 2 has exactly n_2 translates in A.
    auto sys = build({2, 3}, 2);  // n_1 = 2, n_2 = 3
    CHECK(sys.count_translates({1, 3}) == 3);
}

TEST_CASE("determinism: identical inputs give identical systems") {
    auto a = build({2, 5, 7}, 3);
    auto b = build({2, 5, 7}, 3);
    CHECK(a.blocks() == b.blocks());
    CHECK(a.offsets_used() == b.offsets_used());
    CHECK(a.step_boundaries() == b.step_boundaries());
}

TEST_CASE("verify_L") {
    SECTION("E = {2}, all counts 2") {
        auto sys = build({2}, 2);
        auto rep = verify_L(sys, 2);
        CHECK(rep.pass());
        CHECK(rep.realized_values == std::vector<std::int64_t>{2});
        for (const auto& row : rep.rows) CHECK(row.count == 2);
    }
    SECTION("E = {2,3}: size-1 supports count 2, size-2 count 3") {
        auto sys = build({2, 3}, 2);
        auto rep = verify_L(sys, 2);
        CHECK(rep.pass());
        for (const auto& row : rep.rows)
            CHECK(row.count == (row.p == 1 ? 2 : 3));
        CHECK(rep.realized_values == std::vector<std::int64_t>{2, 3});
    }
    SECTION("p_max = 0 is a trivially passing empty report") {
        auto sys = build({2}, 1);
        auto rep = verify_L(sys, 0);
        CHECK(rep.rows.empty());
        CHECK(rep.pass());
    }
    SECTION("combination cap marks the report truncated") {
        auto sys = build({2, 5, 7}, 3);
        auto rep = verify_L(sys, 3, 10);
        CHECK(rep.truncated);
    }
    SECTION("p_max beyond built steps is rejected") {
        auto sys = build({2}, 2);
        CHECK_THROWS_AS(verify_L(sys, 3), ConfigError);
    }
}

TEST_CASE("restore round-trips and re-checks separation") {
    auto sys = build({2, 3}, 2);
    auto copy = BlockSystem::restore(sys.target(), sys.blocks(), sys.step_boundaries(),
                                     sys.offsets_used());
    CHECK(copy.blocks() == sys.blocks());
    auto bad_blocks = sys.blocks();
    bad_blocks[1] = {2};  // 2*1 < 2 fails
    CHECK_THROWS_AS(BlockSystem::restore(sys.target(), bad_blocks, sys.step_boundaries(),
                                         sys.offsets_used()),
                    VerificationError);
}
