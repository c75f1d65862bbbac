#include "hetaug/metapath.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <map>
#include <sstream>

using namespace hetaug;
using testutil::E;

namespace {

constexpr auto call = EdgeKind::call;
constexpr auto trans = EdgeKind::trans;

std::uint64_t pairs_naive(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::uint64_t n = 0;
    for (auto x : a)
        for (auto y : b) n += x < y;
    return n;
}

std::uint64_t triples_naive(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                            const std::vector<std::int64_t>& c) {
    std::uint64_t n = 0;
    for (auto x : a)
        for (auto y : b)
            for (auto z : c) n += x < y && y < z;
    return n;
}

std::vector<std::int64_t> sorted_times(hetaug::Rng& rng, std::size_t max_n) {
    std::vector<std::int64_t> v(rng.below(max_n + 1));
    for (auto& t : v) t = rng.between(0, 6);
    std::sort(v.begin(), v.end());
    return v;
}

HeterogeneousGraph reversed(const HeterogeneousGraph& g) {
    std::int64_t t_max = 0;
    for (const auto& e : g.edges()) t_max = std::max(t_max, e.timestamp);
    GraphBuilder b;
    for (NodeId v = 0; v < g.num_nodes(); ++v) b.add_node(g.name(v), g.type(v));
    for (const auto& e : g.edges()) b.add_edge(g.name(e.src), g.name(e.dst), e.kind, t_max - e.timestamp, e.value);
    return std::move(b).build(TypeSource::explicit_types);
}

} // namespace

TEST_CASE("P1 worked example") {
    const auto g = testutil::graph({{"E1", "C", call, 1}, {"E1", "C", call, 4}, {"C", "E2", trans, 2}, {"C", "E2", trans, 5}});
    const auto ta = enumerate_p1(g, TimeMode::time_aware);
    REQUIRE(ta.size() == 1);
    CHECK(testutil::names(g, ta[0]) == std::vector<std::string>{"E1", "C", "E2"});
    CHECK(ta[0].omega == 3);
    CHECK(ta[0].refined_class == RefinedClass::p11);

    const auto tl = enumerate_p1(g, TimeMode::timeless);
    REQUIRE(tl.size() == 1);
    CHECK(tl[0].omega == 4);
}

TEST_CASE("P1 with an impossible order") {
    const auto g = testutil::graph({{"E1", "C", call, 5}, {"C", "E2", trans, 2}});
    CHECK(enumerate_p1(g, TimeMode::time_aware).empty());
    CHECK(enumerate_p1(g, TimeMode::timeless).size() == 1);
}

TEST_CASE("equal timestamps do not count as ordered") {
    const auto g = testutil::graph({{"E1", "C", call, 3}, {"C", "E2", trans, 3}});
    CHECK(enumerate_p1(g, TimeMode::time_aware).empty());
}

TEST_CASE("P2 worked examples") {
    SUBCASE("two middle calls") {
        const auto g = testutil::graph(
            {{"E1", "C", call, 1}, {"C", "C2", call, 2}, {"C", "C2", call, 3}, {"C2", "E2", trans, 4}});
        const auto ta = enumerate_p2(g, TimeMode::time_aware);
        REQUIRE(ta.size() == 1);
        CHECK(testutil::names(g, ta[0]) == std::vector<std::string>{"E1", "C", "C2", "E2"});
        CHECK(ta[0].omega == 2);
        CHECK(ta[0].refined_class == RefinedClass::p21);
        const auto tl = enumerate_p2(g, TimeMode::timeless);
        REQUIRE(tl.size() == 1);
        CHECK(tl[0].omega == 2);
    }
    SUBCASE("self-call back to the head") {
        const auto g = testutil::graph({{"E1", "C", call, 1}, {"C", "C", call, 2}, {"C", "E1", trans, 3}});
        const auto ta = enumerate_p2(g, TimeMode::time_aware);
        REQUIRE(ta.size() == 1);
        CHECK(testutil::names(g, ta[0]) == std::vector<std::string>{"E1", "C", "C", "E1"});
        CHECK(ta[0].refined_class == RefinedClass::p24);
        CHECK(ta[0].omega == 1);
        // The same trans edge also closes a P1 path.
        const auto p1 = enumerate_p1(g, TimeMode::time_aware);
        REQUIRE(p1.size() == 1);
        CHECK(p1[0].refined_class == RefinedClass::p12);
    }
}

TEST_CASE("CA tails and EOA middles are not paths") {
    const auto g = testutil::graph({{"E1", "C", call, 1}, {"C", "C2", trans, 2}, {"E1", "E2", trans, 3}});
    CHECK(enumerate_p1(g, TimeMode::timeless).empty());
    CHECK(enumerate_p2(g, TimeMode::timeless).empty());
}

TEST_CASE("refine") {
    SuperMetapath s;
    s.pattern = Pattern::p1;
    s.nodes = {0, 1, 2, kNoNode};
    CHECK(refine(s) == RefinedClass::p11);
    s.nodes = {0, 1, 0, kNoNode};
    CHECK(refine(s) == RefinedClass::p12);
    s.pattern = Pattern::p2;
    s.nodes = {0, 1, 2, 3};
    CHECK(refine(s) == RefinedClass::p21);
    s.nodes = {0, 1, 2, 0};
    CHECK(refine(s) == RefinedClass::p22);
    s.nodes = {0, 1, 1, 3};
    CHECK(refine(s) == RefinedClass::p23);
    s.nodes = {0, 1, 1, 0};
    CHECK(refine(s) == RefinedClass::p24);
}

TEST_CASE("pair and triple counting") {
    CHECK(count_increasing_pairs(std::vector<std::int64_t>{1, 4}, std::vector<std::int64_t>{2, 5}) == 3);
    CHECK(count_increasing_pairs(std::vector<std::int64_t>{}, std::vector<std::int64_t>{2}) == 0);
    CHECK(count_increasing_triples(std::vector<std::int64_t>{1}, std::vector<std::int64_t>{2, 3},
                                   std::vector<std::int64_t>{4}) == 2);
    hetaug::Rng rng(1);
    for (int i = 0; i < 500; ++i) {
        const auto a = sorted_times(rng, 8), b = sorted_times(rng, 8), c = sorted_times(rng, 8);
        CHECK(count_increasing_pairs(a, b) == pairs_naive(a, b));
        CHECK(count_increasing_triples(a, b, c) == triples_naive(a, b, c));
    }
}

TEST_CASE("empty graph") {
    const HeterogeneousGraph g;
    for (auto p : {Pattern::p1, Pattern::p2})
        for (auto m : {TimeMode::time_aware, TimeMode::timeless}) {
            CHECK(enumerate(g, p, m).empty());
            CHECK(brute_force_supers(g, p, m).empty());
        }
    CHECK(metapath_stats({}) == MetapathStats{});
}

TEST_CASE("matches the brute-force oracle on random graphs") {
    hetaug::Rng rng(2024);
    for (int i = 0; i < 150; ++i) {
        const auto g = testutil::random_graph(rng);
        for (auto p : {Pattern::p1, Pattern::p2})
            for (auto m : {TimeMode::time_aware, TimeMode::timeless}) {
                const auto fast = enumerate(g, p, m, 1 + i % 3);
                CHECK(fast == brute_force_supers(g, p, m));
            }
    }
}

TEST_CASE("partition, dominance and time reversal") {
    hetaug::Rng rng(77);
    for (int i = 0; i < 100; ++i) {
        const auto g = testutil::random_graph(rng);
        for (auto p : {Pattern::p1, Pattern::p2}) {
            const auto ta = enumerate(g, p, TimeMode::time_aware);
            const auto tl = enumerate(g, p, TimeMode::timeless);
            std::map<std::array<NodeId, 4>, std::uint64_t> tl_omega;
            for (const auto& s : tl) tl_omega[s.nodes] = s.omega;
            for (const auto& s : ta) {
                REQUIRE(tl_omega.count(s.nodes));
                CHECK(s.omega <= tl_omega[s.nodes]);
                CHECK(s.omega >= 1);
                CHECK(g.is_ca(s.target()));
                CHECK(s.refined_class == refine(s));
            }
            const auto stats = metapath_stats(ta);
            const auto classes = p == Pattern::p1
                                     ? std::vector<RefinedClass>{RefinedClass::p11, RefinedClass::p12}
                                     : std::vector<RefinedClass>{RefinedClass::p21, RefinedClass::p22,
                                                                 RefinedClass::p23, RefinedClass::p24};
            std::uint64_t sum = 0, direct = 0;
            for (auto c : classes) sum += stats.omega(c);
            for (const auto& s : ta) direct += s.omega;
            CHECK(sum == stats.omega_total(p));
            CHECK(sum == direct);
        }

        // P1: forward + backward + equal-time pairs = all pairs.
        const auto fwd = enumerate(g, Pattern::p1, TimeMode::time_aware);
        const auto rev_g = reversed(g);
        const auto bwd = enumerate(rev_g, Pattern::p1, TimeMode::time_aware);
        const auto all = enumerate(g, Pattern::p1, TimeMode::timeless);
        std::map<std::array<NodeId, 4>, std::uint64_t> f, b;
        for (const auto& s : fwd) f[s.nodes] = s.omega;
        for (const auto& s : bwd) b[s.nodes] = s.omega;
        for (const auto& s : all) {
            std::uint64_t equal = 0;
            for (const auto& c : g.adjacency(s.target(), Direction::in, EdgeKind::call))
                if (c.src == s.head())
                    for (const auto& t : g.adjacency(s.target(), Direction::out, EdgeKind::trans))
                        equal += t.dst == s.tail() && t.timestamp == c.timestamp;
            CHECK(f[s.nodes] + b[s.nodes] + equal == s.omega);
        }
    }
}

TEST_CASE("output does not depend on thread count") {
    hetaug::Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        const auto g = testutil::random_graph(rng);
        for (auto p : {Pattern::p1, Pattern::p2}) {
            const auto one = enumerate(g, p, TimeMode::time_aware, 1);
            CHECK(one == enumerate(g, p, TimeMode::time_aware, 4));
            CHECK(std::is_sorted(one.begin(), one.end(), canonical_less));
        }
    }
}

TEST_CASE("stats and dump formats") {
    const auto g = testutil::graph({{"E1", "C", call, 1}, {"E1", "C", call, 4}, {"C", "E2", trans, 2}, {"C", "E2", trans, 5}});
    const auto supers = enumerate(g, Pattern::p1, TimeMode::time_aware);
    const auto stats = metapath_stats(supers);
    CHECK(stats.omega(RefinedClass::p11) == 3);
    CHECK(stats.omega(RefinedClass::p12) == 0);
    CHECK(stats.omega_total(Pattern::p1) == 3);
    CHECK(stats.super_total(Pattern::p1) == 1);
    CHECK(stats.omega_total(Pattern::p2) == 0);

    std::ostringstream dump;
    write_super_dump(dump, supers, g);
    CHECK(dump.str() == "pattern,refined_class,node_sequence,omega\nP1,P11,E1|C|E2,3\n");

    std::ostringstream table;
    write_metapath_stats_csv(table, stats);
    CHECK(table.str() ==
          "metapath,P11,P12,P21,P22,P23,P24,Sum\n"
          "P1,3,0,-,-,-,-,3\n"
          "P2,-,-,0,0,0,0,0\n"
          "P1_supers,1,0,-,-,-,-,1\n"
          "P2_supers,-,-,0,0,0,0,0\n");
}
