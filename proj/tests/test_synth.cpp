#include "hetaug/error.hpp"
#include "hetaug/metapath.hpp"
#include "hetaug/synth.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <fstream>
#include <iterator>
#include <map>
#include <set>

using namespace hetaug;

namespace {

SynthConfig small(std::uint64_t seed) {
    SynthConfig sc;
    sc.n_ponzi_ca = 12;
    sc.n_normal_ca = 12;
    sc.n_eoa = 400;
    sc.seed = seed;
    return sc;
}

} // namespace

TEST_CASE("generation is deterministic per seed") {
    const auto a = generate(small(3));
    const auto b = generate(small(3));
    CHECK(a.graph == b.graph);
    CHECK(a.labels.ponzi_accounts == b.labels.ponzi_accounts);
    CHECK(!(generate(small(4)).graph == a.graph));
}

TEST_CASE("shape of the generated graph") {
    const auto sc = small(5);
    const auto d = generate(sc);
    const auto& g = d.graph;
    CHECK(g.num_nodes() == sc.n_ponzi_ca + sc.n_normal_ca + sc.n_eoa);
    CHECK(g.nodes_of_type(NodeType::ca).size() == sc.n_ponzi_ca + sc.n_normal_ca);
    REQUIRE(d.labels.ponzi_accounts.size() == sc.n_ponzi_ca);
    for (NodeId v : d.labels.ponzi_accounts) CHECK(g.is_ca(v));
    for (const auto& e : g.edges()) {
        if (e.kind == EdgeKind::call) CHECK(g.is_ca(e.dst));
        CHECK(e.timestamp >= 0);
        CHECK(e.value >= 0.0);
    }
    // Type inference agrees with the declared types: every contract is called.
    for (NodeId v : g.nodes_of_type(NodeType::ca)) CHECK(!g.adjacency(v, Direction::in, EdgeKind::call).empty());
}

TEST_CASE("planted Ponzi behavior") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto d = generate(small(seed));
        const auto& g = d.graph;
        const std::set<NodeId> ponzi(d.labels.ponzi_accounts.begin(), d.labels.ponzi_accounts.end());

        // Every scheme pays some investor after somebody else deposited.
        std::set<NodeId> with_p11;
        for (const auto& s : enumerate(g, Pattern::p1, TimeMode::time_aware))
            if (s.refined_class == RefinedClass::p11) with_p11.insert(s.target());
        for (NodeId c : ponzi) CHECK(with_p11.count(c));

        // Schemes never call themselves.
        for (const auto& s : enumerate(g, Pattern::p2, TimeMode::timeless))
            if (ponzi.count(s.target()))
                CHECK((s.refined_class == RefinedClass::p21 || s.refined_class == RefinedClass::p22));

        // Time order keeps more of a scheme's P1 paths than of a normal
        // contract's: per-CA ratio of time-aware to timeless omega, averaged.
        std::map<NodeId, double> ta, tl;
        for (const auto& s : enumerate(g, Pattern::p1, TimeMode::time_aware)) ta[s.target()] += s.omega;
        for (const auto& s : enumerate(g, Pattern::p1, TimeMode::timeless)) tl[s.target()] += s.omega;
        double ratio[2] = {0, 0};
        int count[2] = {0, 0};
        for (const auto& [ca, total] : tl) {
            const int cls = ponzi.count(ca) ? 1 : 0;
            ratio[cls] += ta[ca] / total;
            ++count[cls];
        }
        REQUIRE(count[0] > 0);
        REQUIRE(count[1] > 0);
        CHECK(ratio[1] / count[1] > ratio[0] / count[0]);
    }
}

TEST_CASE("default benchmark plants the Ponzi patterns") {
    const auto d = generate(SynthConfig{});
    const std::set<NodeId> ponzi(d.labels.ponzi_accounts.begin(), d.labels.ponzi_accounts.end());
    std::set<NodeId> with_p11;
    for (const auto& s : enumerate(d.graph, Pattern::p1, TimeMode::time_aware))
        if (s.refined_class == RefinedClass::p11) with_p11.insert(s.target());
    for (NodeId c : ponzi) CHECK(with_p11.count(c));
    std::uint64_t self_call_omega = 0;
    for (auto mode : {TimeMode::time_aware, TimeMode::timeless})
        for (const auto& s : enumerate(d.graph, Pattern::p2, mode))
            if (ponzi.count(s.target()) && (s.refined_class == RefinedClass::p23 || s.refined_class == RefinedClass::p24))
                self_call_omega += s.omega;
    CHECK(self_call_omega == 0);
}

TEST_CASE("edge lists are byte-identical per seed") {
    const auto a = testutil::temp_dir("synth_a"), b = testutil::temp_dir("synth_b");
    write_synthetic(a, generate(small(21)));
    write_synthetic(b, generate(small(21)));
    for (const char* f : {"edges.csv", "types.csv", "labels.txt"}) {
        std::ifstream fa(a / f, std::ios::binary), fb(b / f, std::ios::binary);
        const std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
        CHECK(!sa.empty());
        CHECK(sa == sb);
    }
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST_CASE("degenerate configs") {
    SynthConfig none;
    none.n_ponzi_ca = 0;
    none.n_normal_ca = 0;
    none.n_eoa = 10;
    const auto d = generate(none);
    CHECK(d.graph.num_edges() == 0);
    CHECK(d.graph.num_nodes() == 10);
    CHECK(d.labels.ponzi_accounts.empty());

    // A tiny victim pool with full affinity still terminates.
    auto tight = small(9);
    tight.victim_pool = 0.001;
    tight.victim_affinity = 1.0;
    CHECK(generate(tight).labels.ponzi_accounts.size() == tight.n_ponzi_ca);
}

TEST_CASE("invalid configs are rejected") {
    const auto bad = [](auto mutate) {
        SynthConfig sc;
        mutate(sc);
        return sc;
    };
    CHECK_THROWS_AS(bad([](SynthConfig& s) { s.p2_fraction = 1.5; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SynthConfig& s) { s.reward_probability = -0.1; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SynthConfig& s) { s.deposits_per_investor = 0.5; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SynthConfig& s) { s.payout_lag = -1; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SynthConfig& s) { s.time_horizon = 2; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SynthConfig& s) { s.n_eoa = 0; }).validate(), ConfigError);
    CHECK_NOTHROW(SynthConfig{}.validate());
}

TEST_CASE("written files read back to the same graph") {
    const auto d = generate(small(11));
    const auto dir = testutil::temp_dir("synth");
    write_synthetic(dir, d);
    const auto g = ingest_edges(dir / "edges.csv", dir / "types.csv");
    CHECK(g == d.graph);
    const auto labels = read_labels(dir / "labels.txt", g);
    CHECK(labels.ponzi_accounts == d.labels.ponzi_accounts);
    std::filesystem::remove_all(dir);
}
