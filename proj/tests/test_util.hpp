#pragma once

#include "hetaug/graph_store.hpp"
#include "hetaug/metapath.hpp"
#include "hetaug/rng.hpp"

#include <algorithm>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <tuple>
#include <vector>

namespace testutil {

using hetaug::EdgeKind;
using hetaug::NodeType;

struct E {
    std::string src, dst;
    EdgeKind kind;
    std::int64_t t;
    double value = 1.0;
};

// Accounts named with a leading 'C' are contracts, everything else is an EOA.
inline hetaug::HeterogeneousGraph graph(std::initializer_list<E> edges) {
    hetaug::GraphBuilder b;
    for (const auto& e : edges) {
        for (const auto* n : {&e.src, &e.dst}) b.add_node(*n, (*n)[0] == 'C' ? NodeType::ca : NodeType::eoa);
        b.add_edge(e.src, e.dst, e.kind, e.t, e.value);
    }
    return std::move(b).build(hetaug::TypeSource::explicit_types);
}

// Small random typed multigraph with many repeated timestamps. Call edges
// always point at contracts; trans edges go anywhere.
inline hetaug::HeterogeneousGraph random_graph(hetaug::Rng& rng, std::size_t max_edges = 60) {
    const std::size_t n_eoa = 2 + rng.below(5);
    const std::size_t n_ca = 1 + rng.below(4);
    const std::size_t n_edges = 1 + rng.below(max_edges);
    const std::int64_t t_max = 1 + static_cast<std::int64_t>(rng.below(12));
    hetaug::GraphBuilder b;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n_eoa; ++i) names.push_back("E" + std::to_string(i));
    for (std::size_t i = 0; i < n_ca; ++i) names.push_back("C" + std::to_string(i));
    for (const auto& n : names) b.add_node(n, n[0] == 'C' ? NodeType::ca : NodeType::eoa);
    for (std::size_t i = 0; i < n_edges; ++i) {
        const auto& src = names[rng.below(names.size())];
        const bool call = rng.bernoulli(0.5);
        const auto& dst = call ? names[n_eoa + rng.below(n_ca)] : names[rng.below(names.size())];
        b.add_edge(src, dst, call ? EdgeKind::call : EdgeKind::trans, rng.between(0, t_max),
                   static_cast<double>(rng.below(5)));
    }
    return std::move(b).build(hetaug::TypeSource::explicit_types);
}

inline std::vector<std::string> names(const hetaug::HeterogeneousGraph& g, const hetaug::SuperMetapath& s) {
    std::vector<std::string> out;
    for (auto v : s.node_sequence()) out.push_back(g.name(v));
    return out;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("hetaug_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testutil
