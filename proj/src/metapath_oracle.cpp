#include "hetaug/metapath.hpp"

#include <map>

namespace hetaug {

// Deliberately naive: walks the raw edge list only, never the adjacency
// index, and decides refined classes from the node tuple directly.
std::vector<SuperMetapath> brute_force_supers(const HeterogeneousGraph& g, Pattern pattern,
                                              TimeMode mode) {
    const auto edges = g.edges();
    const bool timed = mode == TimeMode::time_aware;
    std::map<std::array<NodeId, 4>, std::uint64_t> groups;

    for (const auto& e1 : edges) {
        if (e1.kind != EdgeKind::call || !g.is_eoa(e1.src) || !g.is_ca(e1.dst)) continue;
        for (const auto& e2 : edges) {
            if (e2.src != e1.dst) continue;
            if (timed && !(e1.timestamp < e2.timestamp)) continue;
            if (pattern == Pattern::p1) {
                if (e2.kind == EdgeKind::trans && g.is_eoa(e2.dst))
                    ++groups[{e1.src, e1.dst, e2.dst, kNoNode}];
                continue;
            }
            if (e2.kind != EdgeKind::call || !g.is_ca(e2.dst)) continue;
            for (const auto& e3 : edges) {
                if (e3.src != e2.dst || e3.kind != EdgeKind::trans || !g.is_eoa(e3.dst)) continue;
                if (timed && !(e2.timestamp < e3.timestamp)) continue;
                ++groups[{e1.src, e1.dst, e2.dst, e3.dst}];
            }
        }
    }

    std::vector<SuperMetapath> out;
    out.reserve(groups.size());
    for (const auto& [nodes, count] : groups) {
        SuperMetapath sm;
        sm.pattern = pattern;
        sm.nodes = nodes;
        sm.omega = count;
        if (pattern == Pattern::p1) {
            sm.refined_class = nodes[0] == nodes[2] ? RefinedClass::p12 : RefinedClass::p11;
        } else if (nodes[2] != nodes[1]) {
            sm.refined_class = nodes[0] == nodes[3] ? RefinedClass::p22 : RefinedClass::p21;
        } else {
            sm.refined_class = nodes[0] == nodes[3] ? RefinedClass::p24 : RefinedClass::p23;
        }
        out.push_back(sm);
    }
    return out;
}

} // namespace hetaug
